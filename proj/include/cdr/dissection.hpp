#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdr {

/// One rung of the ladder: blocks of `length` = 2^exponent edges, each with a
/// waiting budget of `budget` time units.
struct Level {
  std::int64_t length = 0;
  std::int64_t budget = 0;
  int exponent = 0;

  friend bool operator==(const Level&, const Level&) = default;
};

/// Block lengths D_0 > D_1 > ... > D_L (powers of two, each dividing the
/// previous) and waiting budgets W_0 = D_0, W_l = 2^ceil(e_l / 4) for l >= 1.
struct LevelLadder {
  std::int64_t delta = 0;
  std::vector<Level> levels;

  int depth() const { return static_cast<int>(levels.size()) - 1; }
  std::int64_t path_length() const { return levels.front().length; }
  std::int64_t length(int l) const { return levels[l].length; }
  std::int64_t budget(int l) const { return levels[l].budget; }
  /// Sum over l >= 1 of (D'/D_l) * W_l.
  std::int64_t sublevel_waiting() const;
  /// Total per-packet waiting of the plain policy.
  std::int64_t total_waiting() const { return budget(0) + sublevel_waiting(); }
  /// Latest possible arrival of the plain policy: D' + total waiting.
  std::int64_t horizon() const { return path_length() + total_waiting(); }

  /// Degenerate single-level ladder for paths shorter than delta.
  static LevelLadder root_only(std::int64_t path_length);
};

class LadderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Repeated halving of the exponent (rounded up), stopping at the first level
/// whose length is at most delta^2.
LevelLadder build_ladder(std::int64_t path_length, std::int64_t delta);

/// Edge interval [first, last], 1-based positions. Shifted blocks may reach
/// outside [1, D'].
struct Block {
  std::int64_t first = 0;
  std::int64_t last = 0;
  std::int64_t start_node() const { return first - 1; }
  std::int64_t end_node() const { return last; }
  std::int64_t size() const { return last - first + 1; }
  bool contains(std::int64_t pos) const { return first <= pos && pos <= last; }

  friend bool operator==(const Block&, const Block&) = default;
};

/// Laminar dissection of a length-D' path. All padded paths share it.
struct BlockTree {
  std::int64_t path_length = 0;
  std::vector<std::vector<Block>> levels;

  std::int64_t block_index(int level, std::int64_t pos) const;
  const Block& block_at(int level, std::int64_t pos) const {
    return levels[level][block_index(level, pos)];
  }
};

BlockTree dissect_plain(std::int64_t path_length, const LevelLadder& ladder);

/// Level at which edge position `pos` carries waiting in the shifted variant:
/// pos = odd * 2^q with q < depth is assigned to level depth - q; -1 means no
/// level. Defined for virtual positions too (pos <= 0 is mirrored).
int assigned_level(std::int64_t pos, int depth);

struct ShiftedBlock {
  Block span;
  /// Positions assigned to this block's level, ascending. Includes virtual
  /// positions that fall before the source or after the sink.
  std::vector<std::int64_t> assigned;
  bool truncated = false;
};

/// Shifted dissection: for l >= 1 the level-l blocks are offset by D_l / 2 so
/// every level l-1 boundary node is the middle node of a level-l block.
struct ShiftedBlockTree {
  std::int64_t path_length = 0;
  int depth = 0;
  std::vector<std::vector<ShiftedBlock>> levels;
  /// assignment[pos] for pos in 1..D' (index 0 unused), -1 when unassigned.
  std::vector<int> assignment;

  std::int64_t block_index(int level, std::int64_t pos) const;
  const ShiftedBlock& block_at(int level, std::int64_t pos) const {
    return levels[level][block_index(level, pos)];
  }
};

ShiftedBlockTree dissect_shifted(std::int64_t path_length, const LevelLadder& ladder);

/// Positions at which a packet waits inside a shifted block for start value
/// x in [1, W]: the first x and the last W - x assigned positions.
std::vector<std::int64_t> waiting_positions(const ShiftedBlock& block, std::int64_t budget,
                                            std::int64_t x);

/// Total per-packet waiting of the buffered policy: D' at the source split
/// plus W_l for each (possibly truncated) shifted block.
std::int64_t buffered_total_waiting(const LevelLadder& ladder);

/// Indented text rendering, one line per level.
std::string dump(const LevelLadder& ladder, const BlockTree& tree);
std::string dump(const LevelLadder& ladder, const ShiftedBlockTree& tree);

}  // namespace cdr
