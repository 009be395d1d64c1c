#include "cdr/dissection.hpp"

#include <bit>
#include <cstdlib>
#include <sstream>

namespace cdr {

namespace {

bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(std::int64_t v) { return std::countr_zero(static_cast<std::uint64_t>(v)); }

std::int64_t sublevel_budget(int exponent) { return std::int64_t{1} << ((exponent + 3) / 4); }

}  // namespace

std::int64_t LevelLadder::sublevel_waiting() const {
  std::int64_t total = 0;
  for (int l = 1; l <= depth(); ++l) total += (path_length() / length(l)) * budget(l);
  return total;
}

LevelLadder LevelLadder::root_only(std::int64_t path_length) {
  if (!is_power_of_two(path_length)) throw LadderError("path length must be a power of two");
  LevelLadder ladder;
  ladder.delta = path_length;
  ladder.levels.push_back({path_length, path_length, log2_exact(path_length)});
  return ladder;
}

LevelLadder build_ladder(std::int64_t path_length, std::int64_t delta) {
  if (delta < 2) throw LadderError("delta must be at least 2");
  if (!is_power_of_two(path_length)) throw LadderError("path length must be a power of two");
  if (path_length < delta) throw LadderError("path too short for ladder");

  LevelLadder ladder;
  ladder.delta = delta;
  int e = log2_exact(path_length);
  ladder.levels.push_back({path_length, path_length, e});
  const std::int64_t stop = delta * delta;
  while (ladder.levels.back().length > stop) {
    e = (e + 1) / 2;
    ladder.levels.push_back({std::int64_t{1} << e, sublevel_budget(e), e});
  }
  return ladder;
}

std::int64_t BlockTree::block_index(int level, std::int64_t pos) const {
  return (pos - 1) / levels[level].front().size();
}

BlockTree dissect_plain(std::int64_t path_length, const LevelLadder& ladder) {
  if (ladder.path_length() != path_length) throw LadderError("ladder built for a different length");
  BlockTree tree;
  tree.path_length = path_length;
  for (const auto& level : ladder.levels) {
    std::vector<Block> blocks;
    for (std::int64_t a = 1; a <= path_length; a += level.length) blocks.push_back({a, a + level.length - 1});
    tree.levels.push_back(std::move(blocks));
  }
  return tree;
}

int assigned_level(std::int64_t pos, int depth) {
  if (pos == 0) return -1;
  const int q = std::countr_zero(static_cast<std::uint64_t>(std::llabs(pos)));
  return q < depth ? depth - q : -1;
}

std::int64_t ShiftedBlockTree::block_index(int level, std::int64_t pos) const {
  if (level == 0) return 0;
  const std::int64_t d = levels[level].front().span.size();
  return (pos - 1 + d / 2) / d;
}

ShiftedBlockTree dissect_shifted(std::int64_t path_length, const LevelLadder& ladder) {
  if (ladder.path_length() != path_length) throw LadderError("ladder built for a different length");
  ShiftedBlockTree tree;
  tree.path_length = path_length;
  tree.depth = ladder.depth();
  tree.assignment.assign(path_length + 1, -1);
  for (std::int64_t p = 1; p <= path_length; ++p) tree.assignment[p] = assigned_level(p, tree.depth);

  tree.levels.push_back({ShiftedBlock{{1, path_length}, {}, false}});
  for (int l = 1; l <= tree.depth; ++l) {
    const std::int64_t d = ladder.length(l);
    std::vector<ShiftedBlock> blocks;
    for (std::int64_t a = 1 - d / 2; a <= path_length; a += d) {
      ShiftedBlock b;
      b.span = {a, a + d - 1};
      b.truncated = b.span.first < 1 || b.span.last > path_length;
      for (std::int64_t p = b.span.first; p <= b.span.last; ++p) {
        if (assigned_level(p, tree.depth) == l) b.assigned.push_back(p);
      }
      if (static_cast<std::int64_t>(b.assigned.size()) < ladder.budget(l)) {
        throw LadderError("level " + std::to_string(l) + " block has fewer assigned edges than its budget");
      }
      blocks.push_back(std::move(b));
    }
    tree.levels.push_back(std::move(blocks));
  }
  return tree;
}

std::vector<std::int64_t> waiting_positions(const ShiftedBlock& block, std::int64_t budget,
                                            std::int64_t x) {
  std::vector<std::int64_t> out;
  const auto n = static_cast<std::int64_t>(block.assigned.size());
  for (std::int64_t k = 0; k < x; ++k) out.push_back(block.assigned[k]);
  for (std::int64_t k = n - (budget - x); k < n; ++k) out.push_back(block.assigned[k]);
  return out;
}

std::int64_t buffered_total_waiting(const LevelLadder& ladder) {
  std::int64_t total = ladder.path_length();
  for (int l = 1; l <= ladder.depth(); ++l) {
    total += (ladder.path_length() / ladder.length(l) + 1) * ladder.budget(l);
  }
  return total;
}

std::string dump(const LevelLadder& ladder, const BlockTree& tree) {
  std::ostringstream os;
  os << "dissection plain length=" << tree.path_length << " delta=" << ladder.delta
     << " depth=" << ladder.depth() << "\n";
  for (int l = 0; l <= ladder.depth(); ++l) {
    os << "  level " << l << " D=" << ladder.length(l) << " W=" << ladder.budget(l) << ":";
    for (const auto& b : tree.levels[l]) os << " [" << b.first << ".." << b.last << "]";
    os << "\n";
  }
  return os.str();
}

std::string dump(const LevelLadder& ladder, const ShiftedBlockTree& tree) {
  std::ostringstream os;
  os << "dissection shifted length=" << tree.path_length << " delta=" << ladder.delta
     << " depth=" << ladder.depth() << "\n";
  for (int l = 0; l <= ladder.depth(); ++l) {
    os << "  level " << l << " D=" << ladder.length(l) << " W=" << ladder.budget(l) << ":";
    for (const auto& b : tree.levels[l]) {
      os << " [" << b.span.first << ".." << b.span.last << "]" << (b.truncated ? "*" : "");
    }
    os << "\n";
    if (l >= 1) {
      os << "    assigned:";
      for (std::int64_t p = 1; p <= tree.path_length; ++p) {
        if (tree.assignment[p] == l) os << " " << p;
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace cdr
