#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cdr/dissection.hpp"
#include "cdr/instance.hpp"
#include "cdr/rng.hpp"

namespace cdr {

enum class Variant { kPlain, kBuffered };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Waiting policy on a length-D' path: the ladder plus the block structure of
/// the chosen variant. Slots are 1-based; a packet crossing position j at slot
/// t occupies edge j during slot t.
class DelayModel {
 public:
  DelayModel(LevelLadder ladder, Variant variant);

  Variant variant() const { return variant_; }
  const LevelLadder& ladder() const { return ladder_; }
  const BlockTree& plain_tree() const { return plain_; }
  const ShiftedBlockTree& shifted_tree() const { return shifted_; }
  int depth() const { return ladder_.depth(); }
  std::int64_t path_length() const { return ladder_.path_length(); }
  std::int64_t budget(int level) const { return ladder_.budget(level); }

  std::int64_t block_count(int level) const;
  std::int64_t block_index(int level, std::int64_t pos) const;
  /// Real positions (clamped to [1, D']) covered by a block.
  std::pair<std::int64_t, std::int64_t> block_range(int level, std::int64_t block) const;

  /// Delay that block `block` of `level` with start value x adds to the crossing
  /// of position `pos`. Blocks entirely before pos add their full budget,
  /// blocks after it add nothing.
  std::int64_t contribution(int level, std::int64_t block, std::int64_t x, std::int64_t pos) const;

  /// Per-packet waiting, independent of the drawn values.
  std::int64_t total_waiting() const;
  /// Last slot any packet can occupy: D' + total waiting.
  std::int64_t horizon() const { return path_length() + total_waiting(); }

 private:
  LevelLadder ladder_;
  Variant variant_;
  BlockTree plain_;
  ShiftedBlockTree shifted_;
};

class AssignmentIncomplete : public std::logic_error {
 public:
  AssignmentIncomplete() : std::logic_error("assignment incomplete") {}
};

/// Waiting values, one per (packet, level, block); 0 marks an unfixed value.
struct DelayAssignment {
  std::vector<std::vector<std::vector<std::int64_t>>> values;

  static DelayAssignment unfixed(std::size_t packets, const DelayModel& model);

  std::int64_t& at(std::size_t packet, int level, std::int64_t block) { return values[packet][level][block]; }
  std::int64_t at(std::size_t packet, int level, std::int64_t block) const {
    return values[packet][level][block];
  }
  bool level_fixed(int level) const;
  bool level_unfixed(int level) const;
  /// Number of leading levels that are fully fixed.
  int frontier() const;
  bool complete() const { return frontier() == static_cast<int>(values.front().size()); }
  /// Values in range and every level either fully fixed or fully unfixed.
  bool well_formed(const DelayModel& model) const;

  void fix_level_uniform(int level, const DelayModel& model, rng::Engine& g);
  void fix_level_constant(int level, std::int64_t x);
  void clear_level(int level);
};

DelayAssignment random_full_assignment(std::size_t packets, const DelayModel& model, rng::Engine& g);

std::int64_t crossing_time_plain(const DelayModel& model, const DelayAssignment& a, std::size_t packet,
                                 std::int64_t pos);
std::int64_t crossing_time_buffered(const DelayModel& model, const DelayAssignment& a, std::size_t packet,
                                    std::int64_t pos);
/// Dispatches on the model's variant.
std::int64_t crossing_time(const DelayModel& model, const DelayAssignment& a, std::size_t packet,
                           std::int64_t pos);

/// Per-node waits (nodes 0..D') realising a complete assignment.
std::vector<std::int64_t> node_waits(const DelayModel& model, const DelayAssignment& a, std::size_t packet);

/// Exact law of the crossing slot of one (packet, position), dense over a
/// contiguous window starting at `first_slot`.
struct CrossingDistribution {
  std::int64_t first_slot = 0;
  std::vector<double> mass;

  double at(std::int64_t slot) const {
    const auto k = slot - first_slot;
    return k >= 0 && k < static_cast<std::int64_t>(mass.size()) ? mass[k] : 0.0;
  }
  std::int64_t last_slot() const { return first_slot + static_cast<std::int64_t>(mass.size()) - 1; }
  double total() const;
};

/// Convolves the start-value laws of every unfixed block containing pos.
/// Unfixed blocks may be mixed with fixed ones inside one level.
CrossingDistribution crossing_distribution(const DelayModel& model, const DelayAssignment& a,
                                           std::size_t packet, std::int64_t pos);

/// Expected load Y(e, t) per edge index, stored sparsely and sorted by slot.
struct LoadEstimate {
  std::int64_t horizon = 0;
  std::vector<std::vector<std::pair<std::int64_t, double>>> cells;

  double at(std::int32_t edge, std::int64_t slot) const;
  double max() const;
  friend bool operator==(const LoadEstimate&, const LoadEstimate&) = default;
};

/// OpenMP kernel, parallel over edges.
LoadEstimate expected_load(const DelayModel& model, const IndexedPaths& paths, const DelayAssignment& a);
/// Serial reference over packets; kept for testing the parallel kernel.
LoadEstimate expected_load_serial(const DelayModel& model, const IndexedPaths& paths, const DelayAssignment& a);

/// exp(-eps^2/3 * mu/delta), the tail bound for sums of independent [0, delta]
/// variables exceeding (1+eps) mu.
double chernoff_tail(double mu, double delta, double eps);

/// Symmetric local lemma condition 4 p d <= 1.
bool lll_feasible(double p, double d);
/// Same test in log space, for parameters whose p underflows or d overflows.
bool lll_feasible_log(double ln_p, double ln_d);

}  // namespace cdr
