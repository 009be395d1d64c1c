#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cdr/dissection.hpp"
#include "cdr/instance.hpp"

// Brute-force ground truth. Nothing here calls into the delay model, fixer or
// simulator: motion semantics are re-derived from first principles so that
// agreement with those modules is evidence rather than tautology.
namespace cdr::oracle {

class TooLarge : public std::runtime_error {
 public:
  TooLarge() : std::runtime_error("instance too large for oracle") {}
};

struct SearchOptions {
  /// Bound on prod(|P_i| + 2) * horizon.
  double state_cap = 1e8;
  /// Let every packet whose next edge is wanted by nobody else move at once,
  /// and let exactly one contender take each contested edge. Both rules are
  /// exchange-argument dominant with unlimited buffers.
  bool dominance = true;
};

/// C + D + C*D: one packet at a time always fits.
std::int64_t default_horizon(const Instance& instance);

/// Minimum makespan over all capacity-1 waiting policies, or nullopt when none
/// finishes by `horizon`. Throws TooLarge past the state cap.
std::optional<std::int64_t> optimal_makespan(const Instance& instance, std::optional<std::int64_t> horizon = {},
                                             const SearchOptions& options = {});

/// Pinned delay values in the delay-model layout [packet][level][block];
/// 0 = enumerate. Empty means enumerate everything.
using Pinned = std::vector<std::vector<std::vector<std::int64_t>>>;

struct ExpectationOptions {
  bool shifted = false;  // buffered waiting rule
  /// Bound on the per-packet number of enumerated delay vectors.
  std::int64_t cap = std::int64_t{1} << 20;
};

/// Exact E[X(e,t)] per edge index (lexicographic edge order) and slot, by
/// enumerating every delay vector of every packet on a padded instance.
std::vector<std::map<std::int64_t, double>> exhaustive_expectation(const Instance& padded,
                                                                   const LevelLadder& ladder,
                                                                   const ExpectationOptions& options,
                                                                   const Pinned& pinned = {});

/// Per-packet size of the enumerated delay space.
double delay_space_size(const LevelLadder& ladder, bool shifted);

}  // namespace cdr::oracle
