#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdr/delay_model.hpp"
#include "cdr/instance.hpp"
#include "cdr/schedule.hpp"

namespace cdr {

enum class Strategy { kResample, kGreedy };
enum class FinalizeMode { kOnes, kGreedy };

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& s);
const char* to_string(FinalizeMode m);
FinalizeMode parse_finalize(const std::string& s);

struct FixerConfig {
  Variant variant = Variant::kPlain;
  std::int64_t delta = 4;
  /// Per-level slack is relax * D_l^(-slack_exponent). Zero selects the
  /// variant default: 1/32 plain, 1/64 buffered.
  double slack_exponent = 0.0;
  std::vector<double> relax_ladder{1.0, 2.0, 4.0, 8.0};
  Strategy strategy = Strategy::kResample;
  /// After the primary strategy fails at some relax factor, try greedy at the
  /// same factor before relaxing further.
  bool greedy_fallback = true;
  std::int64_t resample_budget = 10000;
  std::int64_t restart_budget = 4;
  std::uint64_t seed = 1;
  FinalizeMode finalize = FinalizeMode::kOnes;

  double exponent() const;
  double slack(std::int64_t block_length, double relax) const;
  /// Throws std::invalid_argument on budgets < 1 or relax factors < 1.
  void validate() const;
};

/// Everything the fixer works on: the padded instance, its ladder and model,
/// and the partially fixed assignment.
struct FixState {
  PaddedInstance padded;
  IndexedPaths paths;
  DelayModel model;
  DelayAssignment assignment;
  double gamma = 1.0;         // current target, max(.,1)-clamped
  double initial_max = 0.0;   // max Y before anything is fixed

  static FixState prepare(const Instance& instance, const FixerConfig& config);
  /// Levels fix_level is applied to: 0..L-1 plain, 0..L-2 buffered.
  int levels_to_fix() const;
};

struct LevelAttempt {
  double relax = 1.0;
  Strategy strategy = Strategy::kResample;
  bool success = false;
  double achieved = 0.0;
  std::int64_t resamples = 0;
  std::int64_t restarts = 0;
};

struct LevelOutcome {
  int level = 0;
  bool success = false;
  double gamma_before = 0.0;
  double target = 0.0;
  double gamma_after = 0.0;
  double achieved = 0.0;  // max Y after fixing this level
  std::int64_t resamples = 0;
  std::int64_t restarts = 0;
  double relax = 1.0;
  Strategy strategy = Strategy::kResample;
  std::vector<std::vector<std::int64_t>> values;  // [packet][block]
  std::vector<LevelAttempt> attempts;
};

/// Raised when no level assignment meets the target within budget. Carries the
/// best assignment found.
class FixLevelFailure : public std::runtime_error {
 public:
  explicit FixLevelFailure(LevelOutcome best);
  const LevelOutcome& best() const { return best_; }

 private:
  LevelOutcome best_;
};

/// Fixes level `level` so that every Y(e,t) <= max(gamma, 1) + slack, using a
/// single strategy at a single relax factor. On success the state's
/// assignment holds the level values and state.gamma is advanced.
LevelOutcome fix_level(FixState& state, int level, double gamma, const FixerConfig& config, double relax,
                       Strategy strategy);

/// Applies fix_level with the relax ladder and greedy fallback. Throws
/// FixLevelFailure when every attempt fails.
LevelOutcome fix_level_with_retries(FixState& state, int level, const FixerConfig& config);

struct FixReport {
  Variant variant = Variant::kPlain;
  std::int64_t delta = 0;
  std::int64_t padded_length = 0;
  int depth = 0;
  double initial_max = 0.0;
  std::vector<LevelOutcome> levels;
  int first_unfixed = 0;              // levels >= this were set by finalize
  std::int64_t residual_outcomes = 1; // product of unfixed budgets
  double gamma_final = 1.0;
  std::int64_t load = 0;              // realised max load before stretching
  double counting_bound = 0.0;        // gamma_final * residual_outcomes
  bool counting_bound_holds = false;
  std::int64_t makespan = 0;          // before stretching
  std::int64_t stretched_makespan = 0;
  double max_relax = 1.0;
};

nlohmann::ordered_json to_json(const FixReport& report);

struct Finalized {
  Schedule schedule;  // on the padded instance, load report.load
  FixReport report;
};

/// Sets all levels beyond the frontier (ones or greedily), then derives the
/// per-node waits and the realised load.
Finalized finalize(FixState& state, const FixerConfig& config);

/// Expands every slot into c slots; packets sharing (edge, slot) are ordered
/// by packet id inside the window [c(t-1)+1, ct].
Schedule stretch(const Instance& instance, const Schedule& schedule, std::int64_t c);

struct PipelineResult {
  PaddedInstance padded;
  LevelLadder ladder;
  Schedule padded_schedule;  // before stretching, load report.load
  Schedule unstretched;      // original instance, load report.load
  Schedule schedule;         // original instance, load 1
  FixReport report;
};

/// pad -> ladder -> dissect -> fix levels -> finalize -> stretch -> unpad.
PipelineResult run_pipeline(const Instance& instance, const FixerConfig& config);

}  // namespace cdr
