#include "cdr/fixer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

namespace cdr {

const char* to_string(Strategy s) { return s == Strategy::kResample ? "resample" : "greedy"; }

Strategy parse_strategy(const std::string& s) {
  if (s == "resample") return Strategy::kResample;
  if (s == "greedy") return Strategy::kGreedy;
  throw std::invalid_argument("unknown strategy " + s);
}

const char* to_string(FinalizeMode m) { return m == FinalizeMode::kOnes ? "ones" : "greedy"; }

FinalizeMode parse_finalize(const std::string& s) {
  if (s == "ones") return FinalizeMode::kOnes;
  if (s == "greedy") return FinalizeMode::kGreedy;
  throw std::invalid_argument("unknown finalize mode " + s);
}

double FixerConfig::exponent() const {
  if (slack_exponent > 0) return slack_exponent;
  return variant == Variant::kPlain ? 1.0 / 32.0 : 1.0 / 64.0;
}

double FixerConfig::slack(std::int64_t block_length, double relax) const {
  return relax * std::pow(static_cast<double>(block_length), -exponent());
}

void FixerConfig::validate() const {
  if (resample_budget < 1 || restart_budget < 1) throw std::invalid_argument("fixer budgets must be at least 1");
  if (relax_ladder.empty()) throw std::invalid_argument("relax ladder is empty");
  for (auto r : relax_ladder) {
    if (r < 1.0) throw std::invalid_argument("relax factors must be at least 1");
  }
  if (delta < 2) throw std::invalid_argument("delta must be at least 2");
}

FixState FixState::prepare(const Instance& instance, const FixerConfig& config) {
  auto padded = pad(instance);
  auto ladder = padded.length >= config.delta ? build_ladder(padded.length, config.delta)
                                              : LevelLadder::root_only(padded.length);
  auto paths = index_paths(padded.padded);
  DelayModel model(std::move(ladder), config.variant);
  auto assignment = DelayAssignment::unfixed(paths.paths.size(), model);
  FixState state{std::move(padded), std::move(paths), std::move(model), std::move(assignment), 1.0, 0.0};
  state.initial_max = expected_load(state.model, state.paths, state.assignment).max();
  state.gamma = std::max(1.0, state.initial_max);
  return state;
}

int FixState::levels_to_fix() const {
  const int depth = model.depth();
  return std::max(0, model.variant() == Variant::kPlain ? depth : depth - 1);
}

FixLevelFailure::FixLevelFailure(LevelOutcome best)
    : std::runtime_error("could not fix level " + std::to_string(best.level) + ": best max load " +
                         std::to_string(best.achieved) + " exceeds target " + std::to_string(best.target)),
      best_(std::move(best)) {}

namespace {

constexpr double kTolerance = 1e-9;

using Cell = std::pair<std::int32_t, std::int64_t>;

/// Expected loads of edges used by two or more packets, kept dense per edge.
/// Edges with a single user never exceed 1 and are not tracked.
class LoadTable {
 public:
  explicit LoadTable(const FixState& s) : state_(s), users_(s.paths.users()) {
    track_.assign(users_.size(), -1);
    for (std::size_t e = 0; e < users_.size(); ++e) {
      if (users_[e].size() >= 2) {
        track_[e] = static_cast<std::int32_t>(rows_.size());
        rows_.emplace_back(s.model.horizon() + 2, 0.0);
      }
    }
  }

  void set_threshold(double t) { threshold_ = t; }
  bool tracked(std::int32_t e) const { return track_[e] >= 0; }
  const auto& users(std::int32_t e) const { return users_[e]; }
  const std::set<Cell>& bad() const { return bad_; }
  double value(std::int32_t e, std::int64_t slot) const {
    return tracked(e) ? rows_[track_[e]][slot] : 0.0;
  }

  void rebuild() {
    for (auto& row : rows_) std::fill(row.begin(), row.end(), 0.0);
    bad_.clear();
    for (std::size_t e = 0; e < users_.size(); ++e) {
      if (!tracked(static_cast<std::int32_t>(e))) continue;
      for (const auto& [packet, pos] : users_[e]) {
        add(static_cast<std::int32_t>(e), dist(packet, pos), 1.0);
      }
    }
  }

  CrossingDistribution dist(std::int32_t packet, std::int64_t pos) const {
    return crossing_distribution(state_.model, state_.assignment, packet, pos);
  }

  void add(std::int32_t e, const CrossingDistribution& d, double sign) {
    auto& row = rows_[track_[e]];
    for (std::size_t k = 0; k < d.mass.size(); ++k) {
      if (d.mass[k] == 0.0) continue;
      const auto slot = d.first_slot + static_cast<std::int64_t>(k);
      row[slot] += sign * d.mass[k];
      if (row[slot] > threshold_ + kTolerance) {
        bad_.insert({e, slot});
      } else {
        bad_.erase({e, slot});
      }
    }
  }

  /// Subtracts or adds the contributions of every tracked position whose
  /// crossing depends on block (packet, level, block).
  void apply_block(std::int32_t packet, int level, std::int64_t block, double sign) {
    const auto [lo, hi] = state_.model.block_range(level, block);
    const auto& path = state_.paths.paths[packet];
    for (auto pos = lo; pos <= hi; ++pos) {
      const auto e = path[pos - 1];
      if (tracked(e)) add(e, dist(packet, pos), sign);
    }
  }

  double max_value() const {
    double m = 0.0;
    for (const auto& row : rows_) {
      for (auto v : row) m = std::max(m, v);
    }
    for (std::size_t e = 0; e < users_.size(); ++e) {
      if (users_[e].size() != 1) continue;
      const auto d = dist(users_[e][0].first, users_[e][0].second);
      for (auto v : d.mass) m = std::max(m, v);
    }
    return m;
  }

 private:
  const FixState& state_;
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> users_;
  std::vector<std::int32_t> track_;
  std::vector<std::vector<double>> rows_;
  std::set<Cell> bad_;
  double threshold_ = std::numeric_limits<double>::infinity();
};

std::vector<std::vector<std::int64_t>> level_values(const DelayAssignment& a, int level) {
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& p : a.values) out.push_back(p[level]);
  return out;
}

void restore_level(DelayAssignment& a, int level, const std::vector<std::vector<std::int64_t>>& values) {
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i][level] = values[i];
}

std::uint64_t relax_tag(double relax) { return static_cast<std::uint64_t>(std::llround(relax * 1024.0)); }

/// Moser-Tardos style: draw the level uniformly, then repeatedly resample the
/// level variables of the packets that can still hit the first bad cell.
void resample_level(FixState& state, LoadTable& table, int level, double relax, const FixerConfig& config,
                    LevelOutcome& out) {
  const auto w = state.model.budget(level);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::int64_t>> best_values;
  for (std::int64_t restart = 0; restart < config.restart_budget; ++restart) {
    auto g = rng::stream(config.seed, {rng::kFixer, static_cast<std::uint64_t>(level),
                                       static_cast<std::uint64_t>(restart), relax_tag(relax)});
    state.assignment.fix_level_uniform(level, state.model, g);
    table.rebuild();
    std::int64_t resamples = 0;
    while (!table.bad().empty() && resamples < config.resample_budget) {
      const auto [edge, slot] = *table.bad().begin();
      std::set<std::pair<std::int32_t, std::int64_t>> deps;
      for (const auto& [packet, pos] : table.users(edge)) {
        if (table.dist(packet, pos).at(slot) > 0.0) deps.insert({packet, state.model.block_index(level, pos)});
      }
      for (const auto& [packet, block] : deps) {
        table.apply_block(packet, level, block, -1.0);
        state.assignment.at(packet, level, block) = rng::uniform(g, 1, w);
        table.apply_block(packet, level, block, 1.0);
      }
      ++resamples;
    }
    out.resamples += resamples;
    out.restarts = restart + 1;
    const double achieved = table.max_value();
    spdlog::debug("level {} relax {} restart {}: {} resamples, max Y {}", level, relax, restart, resamples, achieved);
    if (achieved < best) {
      best = achieved;
      best_values = level_values(state.assignment, level);
    }
    if (table.bad().empty()) break;
  }
  restore_level(state.assignment, level, best_values);
  out.achieved = best;
}

/// Sequential min-max: fix blocks in (packet, block) order, each to the value
/// minimising the largest expected load among the cells it influences.
void greedy_level(FixState& state, LoadTable& table, int level) {
  const auto w = state.model.budget(level);
  const auto packets = static_cast<std::int32_t>(state.paths.paths.size());
  state.assignment.clear_level(level);
  table.rebuild();
  std::map<Cell, double> delta;
  for (std::int32_t i = 0; i < packets; ++i) {
    const auto& path = state.paths.paths[i];
    for (std::int64_t b = 0; b < state.model.block_count(level); ++b) {
      const auto [lo, hi] = state.model.block_range(level, b);
      std::vector<std::int64_t> positions;
      for (auto pos = lo; pos <= hi; ++pos) {
        if (table.tracked(path[pos - 1])) positions.push_back(pos);
      }
      std::int64_t best_x = 1;
      if (!positions.empty()) {
        std::vector<CrossingDistribution> old;
        for (auto pos : positions) old.push_back(table.dist(i, pos));
        double best_val = std::numeric_limits<double>::infinity();
        for (std::int64_t x = 1; x <= w; ++x) {
          state.assignment.at(i, level, b) = x;
          delta.clear();
          for (std::size_t k = 0; k < positions.size(); ++k) {
            const auto e = path[positions[k] - 1];
            const auto& d0 = old[k];
            for (std::size_t s = 0; s < d0.mass.size(); ++s) {
              delta[{e, d0.first_slot + static_cast<std::int64_t>(s)}] -= d0.mass[s];
            }
            const auto d1 = table.dist(i, positions[k]);
            for (std::size_t s = 0; s < d1.mass.size(); ++s) {
              delta[{e, d1.first_slot + static_cast<std::int64_t>(s)}] += d1.mass[s];
            }
          }
          double val = 0.0;
          for (const auto& [cell, dv] : delta) val = std::max(val, table.value(cell.first, cell.second) + dv);
          if (val < best_val - 1e-15) {
            best_val = val;
            best_x = x;
          }
        }
        state.assignment.at(i, level, b) = 0;
      }
      table.apply_block(i, level, b, -1.0);
      state.assignment.at(i, level, b) = best_x;
      table.apply_block(i, level, b, 1.0);
    }
  }
}

}  // namespace

LevelOutcome fix_level(FixState& state, int level, double gamma, const FixerConfig& config, double relax,
                       Strategy strategy) {
  if (state.assignment.frontier() < level) throw std::logic_error("fix_level: earlier levels are not fixed");
  LevelOutcome out;
  out.level = level;
  out.relax = relax;
  out.strategy = strategy;
  out.gamma_before = gamma;
  out.target = std::max(gamma, 1.0) + config.slack(state.model.ladder().length(level), relax);

  LoadTable table(state);
  table.set_threshold(out.target);
  if (strategy == Strategy::kResample) {
    resample_level(state, table, level, relax, config, out);
  } else {
    greedy_level(state, table, level);
    out.achieved = table.max_value();
  }
  out.success = out.achieved <= out.target + kTolerance;
  out.values = level_values(state.assignment, level);
  if (out.success) {
    out.gamma_after = out.target;
    state.gamma = out.target;
  } else {
    out.gamma_after = gamma;
  }
  return out;
}

LevelOutcome fix_level_with_retries(FixState& state, int level, const FixerConfig& config) {
  std::vector<LevelAttempt> attempts;
  std::optional<LevelOutcome> best;
  const double gamma = state.gamma;
  for (auto relax : config.relax_ladder) {
    std::vector<Strategy> order{config.strategy};
    if (config.greedy_fallback && config.strategy == Strategy::kResample) order.push_back(Strategy::kGreedy);
    for (auto strategy : order) {
      auto out = fix_level(state, level, gamma, config, relax, strategy);
      attempts.push_back({relax, strategy, out.success, out.achieved, out.resamples, out.restarts});
      spdlog::info("level {} {} relax {}: max Y {} target {} {}", level, to_string(strategy), relax, out.achieved,
                   out.target, out.success ? "ok" : "failed");
      if (out.success) {
        out.attempts = std::move(attempts);
        return out;
      }
      if (!best || out.achieved < best->achieved) best = out;
    }
  }
  restore_level(state.assignment, level, best->values);
  best->attempts = std::move(attempts);
  throw FixLevelFailure(*best);
}

Finalized finalize(FixState& state, const FixerConfig& config) {
  Finalized fin;
  auto& rep = fin.report;
  const auto& model = state.model;
  rep.variant = model.variant();
  rep.delta = model.ladder().delta;
  rep.padded_length = model.path_length();
  rep.depth = model.depth();
  rep.initial_max = state.initial_max;
  rep.first_unfixed = state.assignment.frontier();
  rep.gamma_final = state.gamma;
  for (int l = rep.first_unfixed; l <= model.depth(); ++l) rep.residual_outcomes *= model.budget(l);

  if (config.finalize == FinalizeMode::kGreedy && rep.first_unfixed <= model.depth()) {
    LoadTable table(state);
    for (int l = rep.first_unfixed; l <= model.depth(); ++l) greedy_level(state, table, l);
  } else {
    for (int l = rep.first_unfixed; l <= model.depth(); ++l) state.assignment.fix_level_constant(l, 1);
  }

  std::map<Cell, std::int64_t> load;
  for (std::size_t i = 0; i < state.paths.paths.size(); ++i) {
    fin.schedule.waits.push_back(node_waits(model, state.assignment, i));
    const auto& path = state.paths.paths[i];
    for (std::size_t j = 0; j < path.size(); ++j) {
      const auto t = crossing_time(model, state.assignment, i, static_cast<std::int64_t>(j + 1));
      rep.load = std::max(rep.load, ++load[{path[j], t}]);
    }
  }
  rep.counting_bound = rep.gamma_final * static_cast<double>(rep.residual_outcomes);
  rep.counting_bound_holds = static_cast<double>(rep.load) <= rep.counting_bound + kTolerance;
  rep.makespan = fin.schedule.makespan();
  return fin;
}

Schedule stretch(const Instance& instance, const Schedule& schedule, std::int64_t c) {
  check_shape(instance, schedule);
  if (c < 1) throw std::invalid_argument("stretch factor must be positive");
  const auto ix = index_paths(instance);
  std::vector<std::vector<std::int64_t>> slots(schedule.packet_count());
  std::map<Cell, std::int64_t> next_rank;
  for (std::size_t i = 0; i < schedule.packet_count(); ++i) slots[i] = schedule.crossing_slots(i);

  Schedule out;
  std::vector<std::vector<std::int64_t>> stretched(schedule.packet_count());
  for (std::size_t i = 0; i < schedule.packet_count(); ++i) {
    for (std::size_t j = 0; j < slots[i].size(); ++j) {
      const auto t = slots[i][j];
      const auto rank = next_rank[{ix.paths[i][j], t}]++;
      if (rank >= c) throw std::invalid_argument("schedule load exceeds stretch factor");
      stretched[i].push_back(c * (t - 1) + 1 + rank);
    }
  }
  for (std::size_t i = 0; i < schedule.packet_count(); ++i) {
    const auto& s = stretched[i];
    std::vector<std::int64_t> w;
    w.push_back(s[0] - 1);
    for (std::size_t j = 1; j < s.size(); ++j) w.push_back(s[j] - s[j - 1] - 1);
    w.push_back(c * schedule.arrival(i) - s.back());
    out.waits.push_back(std::move(w));
  }
  return out;
}

nlohmann::ordered_json to_json(const FixReport& r) {
  nlohmann::ordered_json j;
  j["variant"] = to_string(r.variant);
  j["delta"] = r.delta;
  j["padded_length"] = r.padded_length;
  j["depth"] = r.depth;
  j["initial_max"] = r.initial_max;
  auto levels = nlohmann::ordered_json::array();
  for (const auto& l : r.levels) {
    nlohmann::ordered_json lj;
    lj["level"] = l.level;
    lj["gamma_before"] = l.gamma_before;
    lj["target"] = l.target;
    lj["achieved"] = l.achieved;
    lj["gamma_after"] = l.gamma_after;
    lj["strategy"] = to_string(l.strategy);
    lj["relax"] = l.relax;
    lj["resamples"] = l.resamples;
    lj["restarts"] = l.restarts;
    auto attempts = nlohmann::ordered_json::array();
    for (const auto& a : l.attempts) {
      nlohmann::ordered_json aj;
      aj["relax"] = a.relax;
      aj["strategy"] = to_string(a.strategy);
      aj["success"] = a.success;
      aj["achieved"] = a.achieved;
      aj["resamples"] = a.resamples;
      aj["restarts"] = a.restarts;
      attempts.push_back(std::move(aj));
    }
    lj["attempts"] = std::move(attempts);
    levels.push_back(std::move(lj));
  }
  j["levels"] = std::move(levels);
  j["first_unfixed"] = r.first_unfixed;
  j["residual_outcomes"] = r.residual_outcomes;
  j["gamma_final"] = r.gamma_final;
  j["load"] = r.load;
  j["counting_bound"] = r.counting_bound;
  j["counting_bound_holds"] = r.counting_bound_holds;
  j["makespan"] = r.makespan;
  j["stretched_makespan"] = r.stretched_makespan;
  j["max_relax"] = r.max_relax;
  return j;
}

PipelineResult run_pipeline(const Instance& instance, const FixerConfig& config) {
  config.validate();
  auto state = FixState::prepare(instance, config);
  std::vector<LevelOutcome> levels;
  double max_relax = 1.0;
  for (int l = 0; l < state.levels_to_fix(); ++l) {
    levels.push_back(fix_level_with_retries(state, l, config));
    max_relax = std::max(max_relax, levels.back().relax);
  }
  auto fin = finalize(state, config);
  fin.report.levels = std::move(levels);
  fin.report.max_relax = max_relax;

  PipelineResult result{state.padded, state.model.ladder(), fin.schedule, {}, {}, fin.report};
  const auto stretched = stretch(state.padded.padded, fin.schedule, fin.report.load);
  result.unstretched = unpad(state.padded, fin.schedule);
  result.schedule = unpad(state.padded, stretched);
  result.report.stretched_makespan = result.schedule.makespan();
  return result;
}

}  // namespace cdr
