#include "cdr/delay_model.hpp"

#include <algorithm>
#include <cmath>

namespace cdr {

const char* to_string(Variant v) { return v == Variant::kPlain ? "plain" : "buffered"; }

Variant parse_variant(const std::string& s) {
  if (s == "plain") return Variant::kPlain;
  if (s == "buffered") return Variant::kBuffered;
  throw std::invalid_argument("unknown variant " + s);
}

DelayModel::DelayModel(LevelLadder ladder, Variant variant)
    : ladder_(std::move(ladder)),
      variant_(variant),
      plain_(dissect_plain(ladder_.path_length(), ladder_)),
      shifted_(variant == Variant::kBuffered ? dissect_shifted(ladder_.path_length(), ladder_)
                                             : ShiftedBlockTree{}) {}

std::int64_t DelayModel::block_count(int level) const {
  if (variant_ == Variant::kPlain) return static_cast<std::int64_t>(plain_.levels[level].size());
  return static_cast<std::int64_t>(shifted_.levels[level].size());
}

std::int64_t DelayModel::block_index(int level, std::int64_t pos) const {
  return variant_ == Variant::kPlain ? plain_.block_index(level, pos) : shifted_.block_index(level, pos);
}

std::pair<std::int64_t, std::int64_t> DelayModel::block_range(int level, std::int64_t block) const {
  const Block& b = variant_ == Variant::kPlain ? plain_.levels[level][block] : shifted_.levels[level][block].span;
  return {std::max<std::int64_t>(1, b.first), std::min(path_length(), b.last)};
}

std::int64_t DelayModel::contribution(int level, std::int64_t block, std::int64_t x, std::int64_t pos) const {
  const std::int64_t w = budget(level);
  if (variant_ == Variant::kPlain) {
    const Block& b = plain_.levels[level][block];
    if (pos > b.last) return w;
    return b.contains(pos) ? x : 0;
  }
  if (level == 0) return x;
  const auto& assigned = shifted_.levels[level][block].assigned;
  const auto n = static_cast<std::int64_t>(assigned.size());
  const auto before = static_cast<std::int64_t>(std::upper_bound(assigned.begin(), assigned.end(), pos) - assigned.begin());
  return std::min(x, before) + std::max<std::int64_t>(0, before - (n - (w - x)));
}

std::int64_t DelayModel::total_waiting() const {
  return variant_ == Variant::kPlain ? ladder_.total_waiting() : buffered_total_waiting(ladder_);
}

DelayAssignment DelayAssignment::unfixed(std::size_t packets, const DelayModel& model) {
  DelayAssignment a;
  a.values.resize(packets);
  for (auto& per_packet : a.values) {
    per_packet.resize(model.depth() + 1);
    for (int l = 0; l <= model.depth(); ++l) per_packet[l].assign(model.block_count(l), 0);
  }
  return a;
}

bool DelayAssignment::level_fixed(int level) const {
  for (const auto& p : values) {
    for (auto v : p[level]) {
      if (v == 0) return false;
    }
  }
  return true;
}

bool DelayAssignment::level_unfixed(int level) const {
  for (const auto& p : values) {
    for (auto v : p[level]) {
      if (v != 0) return false;
    }
  }
  return true;
}

int DelayAssignment::frontier() const {
  const int levels = static_cast<int>(values.front().size());
  int l = 0;
  while (l < levels && level_fixed(l)) ++l;
  return l;
}

bool DelayAssignment::well_formed(const DelayModel& model) const {
  for (int l = 0; l <= model.depth(); ++l) {
    if (!level_fixed(l) && !level_unfixed(l)) return false;
    for (const auto& p : values) {
      for (auto v : p[l]) {
        if (v < 0 || v > model.budget(l)) return false;
      }
    }
  }
  return true;
}

void DelayAssignment::fix_level_uniform(int level, const DelayModel& model, rng::Engine& g) {
  for (auto& p : values) {
    for (auto& v : p[level]) v = rng::uniform(g, 1, model.budget(level));
  }
}

void DelayAssignment::fix_level_constant(int level, std::int64_t x) {
  for (auto& p : values) std::fill(p[level].begin(), p[level].end(), x);
}

void DelayAssignment::clear_level(int level) { fix_level_constant(level, 0); }

DelayAssignment random_full_assignment(std::size_t packets, const DelayModel& model, rng::Engine& g) {
  auto a = DelayAssignment::unfixed(packets, model);
  for (int l = 0; l <= model.depth(); ++l) a.fix_level_uniform(l, model, g);
  return a;
}

namespace {

std::int64_t fixed_value(const DelayAssignment& a, std::size_t packet, int level, std::int64_t block) {
  const auto v = a.at(packet, level, block);
  if (v == 0) throw AssignmentIncomplete();
  return v;
}

}  // namespace

std::int64_t crossing_time_plain(const DelayModel& model, const DelayAssignment& a, std::size_t packet,
                                 std::int64_t pos) {
  std::int64_t slot = pos;
  for (int l = 0; l <= model.depth(); ++l) {
    const auto b = model.plain_tree().block_index(l, pos);
    slot += b * model.budget(l) + fixed_value(a, packet, l, b);
  }
  return slot;
}

std::int64_t crossing_time_buffered(const DelayModel& model, const DelayAssignment& a, std::size_t packet,
                                    std::int64_t pos) {
  const auto& tree = model.shifted_tree();
  std::int64_t slot = pos + fixed_value(a, packet, 0, 0);
  for (int l = 1; l <= model.depth(); ++l) {
    const auto b = tree.block_index(l, pos);
    const auto w = model.budget(l);
    const auto x = fixed_value(a, packet, l, b);
    std::int64_t waited = 0;
    for (auto p : waiting_positions(tree.levels[l][b], w, x)) waited += p <= pos ? 1 : 0;
    slot += b * w + waited;
  }
  return slot;
}

std::int64_t crossing_time(const DelayModel& model, const DelayAssignment& a, std::size_t packet,
                           std::int64_t pos) {
  return model.variant() == Variant::kPlain ? crossing_time_plain(model, a, packet, pos)
                                            : crossing_time_buffered(model, a, packet, pos);
}

std::vector<std::int64_t> node_waits(const DelayModel& model, const DelayAssignment& a, std::size_t packet) {
  const auto n = model.path_length();
  std::vector<std::int64_t> waits(n + 1, 0);
  if (model.variant() == Variant::kPlain) {
    for (int l = 0; l <= model.depth(); ++l) {
      const auto& blocks = model.plain_tree().levels[l];
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto x = fixed_value(a, packet, l, static_cast<std::int64_t>(b));
        waits[blocks[b].start_node()] += x;
        waits[blocks[b].end_node()] += model.budget(l) - x;
      }
    }
    return waits;
  }
  const auto x0 = fixed_value(a, packet, 0, 0);
  waits[0] += x0;
  waits[n] += n - x0;
  const auto& tree = model.shifted_tree();
  for (int l = 1; l <= model.depth(); ++l) {
    for (std::size_t b = 0; b < tree.levels[l].size(); ++b) {
      const auto x = fixed_value(a, packet, l, static_cast<std::int64_t>(b));
      for (auto p : waiting_positions(tree.levels[l][b], model.budget(l), x)) {
        waits[std::clamp<std::int64_t>(p - 1, 0, n)] += 1;
      }
    }
  }
  return waits;
}

double CrossingDistribution::total() const {
  double s = 0;
  for (auto m : mass) s += m;
  return s;
}

CrossingDistribution crossing_distribution(const DelayModel& model, const DelayAssignment& a,
                                           std::size_t packet, std::int64_t pos) {
  CrossingDistribution dist{pos, {1.0}};
  std::vector<std::int64_t> shifts;
  for (int l = 0; l <= model.depth(); ++l) {
    const auto b = model.block_index(l, pos);
    const auto v = a.at(packet, l, b);
    // Earlier blocks on this level have already spent their whole budget.
    dist.first_slot += b * model.budget(l);
    if (v != 0) {
      dist.first_slot += model.contribution(l, b, v, pos);
      continue;
    }
    const auto w = model.budget(l);
    shifts.clear();
    for (std::int64_t x = 1; x <= w; ++x) shifts.push_back(model.contribution(l, b, x, pos));
    const auto lo = *std::min_element(shifts.begin(), shifts.end());
    const auto hi = *std::max_element(shifts.begin(), shifts.end());
    std::vector<double> law(hi - lo + 1, 0.0);
    const double p = 1.0 / static_cast<double>(w);
    for (auto s : shifts) law[s - lo] += p;

    std::vector<double> next(dist.mass.size() + law.size() - 1, 0.0);
    for (std::size_t i = 0; i < dist.mass.size(); ++i) {
      if (dist.mass[i] == 0.0) continue;
      for (std::size_t j = 0; j < law.size(); ++j) next[i + j] += dist.mass[i] * law[j];
    }
    dist.mass = std::move(next);
    dist.first_slot += lo;
  }
  return dist;
}

double LoadEstimate::at(std::int32_t edge, std::int64_t slot) const {
  const auto& row = cells[edge];
  auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(slot, -1.0));
  return it != row.end() && it->first == slot ? it->second : 0.0;
}

double LoadEstimate::max() const {
  double m = 0.0;
  for (const auto& row : cells) {
    for (const auto& [slot, y] : row) m = std::max(m, y);
  }
  return m;
}

double chernoff_tail(double mu, double delta, double eps) {
  if (!(mu > 0) || !(delta > 0) || !(eps > 0)) throw std::invalid_argument("chernoff_tail needs positive arguments");
  return std::exp(-eps * eps / 3.0 * mu / delta);
}

bool lll_feasible(double p, double d) {
  if (p < 0 || p > 1 || d < 0) throw std::invalid_argument("lll_feasible needs p in [0,1] and d >= 0");
  return 4.0 * p * d <= 1.0;
}

bool lll_feasible_log(double ln_p, double ln_d) { return std::log(4.0) + ln_p + ln_d <= 0.0; }

}  // namespace cdr
