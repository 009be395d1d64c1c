#include "cdr/lowerbound.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cdr/rng.hpp"

namespace cdr {

namespace {

std::string u(std::int64_t j) { return "u" + std::to_string(j); }
std::string v(std::int64_t j) { return "v" + std::to_string(j); }
std::string arc(const std::string& a, const std::string& b) { return a + ">" + b; }

}  // namespace

std::string critical_edge_id(std::int64_t j) { return "e" + std::to_string(j); }

LowerBoundInstance lower_bound_instance(std::vector<std::vector<std::int64_t>> permutations) {
  LowerBoundInstance lb;
  lb.n = static_cast<std::int64_t>(permutations.size());
  const auto n = lb.n;
  if (n < 1) throw std::invalid_argument("lower-bound instance needs n >= 1");
  for (const auto& p : permutations) {
    std::vector<std::int64_t> sorted(p);
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::int64_t> ident(n);
    std::iota(ident.begin(), ident.end(), 1);
    if (sorted != ident) throw std::invalid_argument("not a permutation of 1..n");
  }
  lb.permutations = std::move(permutations);

  auto& g = lb.instance;
  g.nodes = {"s", "s'"};
  for (std::int64_t j = 1; j <= n + 1; ++j) g.nodes.push_back(u(j));
  for (std::int64_t j = 1; j <= n; ++j) g.nodes.push_back(v(j));
  g.nodes.push_back("t");

  g.edges.push_back({arc("s", "s'"), "s", "s'"});
  for (std::int64_t j = 1; j <= n; ++j) g.edges.push_back({arc("s'", u(j)), "s'", u(j)});
  for (std::int64_t j = 1; j <= n; ++j) g.edges.push_back({critical_edge_id(j), u(j), v(j)});
  for (std::int64_t i = 1; i <= n; ++i) {
    for (std::int64_t j = 1; j <= n; ++j) {
      if (i != j) g.edges.push_back({arc(v(i), u(j)), v(i), u(j)});
    }
  }
  for (std::int64_t j = 1; j <= n; ++j) g.edges.push_back({arc(v(j), u(n + 1)), v(j), u(n + 1)});
  g.edges.push_back({arc(u(n + 1), "t"), u(n + 1), "t"});

  for (const auto& p : lb.permutations) {
    Path path{arc("s", "s'"), arc("s'", u(p[0]))};
    for (std::int64_t k = 0; k < n; ++k) {
      path.push_back(critical_edge_id(p[k]));
      path.push_back(k + 1 < n ? arc(v(p[k]), u(p[k + 1])) : arc(v(p[k]), u(n + 1)));
    }
    path.push_back(arc(u(n + 1), "t"));
    g.paths.push_back(std::move(path));
  }
  return lb;
}

LowerBoundInstance generate(std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("lower-bound instance needs n >= 1");
  auto g = rng::stream(seed, {rng::kLowerBound, static_cast<std::uint64_t>(n)});
  std::vector<std::vector<std::int64_t>> perms;
  for (std::int64_t i = 0; i < n; ++i) {
    std::vector<std::int64_t> p(n);
    std::iota(p.begin(), p.end(), 1);
    for (std::int64_t k = n - 1; k > 0; --k) std::swap(p[k], p[rng::uniform(g, 0, k)]);
    perms.push_back(std::move(p));
  }
  return lower_bound_instance(std::move(perms));
}

nlohmann::ordered_json to_json(const LowerBoundInstance& lb) {
  auto j = to_json(lb.instance);
  j["permutations"] = lb.permutations;
  return j;
}

LowerBoundInstance lower_bound_from_json(const nlohmann::json& j) {
  auto lb = lower_bound_instance(j.at("permutations").get<std::vector<std::vector<std::int64_t>>>());
  if (!(instance_from_json(j) == lb.instance)) {
    throw std::invalid_argument("instance does not match its permutations");
  }
  return lb;
}

RoutingMatrix RoutingMatrix::zeros(std::int64_t n) {
  return RoutingMatrix{std::vector<std::vector<std::int64_t>>(n, std::vector<std::int64_t>(n + 2, 0))};
}

std::int64_t RoutingMatrix::makespan(std::size_t packet) const {
  const auto& row = w[packet];
  return 2 * n() + 3 + std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

Schedule matrix_to_schedule(const LowerBoundInstance& lb, const RoutingMatrix& m) {
  const auto n = lb.n;
  if (m.n() != n) throw ScheduleShapeError("routing matrix must have n rows");
  Schedule s;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& row = m.w[i];
    if (static_cast<std::int64_t>(row.size()) != n + 2) throw ScheduleShapeError("routing matrix rows need n + 2 entries");
    std::vector<std::int64_t> waits(2 * n + 4, 0);
    waits[0] = row[0];
    for (std::int64_t k = 1; k <= n; ++k) waits[2 * k] = row[lb.permutations[i][k - 1]];
    waits[2 * n + 2] = row[n + 1];
    s.waits.push_back(std::move(waits));
  }
  return s;
}

bool is_candidate(const RoutingMatrix& m, std::int64_t horizon) {
  std::set<std::int64_t> entry, exit;
  for (std::size_t i = 0; i < m.w.size(); ++i) {
    const auto release = m.makespan(i);
    if (release > horizon) return false;
    if (!entry.insert(m.w[i][0] + 1).second) return false;
    if (!exit.insert(release).second) return false;
  }
  return true;
}

double binary_entropy(double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("entropy argument outside [0,1]");
  if (p == 0 || p == 1) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

double phi(double eps) {
  if (eps < 0) throw std::invalid_argument("phi needs eps >= 0");
  return binary_entropy(eps / (1 + eps)) * (1 + eps);
}

Margin margin(double eps) {
  Margin m;
  m.phi = phi(eps);
  m.collision_exponent = std::log2(16.0 / 15.0) / 128.0;
  m.separation = m.phi < m.collision_exponent;
  return m;
}

double counting_bound(std::int64_t n, double eps) {
  if (n < 1) throw std::invalid_argument("counting_bound needs n >= 1");
  const auto nn = static_cast<double>(n);
  return phi(eps) * nn * nn + 2 * nn * std::log2(2 * nn);
}

std::vector<std::int64_t> critical_crossings(const LowerBoundInstance& lb, const SimulationTrace& trace) {
  std::set<std::int32_t> critical;
  for (std::int64_t j = 1; j <= lb.n; ++j) {
    auto it = std::lower_bound(trace.edge_ids.begin(), trace.edge_ids.end(), critical_edge_id(j));
    if (it != trace.edge_ids.end() && *it == critical_edge_id(j)) {
      critical.insert(static_cast<std::int32_t>(it - trace.edge_ids.begin()));
    }
  }
  std::vector<std::int64_t> per_slot(trace.makespan + 1, 0);
  for (const auto& [cell, count] : trace.loads) {
    if (critical.count(cell.first)) per_slot[cell.second] += count;
  }
  return per_slot;
}

}  // namespace cdr
