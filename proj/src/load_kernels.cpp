// Expected-load kernels. The OpenMP version partitions work by edge so each
// thread owns its output rows; the serial version walks packets in order and
// is the reference the parallel kernel is tested against. All probabilities
// are dyadic rationals, so both summation orders give bit-identical doubles.

#include <map>

#include <omp.h>

#include "cdr/delay_model.hpp"

namespace cdr {

LoadEstimate expected_load(const DelayModel& model, const IndexedPaths& paths, const DelayAssignment& a) {
  LoadEstimate out;
  out.horizon = model.horizon();
  out.cells.resize(paths.edge_count());
  const auto users = paths.users();
  const auto edges = static_cast<std::int64_t>(users.size());

#pragma omp parallel
  {
    std::vector<double> window;
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t e = 0; e < edges; ++e) {
      if (users[e].empty()) continue;
      std::vector<CrossingDistribution> dists;
      dists.reserve(users[e].size());
      std::int64_t lo = INT64_MAX, hi = INT64_MIN;
      for (const auto& [packet, pos] : users[e]) {
        dists.push_back(crossing_distribution(model, a, packet, pos));
        lo = std::min(lo, dists.back().first_slot);
        hi = std::max(hi, dists.back().last_slot());
      }
      window.assign(hi - lo + 1, 0.0);
      for (const auto& d : dists) {
        for (std::size_t k = 0; k < d.mass.size(); ++k) window[d.first_slot - lo + k] += d.mass[k];
      }
      auto& row = out.cells[e];
      for (std::size_t k = 0; k < window.size(); ++k) {
        if (window[k] != 0.0) row.emplace_back(lo + static_cast<std::int64_t>(k), window[k]);
      }
    }
  }
  return out;
}

LoadEstimate expected_load_serial(const DelayModel& model, const IndexedPaths& paths, const DelayAssignment& a) {
  std::vector<std::map<std::int64_t, double>> acc(paths.edge_count());
  for (std::size_t i = 0; i < paths.paths.size(); ++i) {
    for (std::size_t j = 0; j < paths.paths[i].size(); ++j) {
      const auto d = crossing_distribution(model, a, i, static_cast<std::int64_t>(j + 1));
      auto& row = acc[paths.paths[i][j]];
      for (std::size_t k = 0; k < d.mass.size(); ++k) {
        if (d.mass[k] != 0.0) row[d.first_slot + static_cast<std::int64_t>(k)] += d.mass[k];
      }
    }
  }
  LoadEstimate out;
  out.horizon = model.horizon();
  out.cells.resize(acc.size());
  for (std::size_t e = 0; e < acc.size(); ++e) {
    for (const auto& [slot, y] : acc[e]) out.cells[e].emplace_back(slot, y);
  }
  return out;
}

}  // namespace cdr
