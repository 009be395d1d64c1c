#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdr/instance.hpp"
#include "cdr/schedule.hpp"
#include "cdr/simulator.hpp"

namespace cdr {

/// Random-permutation instance: every packet goes s -> s' and then through all
/// critical edges e_j = (u_j, v_j) in its own random order, leaving through
/// (v, u_{n+1}) and (u_{n+1}, t). Congestion n, dilation 2n + 3.
struct LowerBoundInstance {
  std::int64_t n = 0;
  std::vector<std::vector<std::int64_t>> permutations;  // 1-based critical-edge order
  Instance instance;
};

LowerBoundInstance generate(std::int64_t n, std::uint64_t seed);
/// Builds the instance for given permutations (each a permutation of 1..n).
LowerBoundInstance lower_bound_instance(std::vector<std::vector<std::int64_t>> permutations);

std::string critical_edge_id(std::int64_t j);

/// Instance JSON plus a top-level "permutations" array.
nlohmann::ordered_json to_json(const LowerBoundInstance& lb);
LowerBoundInstance lower_bound_from_json(const nlohmann::json& j);

/// Normal form of a policy: row i holds W_i0 (parking at s) followed by the
/// waits at u_1..u_{n+1}. Waiting at s' or at v-nodes is never needed.
struct RoutingMatrix {
  std::vector<std::vector<std::int64_t>> w;

  static RoutingMatrix zeros(std::int64_t n);
  std::int64_t n() const { return static_cast<std::int64_t>(w.size()); }
  /// Release slot of packet i: W_i0 + (2n + 3) + sum_j W_ij.
  std::int64_t makespan(std::size_t packet) const;
};

Schedule matrix_to_schedule(const LowerBoundInstance& lb, const RoutingMatrix& m);

/// No collision on (s,s') and (u_{n+1},t) and every release within horizon.
/// Depends only on the matrix, never on the permutations.
bool is_candidate(const RoutingMatrix& m, std::int64_t horizon);

double binary_entropy(double p);
/// H(eps / (1 + eps)) * (1 + eps), base-2 logarithms, phi(0) = 0.
double phi(double eps);

struct Margin {
  double phi = 0.0;
  double collision_exponent = 0.0;  // log2(16/15) / 128
  bool separation = false;          // phi < collision_exponent
};

Margin margin(double eps);

/// phi(eps) n^2 + 2n log2(2n): log2 of the bound on the number of candidate
/// matrices, keeping the (2n)^(2n) slack explicit.
double counting_bound(std::int64_t n, double eps);

/// Per slot, the number of packets on critical edges.
std::vector<std::int64_t> critical_crossings(const LowerBoundInstance& lb, const SimulationTrace& trace);

}  // namespace cdr
