#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "cdr/delay_model.hpp"
#include "cdr/lowerbound.hpp"
#include "cdr/oracle.hpp"
#include "cdr/rng.hpp"
#include "cdr/simulator.hpp"
#include "support.hpp"

using namespace cdr;

namespace {

Instance relabel(const Instance& inst, std::uint64_t seed) {
  auto g = rng::stream(seed, {99});
  std::vector<std::size_t> order(inst.paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), g);
  std::map<std::string, std::string> rename;
  for (const auto& e : inst.edges) rename[e.id] = "r" + std::to_string(g() % 100000) + "_" + e.id;
  Instance out;
  out.nodes = inst.nodes;
  for (const auto& e : inst.edges) out.edges.push_back({rename[e.id], e.tail, e.head});
  for (auto i : order) {
    Path p;
    for (const auto& e : inst.paths[i]) p.push_back(rename[e]);
    out.paths.push_back(p);
  }
  return out;
}

// Brute force over all schedules with waits in [0, cap] at every node.
std::optional<std::int64_t> brute_makespan(const Instance& inst, std::int64_t cap) {
  Schedule s = zero_schedule(inst);
  std::vector<std::int64_t*> slots;
  for (auto& w : s.waits) {
    for (std::size_t k = 0; k + 1 < w.size(); ++k) slots.push_back(&w[k]);
  }
  std::optional<std::int64_t> best;
  while (true) {
    const auto tr = simulate(inst, s, 1000);
    if (tr.max_load <= 1 && (!best || tr.makespan < *best)) best = tr.makespan;
    std::size_t k = 0;
    for (; k < slots.size(); ++k) {
      if (++*slots[k] <= cap) break;
      *slots[k] = 0;
    }
    if (k == slots.size()) return best;
  }
}

}  // namespace

TEST_CASE("two packets on a three-edge path need C + D - 1 = 4") {
  CHECK(oracle::optimal_makespan(shared_path_instance(2, 3)) == 4);
}

TEST_CASE("single packet finishes at its length") {
  for (std::int64_t m : {1, 4, 9}) CHECK(oracle::optimal_makespan(support::chain(m)) == m);
}

TEST_CASE("shared path family gives exactly C + D - 1") {
  for (std::int64_t c = 1; c <= 4; ++c) {
    for (std::int64_t d = 1; d <= 6; ++d) {
      CAPTURE(c);
      CAPTURE(d);
      CHECK(oracle::optimal_makespan(shared_path_instance(c, d)) == c + d - 1);
    }
  }
}

TEST_CASE("n = 2 lower-bound instances need 8") {
  for (const auto& perms : std::vector<std::vector<std::vector<std::int64_t>>>{
           {{1, 2}, {2, 1}}, {{1, 2}, {1, 2}}, {{2, 1}, {2, 1}}, {{2, 1}, {1, 2}}}) {
    CHECK(oracle::optimal_makespan(lower_bound_instance(perms).instance) == 8);
  }
  const auto fixture = load_instance(support::fixture("lb-n2.json"));
  CHECK(oracle::optimal_makespan(fixture) == 8);
}

TEST_CASE("figure instance optimum is its dilation") {
  CHECK(oracle::optimal_makespan(support::fig1()) == 4);
}

TEST_CASE("search agrees with literal enumeration on tiny instances") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    RandomInstanceParams p;
    p.packets = 2 + static_cast<std::int64_t>(seed % 2);
    p.max_length = 3;
    p.nodes = 4;
    p.out_degree = 2;
    const auto inst = random_instance(seed, p);
    std::int64_t nodes = 0;
    for (const auto& path : inst.paths) nodes += static_cast<std::int64_t>(path.size());
    if (nodes > 8) continue;
    CAPTURE(seed);
    const auto brute = brute_makespan(inst, 2);
    const auto fast = oracle::optimal_makespan(inst);
    const auto slow = oracle::optimal_makespan(inst, std::nullopt, {1e8, false});
    CHECK(fast == slow);
    REQUIRE(brute.has_value());
    CHECK(*fast <= *brute);
    // Waits of at most 2 per node suffice when every path is this short.
    CHECK(*fast == *brute);
  }
}

TEST_CASE("dominance pruning never changes the optimum") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    RandomInstanceParams p;
    p.packets = 2 + static_cast<std::int64_t>(seed % 3);
    p.max_length = 4;
    p.nodes = 5;
    const auto inst = random_instance(seed, p);
    CAPTURE(seed);
    CHECK(oracle::optimal_makespan(inst) == oracle::optimal_makespan(inst, std::nullopt, {1e8, false}));
  }
}

TEST_CASE("optimum respects max(C, D) and is invariant under relabelling") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    RandomInstanceParams p;
    p.packets = 2 + static_cast<std::int64_t>(seed % 4);
    p.max_length = 5;
    p.nodes = 5;
    const auto inst = random_instance(seed, p);
    const auto s = stats(inst);
    const auto best = oracle::optimal_makespan(inst);
    REQUIRE(best.has_value());
    CHECK(*best >= std::max(s.congestion, s.dilation));
    CHECK(*best <= oracle::default_horizon(inst));
    CHECK(oracle::optimal_makespan(relabel(inst, seed)) == best);
  }
}

TEST_CASE("horizon and size limits") {
  CHECK_FALSE(oracle::optimal_makespan(shared_path_instance(3, 3), 4).has_value());
  CHECK(oracle::optimal_makespan(shared_path_instance(3, 3), 5) == 5);
  CHECK(oracle::default_horizon(shared_path_instance(3, 3)) == 3 + 3 + 9);
  CHECK_THROWS_WITH_AS(oracle::optimal_makespan(shared_path_instance(3, 3), std::nullopt, {10.0, true}),
                       "instance too large for oracle", oracle::TooLarge);
}

TEST_CASE("exhaustive expectation: one packet on a 4-path is uniform over 4 slots") {
  const auto inst = support::chain(4);
  const auto ladder = LevelLadder::root_only(4);
  const auto table = oracle::exhaustive_expectation(inst, ladder, {});
  for (const auto& row : table) {
    CHECK(row.size() == 4u);
    for (const auto& [t, y] : row) CHECK(y == 0.25);
  }
  CHECK(oracle::delay_space_size(ladder, false) == 4.0);
}

TEST_CASE("exhaustive expectation with everything pinned matches the simulator") {
  const auto padded = pad(support::fig1());
  const auto ladder = LevelLadder::root_only(4);
  oracle::Pinned pinned{{{2}}, {{1}}, {{4}}};
  const auto table = oracle::exhaustive_expectation(padded.padded, ladder, {}, pinned);
  Schedule s{{{2, 0, 0, 0, 2}, {1, 0, 0, 0, 3}, {4, 0, 0, 0, 0}}};
  const auto tr = simulate(padded.padded, s, 10);
  std::size_t cells = 0;
  for (std::size_t e = 0; e < table.size(); ++e) {
    for (const auto& [t, y] : table[e]) {
      CHECK(y == static_cast<double>(tr.loads.at({static_cast<std::int32_t>(e), t})));
      ++cells;
    }
  }
  CHECK(cells == tr.loads.size());
}

TEST_CASE("exhaustive expectation matches the delay model on the padded figure") {
  const auto padded = pad(support::fig1());
  const auto paths = index_paths(padded.padded);
  const auto ladder = LevelLadder::root_only(padded.length);
  const DelayModel m(ladder, Variant::kPlain);
  const auto y = expected_load(m, paths, DelayAssignment::unfixed(3, m));
  const auto table = oracle::exhaustive_expectation(padded.padded, ladder, {});
  for (std::int32_t e = 0; e < paths.edge_count(); ++e) {
    CHECK(y.cells[e].size() == table[e].size());
    for (const auto& [t, v] : y.cells[e]) CHECK(v == table[e].at(t));
  }
}

TEST_CASE("exhaustive expectation matches the model at every frontier") {
  for (auto v : {Variant::kPlain, Variant::kBuffered}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      RandomInstanceParams p;
      p.packets = 5;
      p.max_length = 12;
      const auto padded = pad(random_instance(seed, p));
      const auto ladder = build_ladder(padded.length, 2);
      const DelayModel m(ladder, v);
      const auto paths = index_paths(padded.padded);
      auto g = rng::stream(seed, {rng::kAssignment});
      auto a = DelayAssignment::unfixed(paths.paths.size(), m);
      for (int f = 0; f <= m.depth() + 1; ++f) {
        if (f > 0) a.fix_level_uniform(f - 1, m, g);
        const auto table = oracle::exhaustive_expectation(padded.padded, ladder, {v == Variant::kBuffered}, a.values);
        const auto y = expected_load(m, paths, a);
        double total = 0;
        for (std::int32_t e = 0; e < paths.edge_count(); ++e) {
          REQUIRE(y.cells[e].size() == table[e].size());
          for (const auto& [t, val] : y.cells[e]) {
            CHECK(std::abs(val - table[e].at(t)) <= 1e-12);
            total += table[e].at(t);
          }
        }
        CHECK(total == doctest::Approx(static_cast<double>(paths.paths.size() * padded.length)));
      }
    }
  }
}

TEST_CASE("per packet marginals sum to one on every edge") {
  const auto padded = pad(support::chain(7));
  const auto ladder = build_ladder(8, 2);
  for (bool shifted : {false, true}) {
    const auto table = oracle::exhaustive_expectation(padded.padded, ladder, {shifted});
    for (const auto& row : table) {
      double s = 0;
      for (const auto& [t, y] : row) s += y;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("exhaustive expectation refuses oversized spaces") {
  const auto padded = pad(support::chain(256));
  CHECK_THROWS_AS(oracle::exhaustive_expectation(padded.padded, build_ladder(256, 4), {}), oracle::TooLarge);
}
