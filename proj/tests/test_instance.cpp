#include <doctest.h>

#include <map>
#include <set>

#include "cdr/instance.hpp"
#include "support.hpp"

using namespace cdr;

namespace {

// Congestion and dilation counted straight from the path lists.
std::pair<std::int64_t, std::int64_t> brute_stats(const Instance& inst) {
  std::map<std::string, std::int64_t> use;
  std::int64_t d = 0;
  for (const auto& p : inst.paths) {
    d = std::max<std::int64_t>(d, p.size());
    for (const auto& e : p) ++use[e];
  }
  std::int64_t c = 0;
  for (const auto& [e, n] : use) c = std::max(c, n);
  return {c, d};
}

bool has_kind(const ValidationReport& r, ViolationKind k) {
  for (const auto& v : r.violations) {
    if (v.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("figure instance has three packets, C=2 and D=4") {
  const auto inst = support::fig1();
  CHECK(validate(inst).ok());
  CHECK(inst.packet_count() == 3);
  const auto s = stats(inst);
  CHECK(s.congestion == 2);
  CHECK(s.dilation == 4);
}

TEST_CASE("single packet on a single edge") {
  const auto inst = support::chain(1);
  CHECK(validate(inst).ok());
  CHECK(stats(inst).congestion == 1);
  CHECK(stats(inst).dilation == 1);
}

TEST_CASE("shared path of m edges has C=n, D=m") {
  for (std::int64_t n = 1; n <= 5; ++n) {
    for (std::int64_t m = 1; m <= 7; ++m) {
      const auto s = stats(shared_path_instance(n, m));
      CHECK(s.congestion == n);
      CHECK(s.dilation == m);
    }
  }
}

TEST_CASE("validation violations") {
  SUBCASE("repeated edge") {
    auto inst = support::chain(3);
    inst.edges.push_back({"back", "c3", "c0"});
    inst.paths[0] = {"ce1", "ce2", "ce3", "back", "ce1"};
    const auto r = validate(inst);
    REQUIRE_FALSE(r.ok());
    CHECK(has_kind(r, ViolationKind::kDuplicateEdgeInPath));
    bool named = false;
    for (const auto& v : r.violations) {
      if (v.message.find("duplicate edge in path") != std::string::npos && v.edge == "ce1") named = true;
    }
    CHECK(named);
    CHECK_THROWS_AS(stats(inst), InvalidInstance);
  }
  SUBCASE("no packets") {
    auto inst = support::chain(2);
    inst.paths.clear();
    CHECK(has_kind(validate(inst), ViolationKind::kNoPackets));
  }
  SUBCASE("empty path") {
    auto inst = support::chain(2);
    inst.paths.push_back({});
    CHECK(has_kind(validate(inst), ViolationKind::kEmptyPath));
  }
  SUBCASE("unknown edge") {
    auto inst = support::chain(2);
    inst.paths[0].push_back("nowhere");
    CHECK(has_kind(validate(inst), ViolationKind::kUnknownEdge));
  }
  SUBCASE("disconnected path") {
    auto inst = support::chain(3);
    inst.paths[0] = {"ce1", "ce3"};
    const auto r = validate(inst);
    CHECK(has_kind(r, ViolationKind::kDisconnectedPath));
    CHECK(r.violations.front().packet == 0u);
  }
  SUBCASE("unknown endpoint") {
    auto inst = support::chain(2);
    inst.edges.push_back({"x", "c0", "ghost"});
    CHECK(has_kind(validate(inst), ViolationKind::kUnknownEndpoint));
  }
  SUBCASE("duplicate ids") {
    auto inst = support::chain(2);
    inst.nodes.push_back("c0");
    inst.edges.push_back(inst.edges.front());
    const auto r = validate(inst);
    CHECK(has_kind(r, ViolationKind::kDuplicateNode));
    CHECK(has_kind(r, ViolationKind::kDuplicateEdgeId));
  }
}

TEST_CASE("revisiting a node is allowed, loops and parallel edges too") {
  Instance inst;
  inst.nodes = {"a", "b"};
  inst.edges = {{"p", "a", "b"}, {"q", "a", "b"}, {"r", "b", "a"}, {"loop", "b", "b"}};
  inst.paths = {{"p", "loop", "r", "q"}};
  CHECK(validate(inst).ok());
  CHECK(stats(inst).dilation == 4);
}

TEST_CASE("next power of two") {
  CHECK(next_power_of_two(1) == 1);
  CHECK(next_power_of_two(2) == 2);
  CHECK(next_power_of_two(3) == 4);
  CHECK(next_power_of_two(5) == 8);
  CHECK(next_power_of_two(1024) == 1024);
  CHECK(next_power_of_two(1025) == 2048);
}

TEST_CASE("padding the figure instance") {
  const auto p = pad(support::fig1());
  CHECK(p.length == 4);
  // The two length-3 paths get one private dummy each.
  int dummies = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(p.padded.paths[i].size() == 4u);
    for (const auto& pos : p.mapping[i]) dummies += pos.dummy ? 1 : 0;
  }
  CHECK(dummies == 2);
  CHECK(validate(p.padded).ok());
}

TEST_CASE("padding C=5, D=3 gives length 8") {
  const auto p = pad(shared_path_instance(5, 3));
  CHECK(p.length == 8);
  for (const auto& path : p.padded.paths) CHECK(path.size() == 8u);
}

TEST_CASE("power-of-two lengths at least C pad to themselves") {
  const auto inst = shared_path_instance(3, 4);
  const auto p = pad(inst);
  CHECK(p.length == 4);
  CHECK(p.padded.paths == inst.paths);
}

TEST_CASE("padding properties on random instances") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    RandomInstanceParams params;
    params.packets = 1 + static_cast<std::int64_t>(seed % 12);
    params.max_length = 4 + static_cast<std::int64_t>(seed % 40);
    const auto inst = random_instance(seed, params);
    REQUIRE(validate(inst).ok());
    const auto [c, d] = brute_stats(inst);
    const auto s = stats(inst);
    CHECK(s.congestion == c);
    CHECK(s.dilation == d);

    const auto p = pad(inst);
    CHECK(p.length == next_power_of_two(std::max(c, d)));
    CHECK(validate(p.padded).ok());

    std::map<std::string, std::int64_t> use;
    for (const auto& path : p.padded.paths) {
      for (const auto& e : path) ++use[e];
    }
    std::set<std::string> original;
    for (const auto& e : inst.edges) original.insert(e.id);
    std::int64_t c_orig = 0;
    for (std::size_t i = 0; i < inst.paths.size(); ++i) {
      REQUIRE(static_cast<std::int64_t>(p.padded.paths[i].size()) == p.length);
      for (std::int64_t k = 0; k < p.length; ++k) {
        const auto& pos = p.mapping[i][k];
        CHECK(pos.edge == p.padded.paths[i][k]);
        if (k < p.original_length(i)) {
          CHECK_FALSE(pos.dummy);
          CHECK(pos.edge == inst.paths[i][k]);
        } else {
          CHECK(pos.dummy);
          CHECK(original.count(pos.edge) == 0);
          CHECK(use[pos.edge] == 1);
        }
      }
    }
    for (const auto& e : original) c_orig = std::max(c_orig, use[e]);
    CHECK(c_orig == c);
  }
}

TEST_CASE("JSON round trip is exact and byte stable") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = random_instance(seed, {});
    const auto text = to_json(inst).dump(2);
    const auto back = instance_from_json(nlohmann::json::parse(text));
    CHECK(back == inst);
    CHECK(to_json(back).dump(2) == text);
  }
  const auto fig = support::fig1();
  CHECK(instance_from_json(nlohmann::json::parse(to_json(fig).dump())) == fig);
}

TEST_CASE("random instances are deterministic and never reuse an edge") {
  RandomInstanceParams params;
  params.packets = 16;
  params.max_length = 64;
  CHECK(random_instance(5, params) == random_instance(5, params));
  CHECK_FALSE(random_instance(5, params) == random_instance(6, params));
  const auto inst = random_instance(9, params);
  for (const auto& p : inst.paths) {
    std::set<std::string> seen(p.begin(), p.end());
    CHECK(seen.size() == p.size());
    CHECK(static_cast<std::int64_t>(p.size()) <= params.max_length);
  }
}

TEST_CASE("indexed paths follow lexicographic edge order") {
  const auto ix = index_paths(support::fig1());
  CHECK(std::is_sorted(ix.edge_ids.begin(), ix.edge_ids.end()));
  CHECK(ix.edge_count() == 7);
  const auto users = ix.users();
  std::size_t total = 0;
  for (const auto& u : users) total += u.size();
  CHECK(total == 10u);
  // v2v3 is shared by packets 0 and 2 at position 2.
  const auto e = std::find(ix.edge_ids.begin(), ix.edge_ids.end(), "v2v3") - ix.edge_ids.begin();
  REQUIRE(users[e].size() == 2u);
  CHECK(users[e][0] == std::pair<std::int32_t, std::int32_t>{0, 2});
  CHECK(users[e][1] == std::pair<std::int32_t, std::int32_t>{2, 2});
}
