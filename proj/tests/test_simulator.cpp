#include <doctest.h>

#include <numeric>

#include "cdr/rng.hpp"
#include "cdr/schedule.hpp"
#include "cdr/simulator.hpp"
#include "support.hpp"

using namespace cdr;

TEST_CASE("figure instance, zero waits: collision on v2v3 at slot 2") {
  const auto inst = support::fig1();
  const auto tr = simulate(inst, zero_schedule(inst));
  CHECK(tr.max_load == 2);
  CHECK(tr.load("v2v3", 2) == 2);
  CHECK(tr.makespan == 4);
  std::int64_t collisions = 0;
  for (const auto& [cell, n] : tr.loads) collisions += n > 1 ? 1 : 0;
  CHECK(collisions == 1);

  const auto report = check(tr, {1});
  CHECK_FALSE(report.pass());
  CHECK(report.text().find("edge v2v3 slot 2") != std::string::npos);
  CHECK(check(tr, {2}).pass());
}

TEST_CASE("single packet with zero waits finishes at its length") {
  for (std::int64_t m : {1, 5, 17}) {
    const auto inst = support::chain(m);
    const auto tr = simulate(inst, zero_schedule(inst));
    CHECK(tr.makespan == m);
    CHECK(tr.max_load == 1);
    CHECK(tr.states.size() == static_cast<std::size_t>(m));
    for (const auto& s : tr.states) CHECK(s.active == 1);
  }
}

TEST_CASE("shape errors") {
  const auto inst = support::fig1();
  Schedule s = zero_schedule(inst);
  s.waits[1].pop_back();
  CHECK_THROWS_AS(simulate(inst, s), ScheduleShapeError);
  s = zero_schedule(inst);
  s.waits[0][1] = -1;
  CHECK_THROWS_AS(simulate(inst, s), ScheduleShapeError);
  s = zero_schedule(inst);
  s.waits.pop_back();
  CHECK_THROWS_AS(simulate(inst, s), ScheduleShapeError);
}

TEST_CASE("trace invariants on random schedules") {
  auto g = rng::stream(17, {rng::kAssignment});
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RandomInstanceParams params;
    params.packets = 1 + static_cast<std::int64_t>(seed % 9);
    params.max_length = 3 + static_cast<std::int64_t>(seed % 13);
    const auto inst = random_instance(seed, params);
    Schedule s = zero_schedule(inst);
    for (auto& w : s.waits) {
      for (auto& x : w) x = rng::uniform(g, 0, 3);
    }
    const auto tr = simulate(inst, s, 1000);
    std::int64_t total = 0;
    for (const auto& [cell, n] : tr.loads) total += n;
    std::int64_t edges = 0;
    for (const auto& p : inst.paths) edges += static_cast<std::int64_t>(p.size());
    CHECK(total == edges);

    std::int64_t latest = 0;
    for (std::size_t i = 0; i < inst.paths.size(); ++i) {
      const auto expect = s.crossing_slots(i);
      CHECK(tr.crossings[i] == expect);
      for (std::size_t k = 1; k < expect.size(); ++k) CHECK(expect[k] > expect[k - 1]);
      CHECK(tr.arrivals[i] == s.arrival(i));
      CHECK(tr.waited[i] == s.waits[i]);
      latest = std::max(latest, tr.arrivals[i]);
    }
    CHECK(tr.makespan == latest);
    CHECK(tr.makespan == s.makespan());
    const auto st = stats(inst);
    CHECK(tr.makespan >= st.dilation);

    // Every packet is in exactly one state in every slot it exists.
    for (const auto& c : tr.states) {
      CHECK(c.active + c.waiting + c.parking == static_cast<std::int64_t>(inst.paths.size()));
    }
    std::int64_t waits = 0;
    for (const auto& [cell, n] : tr.buffers) waits += n;
    std::int64_t interior = 0;
    for (const auto& w : s.waits) interior += std::accumulate(w.begin() + 1, w.end() - 1, std::int64_t{0});
    CHECK(waits == interior);
  }
}

TEST_CASE("check verdicts for makespan, buffers and waits") {
  const auto inst = shared_path_instance(3, 4);
  Schedule s{{{0, 0, 0, 0, 0}, {1, 0, 0, 0, 0}, {0, 2, 0, 0, 0}}};
  const auto tr = simulate(inst, s, 3);
  CheckRequirements req{3, 6, 1, 1};
  const auto r = check(tr, req);
  REQUIRE(r.verdicts.size() == 4u);
  CHECK(r.verdicts[0].pass);
  CHECK(r.verdicts[1].pass);
  CHECK(r.verdicts[2].pass);
  CHECK_FALSE(r.verdicts[3].pass);
  CHECK(r.verdicts[3].detail.find("packet 2 waits 2") != std::string::npos);
  CHECK(check(tr, {3, 5}).verdicts[1].pass == false);
  CHECK(tr.max_buffer == 1);
  CHECK(tr.max_interior_wait == 2);
}

TEST_CASE("parking at source and sink is not buffering") {
  const auto inst = support::chain(2);
  Schedule s{{{3, 0, 4}}};
  const auto tr = simulate(inst, s);
  CHECK(tr.buffers.empty());
  CHECK(tr.arrivals[0] == 9);
  CHECK(tr.states.front().parking == 1);
  CHECK(tr.states.back().parking == 1);
}

TEST_CASE("schedule JSON round trip and unpadding") {
  const auto inst = support::fig1();
  const auto padded = pad(inst);
  Schedule s{{{1, 0, 0, 2, 1}, {0, 1, 0, 0, 3}, {2, 0, 0, 0, 0}}};
  const auto un = unpad(padded, s);
  CHECK(un.waits[0] == std::vector<std::int64_t>{1, 0, 0, 2 + 1 + 1});
  CHECK(un.waits[1] == s.waits[1]);
  for (std::size_t i = 0; i < 3; ++i) CHECK(un.arrival(i) == s.arrival(i));
  const auto tr = simulate(inst, un, 3);
  const auto tp = simulate(padded.padded, s, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < inst.paths[i].size(); ++k) CHECK(tr.crossings[i][k] == tp.crossings[i][k]);
  }

  const auto text = to_json(s).dump(2);
  CHECK(schedule_from_json(nlohmann::json::parse(text)) == s);
  const auto j = to_json(s);
  CHECK(j["makespan"] == s.makespan());
  CHECK(j["packets"][0]["arrival"] == s.arrival(0));
}

TEST_CASE("trace exports") {
  const auto inst = support::fig1();
  const auto tr = simulate(inst, zero_schedule(inst), 2);
  const auto csv = loads_csv(tr);
  CHECK(csv.rfind("edge,slot,load\n", 0) == 0);
  CHECK(csv.find("v2v3,2,2\n") != std::string::npos);
  CHECK(arrivals_csv(tr).rfind("packet,arrival\n", 0) == 0);
  const auto j = summary_json(tr);
  CHECK(j["max_load"] == 2);
  CHECK(j["makespan"] == 4);
}
