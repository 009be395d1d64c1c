#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cdr/instance.hpp"
#include "cdr/schedule.hpp"

namespace cdr {

struct StateCounts {
  std::int64_t active = 0;   // traversing an edge
  std::int64_t waiting = 0;  // at an interior node of its path
  std::int64_t parking = 0;  // at its source or sink
};

/// Outcome of executing a schedule slot by slot.
struct SimulationTrace {
  std::int64_t capacity = 1;
  std::vector<std::string> edge_ids;  // lexicographic; indexes the maps below
  std::map<std::pair<std::int32_t, std::int64_t>, std::int64_t> loads;
  /// Packets parked in an edge's buffer (waiting at its tail, source and sink
  /// excluded) during a slot.
  std::map<std::pair<std::int32_t, std::int64_t>, std::int64_t> buffers;
  std::vector<std::vector<std::int64_t>> crossings;  // per packet, per position
  std::vector<std::vector<std::int64_t>> waited;     // per packet, per node
  std::vector<std::int64_t> arrivals;
  std::vector<StateCounts> states;  // states[t - 1] for t = 1..makespan
  std::int64_t max_load = 0;
  std::int64_t max_buffer = 0;
  std::int64_t max_interior_wait = 0;
  std::int64_t makespan = 0;

  std::int64_t load(const std::string& edge, std::int64_t slot) const;
};

/// Discrete-time execution: each slot, a packet whose wait counter at the
/// current node is positive spends the slot waiting, otherwise it crosses its
/// next edge. Throws ScheduleShapeError on a shape mismatch.
SimulationTrace simulate(const Instance& instance, const Schedule& schedule, std::int64_t capacity = 1);

struct CheckRequirements {
  std::int64_t capacity = 1;
  std::optional<std::int64_t> makespan_bound;
  std::optional<std::int64_t> buffer_bound;
  /// Max slots a packet may wait at any interior node.
  std::optional<std::int64_t> wait_bound;
};

struct Verdict {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct CheckReport {
  std::vector<Verdict> verdicts;
  bool pass() const;
  std::string text() const;
};

CheckReport check(const SimulationTrace& trace, const CheckRequirements& requirements);

std::string loads_csv(const SimulationTrace& trace);
std::string arrivals_csv(const SimulationTrace& trace);
nlohmann::ordered_json summary_json(const SimulationTrace& trace);

}  // namespace cdr
