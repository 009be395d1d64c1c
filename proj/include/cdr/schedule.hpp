#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdr/instance.hpp"

namespace cdr {

/// Routing policy: for every packet, the number of slots it waits at each node
/// of its path (node 0 = source, node |P| = sink). A packet crosses its j-th
/// edge in slot j + (waits at nodes 0..j-1) and is released at slot
/// |P| + (all waits), so the sink wait delays release but uses no edge.
struct Schedule {
  std::vector<std::vector<std::int64_t>> waits;

  std::size_t packet_count() const { return waits.size(); }
  std::int64_t arrival(std::size_t packet) const;
  std::int64_t makespan() const;
  /// Crossing slots of positions 1..|P| implied by the waits.
  std::vector<std::int64_t> crossing_slots(std::size_t packet) const;
  std::int64_t total_waiting(std::size_t packet) const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

class ScheduleShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ScheduleShapeError unless there is one wait per node on every path
/// and all waits are nonnegative.
void check_shape(const Instance& instance, const Schedule& schedule);

/// Schedule with every wait zero.
Schedule zero_schedule(const Instance& instance);

/// Restricts a schedule of the padded instance to the original paths. The
/// sink wait absorbs the dummy tail so release slots are unchanged.
Schedule unpad(const PaddedInstance& padded, const Schedule& schedule);

nlohmann::ordered_json to_json(const Schedule& schedule);
Schedule schedule_from_json(const nlohmann::json& j);
Schedule load_schedule(const std::string& file);

}  // namespace cdr
