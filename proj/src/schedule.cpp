#include "cdr/schedule.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace cdr {

std::int64_t Schedule::arrival(std::size_t packet) const {
  const auto& w = waits[packet];
  return static_cast<std::int64_t>(w.size()) - 1 + std::accumulate(w.begin(), w.end(), std::int64_t{0});
}

std::int64_t Schedule::makespan() const {
  std::int64_t m = 0;
  for (std::size_t i = 0; i < waits.size(); ++i) m = std::max(m, arrival(i));
  return m;
}

std::vector<std::int64_t> Schedule::crossing_slots(std::size_t packet) const {
  const auto& w = waits[packet];
  std::vector<std::int64_t> out;
  out.reserve(w.size() - 1);
  std::int64_t t = 0;
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    t += w[j] + 1;
    out.push_back(t);
  }
  return out;
}

std::int64_t Schedule::total_waiting(std::size_t packet) const {
  return std::accumulate(waits[packet].begin(), waits[packet].end(), std::int64_t{0});
}

void check_shape(const Instance& instance, const Schedule& schedule) {
  if (schedule.waits.size() != instance.paths.size()) {
    throw ScheduleShapeError("schedule has " + std::to_string(schedule.waits.size()) + " packets, instance has " +
                             std::to_string(instance.paths.size()));
  }
  for (std::size_t i = 0; i < schedule.waits.size(); ++i) {
    if (schedule.waits[i].size() != instance.paths[i].size() + 1) {
      throw ScheduleShapeError("packet " + std::to_string(i) + ": expected " +
                               std::to_string(instance.paths[i].size() + 1) + " node waits");
    }
    for (auto w : schedule.waits[i]) {
      if (w < 0) throw ScheduleShapeError("packet " + std::to_string(i) + ": negative wait");
    }
  }
}

Schedule zero_schedule(const Instance& instance) {
  Schedule s;
  for (const auto& p : instance.paths) s.waits.emplace_back(p.size() + 1, 0);
  return s;
}

Schedule unpad(const PaddedInstance& padded, const Schedule& schedule) {
  check_shape(padded.padded, schedule);
  Schedule out;
  for (std::size_t i = 0; i < schedule.waits.size(); ++i) {
    const auto m = static_cast<std::size_t>(padded.original_length(i));
    const auto& w = schedule.waits[i];
    std::vector<std::int64_t> row(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m));
    const auto tail = std::accumulate(w.begin() + static_cast<std::ptrdiff_t>(m), w.end(), std::int64_t{0});
    row.push_back(tail + padded.length - static_cast<std::int64_t>(m));
    out.waits.push_back(std::move(row));
  }
  return out;
}

nlohmann::ordered_json to_json(const Schedule& schedule) {
  nlohmann::ordered_json j;
  auto packets = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < schedule.waits.size(); ++i) {
    nlohmann::ordered_json p;
    p["waits"] = schedule.waits[i];
    p["arrival"] = schedule.arrival(i);
    packets.push_back(std::move(p));
  }
  j["packets"] = std::move(packets);
  j["makespan"] = schedule.makespan();
  return j;
}

Schedule schedule_from_json(const nlohmann::json& j) {
  Schedule s;
  for (const auto& p : j.at("packets")) s.waits.push_back(p.at("waits").get<std::vector<std::int64_t>>());
  return s;
}

Schedule load_schedule(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  return schedule_from_json(nlohmann::json::parse(in));
}

}  // namespace cdr
