#include "cdr/simulator.hpp"

#include <algorithm>
#include <sstream>

namespace cdr {

std::int64_t SimulationTrace::load(const std::string& edge, std::int64_t slot) const {
  auto it = std::lower_bound(edge_ids.begin(), edge_ids.end(), edge);
  if (it == edge_ids.end() || *it != edge) return 0;
  auto cell = loads.find({static_cast<std::int32_t>(it - edge_ids.begin()), slot});
  return cell == loads.end() ? 0 : cell->second;
}

SimulationTrace simulate(const Instance& instance, const Schedule& schedule, std::int64_t capacity) {
  check_shape(instance, schedule);
  const auto ix = index_paths(instance);
  const auto k = instance.paths.size();

  SimulationTrace trace;
  trace.capacity = capacity;
  trace.edge_ids = ix.edge_ids;
  trace.crossings.resize(k);
  trace.waited.resize(k);
  trace.arrivals.assign(k, 0);

  struct Progress {
    std::size_t at = 0;  // edges crossed so far = current node index
    std::int64_t remaining = 0;
    bool released = false;
  };
  std::vector<Progress> progress(k);
  std::size_t released = 0;
  for (std::size_t i = 0; i < k; ++i) {
    trace.waited[i].assign(instance.paths[i].size() + 1, 0);
    progress[i].remaining = schedule.waits[i][0];
  }

  for (std::int64_t t = 1; released < k; ++t) {
    StateCounts counts;
    for (std::size_t i = 0; i < k; ++i) {
      auto& p = progress[i];
      const auto len = ix.paths[i].size();
      if (p.released) {
        ++counts.parking;
        continue;
      }
      if (p.remaining > 0) {
        --p.remaining;
        ++trace.waited[i][p.at];
        if (p.at == 0 || p.at == len) {
          ++counts.parking;
        } else {
          ++counts.waiting;
          ++trace.buffers[{ix.paths[i][p.at], t}];
        }
        if (p.at == len && p.remaining == 0) {
          p.released = true;
          trace.arrivals[i] = t;
          ++released;
        }
        continue;
      }
      ++counts.active;
      ++trace.loads[{ix.paths[i][p.at], t}];
      trace.crossings[i].push_back(t);
      ++p.at;
      p.remaining = schedule.waits[i][p.at];
      if (p.at == len && p.remaining == 0) {
        p.released = true;
        trace.arrivals[i] = t;
        ++released;
      }
    }
    trace.states.push_back(counts);
  }

  for (const auto& [cell, n] : trace.loads) trace.max_load = std::max(trace.max_load, n);
  for (const auto& [cell, n] : trace.buffers) trace.max_buffer = std::max(trace.max_buffer, n);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t v = 1; v + 1 < trace.waited[i].size(); ++v) {
      trace.max_interior_wait = std::max(trace.max_interior_wait, trace.waited[i][v]);
    }
    trace.makespan = std::max(trace.makespan, trace.arrivals[i]);
  }
  return trace;
}

bool CheckReport::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string CheckReport::text() const {
  std::ostringstream os;
  for (const auto& v : verdicts) os << (v.pass ? "pass " : "FAIL ") << v.name << ": " << v.detail << "\n";
  return os.str();
}

CheckReport check(const SimulationTrace& trace, const CheckRequirements& req) {
  CheckReport report;
  {
    Verdict v{"load", true, "max load " + std::to_string(trace.max_load) + " <= " + std::to_string(req.capacity)};
    for (const auto& [cell, n] : trace.loads) {
      if (n > req.capacity) {
        v.pass = false;
        v.detail = "edge " + trace.edge_ids[cell.first] + " slot " + std::to_string(cell.second) + " carries " +
                   std::to_string(n) + " packets (capacity " + std::to_string(req.capacity) + ")";
        break;
      }
    }
    report.verdicts.push_back(std::move(v));
  }
  if (req.makespan_bound) {
    report.verdicts.push_back({"makespan", trace.makespan <= *req.makespan_bound,
                               "makespan " + std::to_string(trace.makespan) + " vs bound " +
                                   std::to_string(*req.makespan_bound)});
  }
  if (req.buffer_bound) {
    Verdict v{"buffer", true, "max buffer " + std::to_string(trace.max_buffer)};
    for (const auto& [cell, n] : trace.buffers) {
      if (n > *req.buffer_bound) {
        v.pass = false;
        v.detail = "edge " + trace.edge_ids[cell.first] + " slot " + std::to_string(cell.second) + " buffers " +
                   std::to_string(n) + " packets (bound " + std::to_string(*req.buffer_bound) + ")";
        break;
      }
    }
    report.verdicts.push_back(std::move(v));
  }
  if (req.wait_bound) {
    Verdict v{"wait", true, "max interior wait " + std::to_string(trace.max_interior_wait)};
    for (std::size_t i = 0; i < trace.waited.size() && v.pass; ++i) {
      for (std::size_t node = 1; node + 1 < trace.waited[i].size(); ++node) {
        if (trace.waited[i][node] > *req.wait_bound) {
          v.pass = false;
          v.detail = "packet " + std::to_string(i) + " waits " + std::to_string(trace.waited[i][node]) +
                     " slots at node " + std::to_string(node) + " (bound " + std::to_string(*req.wait_bound) + ")";
          break;
        }
      }
    }
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

std::string loads_csv(const SimulationTrace& trace) {
  std::ostringstream os;
  os << "edge,slot,load\n";
  for (const auto& [cell, n] : trace.loads) os << trace.edge_ids[cell.first] << "," << cell.second << "," << n << "\n";
  return os.str();
}

std::string arrivals_csv(const SimulationTrace& trace) {
  std::ostringstream os;
  os << "packet,arrival\n";
  for (std::size_t i = 0; i < trace.arrivals.size(); ++i) os << i << "," << trace.arrivals[i] << "\n";
  return os.str();
}

nlohmann::ordered_json summary_json(const SimulationTrace& trace) {
  nlohmann::ordered_json j;
  j["capacity"] = trace.capacity;
  j["packets"] = trace.arrivals.size();
  j["max_load"] = trace.max_load;
  j["max_buffer"] = trace.max_buffer;
  j["max_interior_wait"] = trace.max_interior_wait;
  j["makespan"] = trace.makespan;
  j["arrivals"] = trace.arrivals;
  return j;
}

}  // namespace cdr
