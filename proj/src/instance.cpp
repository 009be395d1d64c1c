#include "cdr/instance.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "cdr/rng.hpp"

namespace cdr {

namespace {

std::string summarize(const ValidationReport& report) {
  std::ostringstream os;
  os << "invalid instance";
  for (const auto& v : report.violations) os << "; " << v.message;
  return os.str();
}

}  // namespace

InvalidInstance::InvalidInstance(const ValidationReport& report)
    : std::invalid_argument(summarize(report)), report_(report) {}

ValidationReport validate(const Instance& instance) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::optional<std::size_t> packet,
                 std::optional<std::size_t> pos, std::string edge, std::string msg) {
    report.violations.push_back({kind, packet, pos, std::move(edge), std::move(msg)});
  };

  std::unordered_set<std::string> nodes;
  for (const auto& n : instance.nodes) {
    if (!nodes.insert(n).second) add(ViolationKind::kDuplicateNode, {}, {}, "", "duplicate node " + n);
  }
  std::unordered_map<std::string, const Edge*> edges;
  for (const auto& e : instance.edges) {
    if (!edges.emplace(e.id, &e).second) {
      add(ViolationKind::kDuplicateEdgeId, {}, {}, e.id, "duplicate edge id " + e.id);
    }
    if (!nodes.count(e.tail) || !nodes.count(e.head)) {
      add(ViolationKind::kUnknownEndpoint, {}, {}, e.id, "edge " + e.id + " has an unknown endpoint");
    }
  }
  if (instance.paths.empty()) add(ViolationKind::kNoPackets, {}, {}, "", "instance has no packets");

  for (std::size_t i = 0; i < instance.paths.size(); ++i) {
    const auto& path = instance.paths[i];
    const std::string where = "path " + std::to_string(i);
    if (path.empty()) {
      add(ViolationKind::kEmptyPath, i, {}, "", where + " is empty");
      continue;
    }
    std::unordered_set<std::string> seen;
    const Edge* prev = nullptr;
    for (std::size_t j = 0; j < path.size(); ++j) {
      const auto& id = path[j];
      const std::string at = where + " position " + std::to_string(j + 1);
      auto it = edges.find(id);
      if (it == edges.end()) {
        add(ViolationKind::kUnknownEdge, i, j + 1, id, at + ": unknown edge " + id);
        prev = nullptr;
        continue;
      }
      if (!seen.insert(id).second) {
        add(ViolationKind::kDuplicateEdgeInPath, i, j + 1, id, at + ": duplicate edge in path (" + id + ")");
      }
      if (prev && prev->head != it->second->tail) {
        add(ViolationKind::kDisconnectedPath, i, j + 1, id,
            at + ": edge " + id + " does not start where " + prev->id + " ends");
      }
      prev = it->second;
    }
  }
  return report;
}

InstanceStats stats(const Instance& instance) {
  auto report = validate(instance);
  if (!report.ok()) throw InvalidInstance(report);
  std::unordered_map<std::string, std::int64_t> use;
  InstanceStats s;
  for (const auto& path : instance.paths) {
    s.dilation = std::max<std::int64_t>(s.dilation, static_cast<std::int64_t>(path.size()));
    for (const auto& e : path) s.congestion = std::max(s.congestion, ++use[e]);
  }
  return s;
}

std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> IndexedPaths::users() const {
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> out(edge_ids.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = 0; j < paths[i].size(); ++j) {
      out[paths[i][j]].emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j + 1));
    }
  }
  return out;
}

IndexedPaths index_paths(const Instance& instance) {
  IndexedPaths ix;
  ix.edge_ids.reserve(instance.edges.size());
  for (const auto& e : instance.edges) ix.edge_ids.push_back(e.id);
  std::sort(ix.edge_ids.begin(), ix.edge_ids.end());
  std::unordered_map<std::string, std::int32_t> where;
  for (std::size_t k = 0; k < ix.edge_ids.size(); ++k) where[ix.edge_ids[k]] = static_cast<std::int32_t>(k);
  ix.paths.reserve(instance.paths.size());
  for (const auto& p : instance.paths) {
    std::vector<std::int32_t> row;
    row.reserve(p.size());
    for (const auto& id : p) {
      auto it = where.find(id);
      if (it == where.end()) throw std::invalid_argument("unknown edge " + id);
      row.push_back(it->second);
    }
    ix.paths.push_back(std::move(row));
  }
  return ix;
}

std::int64_t next_power_of_two(std::int64_t v) {
  std::int64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

PaddedInstance pad(const Instance& instance) {
  const auto s = stats(instance);
  PaddedInstance out;
  out.base = instance;
  out.padded = instance;
  out.length = next_power_of_two(std::max(s.congestion, s.dilation));

  std::unordered_map<std::string, std::string> head_of;
  for (const auto& e : instance.edges) head_of[e.id] = e.head;

  out.mapping.resize(instance.paths.size());
  for (std::size_t i = 0; i < instance.paths.size(); ++i) {
    auto& padded_path = out.padded.paths[i];
    for (const auto& e : padded_path) out.mapping[i].push_back({e, false});
    std::string at = head_of[padded_path.back()];
    for (std::int64_t k = static_cast<std::int64_t>(padded_path.size()); k < out.length; ++k) {
      const std::string tag = "~pad/" + std::to_string(i) + "/" + std::to_string(k + 1);
      out.padded.nodes.push_back(tag);
      out.padded.edges.push_back({tag, at, tag});
      padded_path.push_back(tag);
      out.mapping[i].push_back({tag, true});
      at = tag;
    }
  }
  return out;
}

nlohmann::ordered_json to_json(const Instance& instance) {
  nlohmann::ordered_json j;
  j["nodes"] = instance.nodes;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : instance.edges) {
    nlohmann::ordered_json ej;
    ej["id"] = e.id;
    ej["tail"] = e.tail;
    ej["head"] = e.head;
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  j["paths"] = instance.paths;
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  inst.nodes = j.at("nodes").get<std::vector<std::string>>();
  for (const auto& ej : j.at("edges")) {
    inst.edges.push_back({ej.at("id").get<std::string>(), ej.at("tail").get<std::string>(),
                          ej.at("head").get<std::string>()});
  }
  inst.paths = j.at("paths").get<std::vector<Path>>();
  return inst;
}

Instance load_instance(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  return instance_from_json(nlohmann::json::parse(in));
}

void save_json(const std::string& file, const nlohmann::ordered_json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << j.dump(2) << "\n";
}

Instance random_instance(std::uint64_t seed, const RandomInstanceParams& params) {
  auto g = rng::stream(seed, {rng::kInstance});
  const std::int64_t n_nodes = params.nodes > 0 ? params.nodes : std::max<std::int64_t>(6, params.max_length / 2);
  Instance inst;
  for (std::int64_t v = 0; v < n_nodes; ++v) inst.nodes.push_back("n" + std::to_string(v));

  std::vector<std::vector<std::size_t>> out_edges(n_nodes);
  for (std::int64_t v = 0; v < n_nodes; ++v) {
    for (std::int64_t d = 0; d < params.out_degree; ++d) {
      const auto head = rng::uniform(g, 0, n_nodes - 1);
      out_edges[v].push_back(inst.edges.size());
      inst.edges.push_back({"a" + std::to_string(inst.edges.size()), inst.nodes[v], inst.nodes[head]});
    }
  }
  std::unordered_map<std::string, std::int64_t> node_index;
  for (std::int64_t v = 0; v < n_nodes; ++v) node_index[inst.nodes[v]] = v;

  for (std::int64_t i = 0; i < params.packets; ++i) {
    const auto target = rng::uniform(g, 1, params.max_length);
    auto at = rng::uniform(g, 0, n_nodes - 1);
    std::unordered_set<std::size_t> used;
    Path path;
    while (static_cast<std::int64_t>(path.size()) < target) {
      std::vector<std::size_t> options;
      for (auto e : out_edges[at]) {
        if (!used.count(e)) options.push_back(e);
      }
      if (options.empty()) break;
      const auto pick = options[rng::uniform(g, 0, static_cast<std::int64_t>(options.size()) - 1)];
      used.insert(pick);
      path.push_back(inst.edges[pick].id);
      at = node_index[inst.edges[pick].head];
    }
    inst.paths.push_back(std::move(path));
  }
  return inst;
}

Instance shared_path_instance(std::int64_t packets, std::int64_t length) {
  Instance inst;
  for (std::int64_t v = 0; v <= length; ++v) inst.nodes.push_back("w" + std::to_string(v));
  Path path;
  for (std::int64_t k = 0; k < length; ++k) {
    inst.edges.push_back({"f" + std::to_string(k + 1), inst.nodes[k], inst.nodes[k + 1]});
    path.push_back(inst.edges.back().id);
  }
  inst.paths.assign(packets, path);
  return inst;
}

}  // namespace cdr
