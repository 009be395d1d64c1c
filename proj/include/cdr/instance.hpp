#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace cdr {

/// Directed edge. Ids are opaque; parallel edges and loops are allowed and are
/// told apart only by id.
struct Edge {
  std::string id;
  std::string tail;
  std::string head;

  friend bool operator==(const Edge&, const Edge&) = default;
};

using Path = std::vector<std::string>;

/// A store-and-forward routing instance: a directed multigraph and one fixed
/// path per packet. Paths may revisit nodes but never reuse an edge.
struct Instance {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<Path> paths;

  std::size_t packet_count() const { return paths.size(); }
  friend bool operator==(const Instance&, const Instance&) = default;
};

struct InstanceStats {
  std::int64_t congestion = 0;
  std::int64_t dilation = 0;
};

enum class ViolationKind {
  kNoPackets,
  kEmptyPath,
  kDuplicateNode,
  kDuplicateEdgeId,
  kUnknownEndpoint,
  kUnknownEdge,
  kDisconnectedPath,
  kDuplicateEdgeInPath,
};

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> packet;
  std::optional<std::size_t> position;  // 1-based position on the path
  std::string edge;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

class InvalidInstance : public std::invalid_argument {
 public:
  explicit InvalidInstance(const ValidationReport& report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

ValidationReport validate(const Instance& instance);

/// Exact congestion C and dilation D. Throws InvalidInstance.
InstanceStats stats(const Instance& instance);

/// Edge-index view used by the numeric kernels. Edge indices follow the
/// lexicographic order of edge ids, which is also the bad-event scan order.
struct IndexedPaths {
  std::vector<std::string> edge_ids;             // sorted
  std::vector<std::vector<std::int32_t>> paths;  // per packet, edge indices
  std::int32_t edge_count() const { return static_cast<std::int32_t>(edge_ids.size()); }
  /// Per edge, the (packet, 1-based position) pairs of paths using it.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> users() const;
};

IndexedPaths index_paths(const Instance& instance);

/// One position of a padded path.
struct PaddedPosition {
  std::string edge;
  bool dummy = false;
};

/// Instance normalised so every path has the same power-of-two length
/// `length` >= max(C, D). Dummy edges are appended after each sink and are
/// private to their path.
struct PaddedInstance {
  Instance base;
  Instance padded;
  std::int64_t length = 0;
  std::vector<std::vector<PaddedPosition>> mapping;
  std::int64_t original_length(std::size_t packet) const {
    return static_cast<std::int64_t>(base.paths[packet].size());
  }
};

std::int64_t next_power_of_two(std::int64_t v);

PaddedInstance pad(const Instance& instance);

// JSON I/O. Encoding uses a fixed key order so files are byte-reproducible.
nlohmann::ordered_json to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::string& file);
void save_json(const std::string& file, const nlohmann::ordered_json& j);

struct RandomInstanceParams {
  std::int64_t packets = 8;
  std::int64_t max_length = 32;
  std::int64_t nodes = 0;       // 0: chosen from max_length
  std::int64_t out_degree = 3;
};

/// Random instance: a random multigraph (loops and parallel edges permitted)
/// and per-packet random walks that never reuse an edge.
Instance random_instance(std::uint64_t seed, const RandomInstanceParams& params);

/// Instance where `packets` packets share one path of `length` edges.
Instance shared_path_instance(std::int64_t packets, std::int64_t length);

}  // namespace cdr
