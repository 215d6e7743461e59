#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"

namespace aot {

/// Planar position in meters.
struct Coordinate {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

/// Link capacities are held in integral milli-Kbps so residual arithmetic is exact.
using MilliKbps = std::int64_t;

constexpr MilliKbps to_milli(double kbps) { return static_cast<MilliKbps>(kbps * 1000.0 + (kbps >= 0 ? 0.5 : -0.5)); }
constexpr double to_kbps(MilliKbps milli) { return static_cast<double>(milli) / 1000.0; }

struct Link {
  std::size_t from = 0;
  std::size_t to = 0;
  MilliKbps capacity = 0;

  friend bool operator==(const Link&, const Link&) = default;
};

/// Static multi-hop network: every node has a coordinate; `source` and `gateway`
/// are infrastructure nodes, every other node is an attestable device.
struct DeviceGraph {
  std::vector<Coordinate> nodes;
  std::vector<Link> links;
  std::size_t source = 0;
  std::size_t gateway = 1;
  Coordinate base;

  /// Node indices the UAV may attest, ascending (all nodes except source and gateway).
  std::vector<std::size_t> attestable() const;

  friend bool operator==(const DeviceGraph&, const DeviceGraph&) = default;
};

/// Throws InvalidGraph when an invariant of DeviceGraph does not hold.
void validate(const DeviceGraph& graph);

struct ThroughputTable {
  double full = 0.0;
  std::map<std::size_t, double> degraded;  // node index -> Kbps with that node offline

  friend bool operator==(const ThroughputTable&, const ThroughputTable&) = default;
};

struct FlowSolution {
  MilliKbps value = 0;
  std::vector<MilliKbps> link_flow;  // aligned with DeviceGraph::links
};

/// Shortest-augmenting-path max flow. `removed` takes a node (and all its links) out of the graph.
FlowSolution solve_max_flow(const DeviceGraph& graph, std::size_t source, std::size_t sink,
                            std::optional<std::size_t> removed = std::nullopt);

/// Maximum source-to-sink rate in Kbps.
double max_flow(const DeviceGraph& graph, std::size_t source, std::size_t sink);

/// Max flow from the graph's source to its gateway with `device` offline.
double attested_throughput(const DeviceGraph& graph, std::size_t device);

ThroughputTable build_throughput_table(const DeviceGraph& graph);

/// Places n attestable devices plus a source and a gateway uniformly in [0,region]^2.
/// The gateway is the point nearest the origin, the source the point nearest the opposite
/// corner. Node pairs closer than `radius` get a link in both directions. Redraws until the
/// source reaches the gateway.
DeviceGraph random_geometric_graph(std::size_t n, double region, double radius, double capacity_kbps,
                                   std::uint64_t seed);

/// Rescales every link by the same factor so that the full max flow equals `target_kbps`
/// (up to milli-Kbps rounding).
DeviceGraph scale_to_throughput(DeviceGraph graph, double target_kbps);

void to_json(nlohmann::json& j, const DeviceGraph& graph);
void from_json(const nlohmann::json& j, DeviceGraph& graph);

DeviceGraph load_graph(const std::filesystem::path& path);
void save_graph(const DeviceGraph& graph, const std::filesystem::path& path);

}  // namespace aot
