#include "aotuav/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <string>

#include "aotuav/errors.hpp"

namespace aot {

std::vector<std::size_t> DeviceGraph::attestable() const {
  std::vector<std::size_t> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i != source && i != gateway) out.push_back(i);
  }
  return out;
}

void validate(const DeviceGraph& graph) {
  const std::size_t n = graph.nodes.size();
  if (graph.source >= n || graph.gateway >= n) throw InvalidGraph("source or gateway index out of range");
  if (graph.source == graph.gateway) throw InvalidGraph("source and gateway must differ");
  for (const auto& c : graph.nodes) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) throw InvalidGraph("non-finite node coordinate");
  }
  if (!std::isfinite(graph.base.x) || !std::isfinite(graph.base.y)) throw InvalidGraph("non-finite base coordinate");
  for (const auto& l : graph.links) {
    if (l.from >= n || l.to >= n) throw InvalidGraph("link references a missing node");
    if (l.from == l.to) throw InvalidGraph("self-loop at node " + std::to_string(l.from));
    if (l.capacity <= 0) throw InvalidGraph("link capacity must be strictly positive");
  }
}

namespace {

// Residual network with paired forward/backward arcs; arc 2k is link k, arc 2k+1 its reverse.
struct Residual {
  struct Arc {
    std::size_t to;
    MilliKbps cap;
  };
  std::vector<Arc> arcs;
  std::vector<std::vector<std::size_t>> out;

  Residual(const DeviceGraph& g, std::optional<std::size_t> removed) : out(g.nodes.size()) {
    arcs.reserve(2 * g.links.size());
    for (const auto& l : g.links) {
      const bool dead = removed && (l.from == *removed || l.to == *removed);
      const std::size_t k = arcs.size();
      arcs.push_back({l.to, dead ? 0 : l.capacity});
      arcs.push_back({l.from, 0});
      out[l.from].push_back(k);
      out[l.to].push_back(k + 1);
    }
  }
};

}  // namespace

FlowSolution solve_max_flow(const DeviceGraph& graph, std::size_t source, std::size_t sink,
                            std::optional<std::size_t> removed) {
  const std::size_t n = graph.nodes.size();
  if (source >= n || sink >= n) throw InvalidGraph("max_flow: source or sink not in graph");
  for (const auto& l : graph.links) {
    if (l.from >= n || l.to >= n) throw InvalidGraph("link references a missing node");
  }

  FlowSolution result;
  result.link_flow.assign(graph.links.size(), 0);
  if (source == sink || (removed && (*removed == source || *removed == sink))) return result;

  Residual res(graph, removed);
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent_arc(n);

  for (;;) {
    std::fill(parent_arc.begin(), parent_arc.end(), kNone);
    std::queue<std::size_t> frontier;
    frontier.push(source);
    bool reached = false;
    while (!frontier.empty() && !reached) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t a : res.out[u]) {
        const auto& arc = res.arcs[a];
        if (arc.cap <= 0 || arc.to == source || parent_arc[arc.to] != kNone) continue;
        parent_arc[arc.to] = a;
        if (arc.to == sink) {
          reached = true;
          break;
        }
        frontier.push(arc.to);
      }
    }
    if (!reached) break;

    MilliKbps bottleneck = std::numeric_limits<MilliKbps>::max();
    for (std::size_t v = sink; v != source; v = res.arcs[parent_arc[v] ^ 1].to) {
      bottleneck = std::min(bottleneck, res.arcs[parent_arc[v]].cap);
    }
    for (std::size_t v = sink; v != source; v = res.arcs[parent_arc[v] ^ 1].to) {
      res.arcs[parent_arc[v]].cap -= bottleneck;
      res.arcs[parent_arc[v] ^ 1].cap += bottleneck;
    }
    result.value += bottleneck;
  }

  for (std::size_t k = 0; k < graph.links.size(); ++k) result.link_flow[k] = res.arcs[2 * k + 1].cap;
  return result;
}

double max_flow(const DeviceGraph& graph, std::size_t source, std::size_t sink) {
  return to_kbps(solve_max_flow(graph, source, sink).value);
}

double attested_throughput(const DeviceGraph& graph, std::size_t device) {
  if (device >= graph.nodes.size()) throw InvalidTarget("attested_throughput: no such device");
  if (device == graph.source || device == graph.gateway) {
    throw InvalidTarget("attested_throughput: source and gateway are never attested");
  }
  return to_kbps(solve_max_flow(graph, graph.source, graph.gateway, device).value);
}

ThroughputTable build_throughput_table(const DeviceGraph& graph) {
  validate(graph);
  ThroughputTable table;
  table.full = max_flow(graph, graph.source, graph.gateway);
  for (std::size_t i : graph.attestable()) table.degraded[i] = attested_throughput(graph, i);
  return table;
}

namespace {

double squared_distance(const Coordinate& a, const Coordinate& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::size_t nearest_to(const std::vector<Coordinate>& pts, const Coordinate& target, std::size_t skip) {
  std::size_t best = skip == 0 ? 1 : 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == skip) continue;
    if (squared_distance(pts[i], target) < squared_distance(pts[best], target)) best = i;
  }
  return best;
}

}  // namespace

DeviceGraph random_geometric_graph(std::size_t n, double region, double radius, double capacity_kbps,
                                   std::uint64_t seed) {
  if (n < 3) throw ConfigError("random_geometric_graph: need at least 3 devices");
  if (!(radius > 0.0)) throw ConfigError("random_geometric_graph: radius must be positive");
  if (!(region > 0.0)) throw ConfigError("random_geometric_graph: region must be positive");
  if (!(capacity_kbps > 0.0)) throw ConfigError("random_geometric_graph: capacity must be positive");

  constexpr int kMaxAttempts = 10000;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, region);
  const MilliKbps cap = to_milli(capacity_kbps);
  const double r2 = radius * radius;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    DeviceGraph g;
    g.nodes.resize(n + 2);
    for (auto& c : g.nodes) {
      c.x = coord(rng);
      c.y = coord(rng);
    }
    g.gateway = nearest_to(g.nodes, {0.0, 0.0}, g.nodes.size());
    g.source = nearest_to(g.nodes, {region, region}, g.gateway);
    g.base = {0.0, 0.0};
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
        if (squared_distance(g.nodes[i], g.nodes[j]) <= r2) {
          g.links.push_back({i, j, cap});
          g.links.push_back({j, i, cap});
        }
      }
    }
    if (solve_max_flow(g, g.source, g.gateway).value > 0) return g;
  }
  throw ConfigError("random_geometric_graph: no connected topology after " + std::to_string(kMaxAttempts) +
                    " attempts; increase the radius");
}

DeviceGraph scale_to_throughput(DeviceGraph graph, double target_kbps) {
  const MilliKbps full = solve_max_flow(graph, graph.source, graph.gateway).value;
  if (full <= 0) throw InvalidGraph("scale_to_throughput: source cannot reach gateway");
  const double factor = to_milli(target_kbps) / static_cast<double>(full);
  for (auto& l : graph.links) {
    l.capacity = std::max<MilliKbps>(1, static_cast<MilliKbps>(std::llround(l.capacity * factor)));
  }
  return graph;
}

void to_json(nlohmann::json& j, const DeviceGraph& graph) {
  auto devices = nlohmann::json::array();
  for (const auto& c : graph.nodes) devices.push_back({c.x, c.y});
  auto links = nlohmann::json::array();
  for (const auto& l : graph.links) links.push_back({l.from, l.to, to_kbps(l.capacity)});
  j = {{"devices", devices},
       {"links", links},
       {"source", graph.source},
       {"gateway", graph.gateway},
       {"base", {graph.base.x, graph.base.y}}};
}

void from_json(const nlohmann::json& j, DeviceGraph& graph) {
  try {
    graph = DeviceGraph{};
    for (const auto& d : j.at("devices")) graph.nodes.push_back({d.at(0).get<double>(), d.at(1).get<double>()});
    for (const auto& l : j.at("links")) {
      const double kbps = l.at(2).get<double>();
      if (!std::isfinite(kbps) || kbps <= 0.0) throw InvalidGraph("link capacity must be finite and positive");
      graph.links.push_back({l.at(0).get<std::size_t>(), l.at(1).get<std::size_t>(), to_milli(kbps)});
    }
    graph.source = j.at("source").get<std::size_t>();
    graph.gateway = j.at("gateway").get<std::size_t>();
    const auto& b = j.at("base");
    graph.base = {b.at(0).get<double>(), b.at(1).get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidGraph(std::string("malformed graph document: ") + e.what());
  }
  validate(graph);
}

DeviceGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidGraph(path.string() + ": " + e.what());
  }
  return j.get<DeviceGraph>();
}

void save_graph(const DeviceGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file " + path.string());
  out << nlohmann::json(graph).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace aot
