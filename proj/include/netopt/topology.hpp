#pragma once

#include <array>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netopt/graph.hpp"
#include "netopt/rng.hpp"

namespace netopt {

// Uniform draw intervals for generated link parameters.
struct LinkParamRanges {
  double bandwidth_hz_lo = 5e6;
  double bandwidth_hz_hi = 20e6;
  double power_w_lo = 0.05;
  double power_w_hi = 0.2;
};

inline constexpr double kNominalBandwidthHz = 10e6;
inline constexpr double kNominalPowerW = 0.1;

namespace detail {

// Classic 14-node / 21-edge NSFNET T1 adjacency.
inline const std::vector<std::pair<NodeId, NodeId>>& nsfnet_edges() {
  static const std::vector<std::pair<NodeId, NodeId>> edges = {
      {0, 1},  {0, 2},   {0, 3},  {1, 2},   {1, 7},   {2, 5},   {3, 4},
      {3, 10}, {4, 5},   {4, 6},  {5, 9},   {5, 13},  {6, 7},   {7, 8},
      {8, 9},  {8, 11},  {8, 12}, {10, 11}, {10, 12}, {11, 13}, {12, 13}};
  return edges;
}

// 24-node / 37-edge pan-European-style reference mesh.
inline const std::vector<std::pair<NodeId, NodeId>>& geant2_edges() {
  static const std::vector<std::pair<NodeId, NodeId>> edges = {
      {0, 1},   {0, 2},   {1, 2},   {1, 3},   {2, 4},   {3, 5},   {4, 5},
      {4, 6},   {5, 7},   {6, 7},   {6, 8},   {7, 9},   {8, 9},   {8, 10},
      {9, 11},  {10, 11}, {10, 12}, {11, 13}, {12, 13}, {12, 14}, {13, 15},
      {14, 15}, {14, 16}, {15, 17}, {16, 17}, {16, 18}, {17, 19}, {18, 19},
      {18, 20}, {19, 21}, {20, 21}, {20, 22}, {21, 23}, {22, 23}, {2, 9},
      {7, 14},  {13, 20}};
  return edges;
}

inline NetworkGraph from_edge_pairs(std::size_t nodes,
                                    const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  std::vector<NetworkGraph::UndirectedEdge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs)
    edges.push_back({u, v, kNominalBandwidthHz, kNominalPowerW, kNominalPowerW});
  return NetworkGraph(nodes, edges);
}

}  // namespace detail

inline NetworkGraph nsfnet_topology() { return detail::from_edge_pairs(14, detail::nsfnet_edges()); }
inline NetworkGraph geant2_topology() { return detail::from_edge_pairs(24, detail::geant2_edges()); }

// Connected random graph: uniform spanning tree (random permutation, attach
// each node to a random earlier one), then distinct non-tree edges until the
// target count. Parameters drawn per edge: one bandwidth, one power per
// direction. Deterministic for equal arguments and seed.
inline NetworkGraph random_topology(std::size_t num_nodes, std::size_t num_undirected_edges,
                                    std::uint64_t seed, const LinkParamRanges& ranges = {}) {
  if (num_nodes < 2) throw ValidationError("random topology needs at least 2 nodes");
  const std::size_t max_edges = num_nodes * (num_nodes - 1) / 2;
  if (num_undirected_edges < num_nodes - 1 || num_undirected_edges > max_edges)
    throw ValidationError("infeasible edge count " + std::to_string(num_undirected_edges) +
                          " for " + std::to_string(num_nodes) + " nodes (need [" +
                          std::to_string(num_nodes - 1) + "," + std::to_string(max_edges) + "])");
  Rng rng(seed);
  std::vector<NodeId> perm(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) perm[i] = static_cast<NodeId>(i);
  for (std::size_t i = num_nodes - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(i + 1)]);

  std::set<std::pair<NodeId, NodeId>> used;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  auto canon = [](NodeId a, NodeId b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
  for (std::size_t i = 1; i < num_nodes; ++i) {
    const NodeId u = perm[i];
    const NodeId v = perm[rng.below(i)];
    used.insert(canon(u, v));
    pairs.emplace_back(u, v);
  }
  while (pairs.size() < num_undirected_edges) {
    const auto u = static_cast<NodeId>(rng.below(num_nodes));
    const auto v = static_cast<NodeId>(rng.below(num_nodes));
    if (u == v || used.count(canon(u, v))) continue;
    used.insert(canon(u, v));
    pairs.emplace_back(u, v);
  }

  std::vector<NetworkGraph::UndirectedEdge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs) {
    NetworkGraph::UndirectedEdge e;
    e.u = u;
    e.v = v;
    e.bandwidth_hz = rng.uniform(ranges.bandwidth_hz_lo, ranges.bandwidth_hz_hi);
    e.power_w_uv = rng.uniform(ranges.power_w_lo, ranges.power_w_hi);
    e.power_w_vu = rng.uniform(ranges.power_w_lo, ranges.power_w_hi);
    edges.push_back(e);
  }
  return NetworkGraph(num_nodes, edges);
}

// Redraws every link parameter on an existing structure (same node and edge
// sets). Used by scenarios that vary capacities across seeds.
inline NetworkGraph redraw_link_params(const NetworkGraph& g, std::uint64_t seed,
                                       const LinkParamRanges& ranges = {}) {
  Rng rng(seed);
  std::vector<NetworkGraph::UndirectedEdge> edges;
  edges.reserve(g.undirected_edge_count());
  for (LinkId l = 0; l < g.link_count(); l += 2) {
    const Link& fwd = g.link(l);
    NetworkGraph::UndirectedEdge e;
    e.u = fwd.tail;
    e.v = fwd.head;
    e.bandwidth_hz = rng.uniform(ranges.bandwidth_hz_lo, ranges.bandwidth_hz_hi);
    e.power_w_uv = rng.uniform(ranges.power_w_lo, ranges.power_w_hi);
    e.power_w_vu = rng.uniform(ranges.power_w_lo, ranges.power_w_hi);
    edges.push_back(e);
  }
  return NetworkGraph(g.node_count(), edges);
}

// --- JSON file formats -----------------------------------------------------
//
// Topology: { "nodes": int,
//             "edges": [ {"u": int, "v": int, "bandwidth_hz": f,
//                         "power_w_uv": f, "power_w_vu": f} ] }
// Flows:    [ {"src": int, "dst": int, "lambda": f, "demand_pps": f} ]

inline nlohmann::json topology_to_json(const NetworkGraph& g) {
  nlohmann::json j;
  j["nodes"] = g.node_count();
  auto& edges = j["edges"] = nlohmann::json::array();
  for (LinkId l = 0; l < g.link_count(); l += 2) {
    const Link& fwd = g.link(l);
    const Link& rev = g.link(NetworkGraph::reverse(l));
    edges.push_back({{"u", fwd.tail},
                     {"v", fwd.head},
                     {"bandwidth_hz", fwd.bandwidth_hz},
                     {"power_w_uv", fwd.power_w},
                     {"power_w_vu", rev.power_w}});
  }
  return j;
}

inline NetworkGraph topology_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
    throw ValidationError("topology file must be an object with 'nodes' and 'edges'");
  std::vector<NetworkGraph::UndirectedEdge> edges;
  for (const auto& e : j.at("edges")) {
    NetworkGraph::UndirectedEdge ue;
    ue.u = e.at("u").get<NodeId>();
    ue.v = e.at("v").get<NodeId>();
    ue.bandwidth_hz = e.at("bandwidth_hz").get<double>();
    ue.power_w_uv = e.at("power_w_uv").get<double>();
    ue.power_w_vu = e.at("power_w_vu").get<double>();
    edges.push_back(ue);
  }
  return NetworkGraph(j.at("nodes").get<std::size_t>(), edges);
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": malformed JSON: " + e.what());
  }
  return j;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
}

// Loads a topology from an embedded name ("nsfnet", "geant2") or a JSON file.
inline NetworkGraph load_topology(const std::string& source) {
  if (source == "nsfnet") return nsfnet_topology();
  if (source == "geant2") return geant2_topology();
  try {
    return topology_from_json(read_json_file(source));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(source + ": bad topology file: " + e.what());
  }
}

inline nlohmann::json flows_to_json(const FlowSet& flows) {
  nlohmann::json j = nlohmann::json::array();
  for (const Flow& f : flows)
    j.push_back({{"src", f.src}, {"dst", f.dst}, {"lambda", f.lambda}, {"demand_pps", f.demand_pps}});
  return j;
}

inline FlowSet flows_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("flow file must be a JSON list");
  FlowSet flows;
  int id = 0;
  for (const auto& e : j) {
    Flow f;
    f.id = id++;
    f.src = e.at("src").get<NodeId>();
    f.dst = e.at("dst").get<NodeId>();
    f.lambda = e.value("lambda", 0.1);
    f.demand_pps = e.value("demand_pps", 1.0);
    flows.push_back(f);
  }
  return flows;
}

inline FlowSet load_flows(const std::string& path) {
  try {
    return flows_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": bad flow file: " + e.what());
  }
}

}  // namespace netopt
