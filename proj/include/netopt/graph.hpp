#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "netopt/errors.hpp"

namespace netopt {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);
inline constexpr LinkId kNoLink = static_cast<LinkId>(-1);

// One directed link. Bidirectional channels are stored as two directed links
// so the two receivers keep independent SINR parameters.
struct Link {
  NodeId tail = 0;
  NodeId head = 0;
  double bandwidth_hz = 0.0;  // B_l
  double power_w = 0.0;       // received signal power P_l at this link's receiver
};

// Immutable directed graph with dense node and link ids. Every undirected
// edge yields the directed pair (2k, 2k+1), so reverse(l) == l ^ 1.
// Construction validates connectivity, bidirectionality and positive link
// parameters; afterwards the graph is safe for unsynchronized shared reads.
class NetworkGraph {
public:
  struct UndirectedEdge {
    NodeId u = 0;
    NodeId v = 0;
    double bandwidth_hz = 0.0;
    double power_w_uv = 0.0;  // received power of the u->v link
    double power_w_vu = 0.0;  // received power of the v->u link
  };

  NetworkGraph(std::size_t num_nodes, const std::vector<UndirectedEdge>& edges) {
    if (num_nodes < 2) throw ValidationError("graph needs at least 2 nodes");
    out_.resize(num_nodes);
    links_.reserve(edges.size() * 2);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      const std::string tag = "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
      if (e.u >= num_nodes || e.v >= num_nodes)
        throw ValidationError(tag + ": endpoint out of range [0," + std::to_string(num_nodes) + ")");
      if (e.u == e.v) throw ValidationError(tag + ": self-loop");
      if (!(e.bandwidth_hz > 0.0)) throw ValidationError(tag + ": bandwidth must be > 0");
      if (!(e.power_w_uv > 0.0) || !(e.power_w_vu > 0.0))
        throw ValidationError(tag + ": received power must be > 0");
      if (index_.count(key(e.u, e.v)) || index_.count(key(e.v, e.u)))
        throw ValidationError(tag + ": duplicate edge");
      add_directed(e.u, e.v, e.bandwidth_hz, e.power_w_uv);
      add_directed(e.v, e.u, e.bandwidth_hz, e.power_w_vu);
    }
    check_connected();
  }

  std::size_t node_count() const { return out_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t undirected_edge_count() const { return links_.size() / 2; }

  const Link& link(LinkId l) const { return links_.at(l); }
  std::span<const Link> links() const { return links_; }
  std::span<const LinkId> out_links(NodeId v) const { return out_.at(v); }

  static LinkId reverse(LinkId l) { return l ^ 1u; }

  std::optional<LinkId> find_link(NodeId tail, NodeId head) const {
    auto it = index_.find(key(tail, head));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

private:
  static std::uint64_t key(NodeId tail, NodeId head) {
    return (static_cast<std::uint64_t>(tail) << 32) | head;
  }

  void add_directed(NodeId tail, NodeId head, double bw, double pw) {
    const LinkId id = static_cast<LinkId>(links_.size());
    links_.push_back({tail, head, bw, pw});
    out_[tail].push_back(id);
    index_.emplace(key(tail, head), id);
  }

  void check_connected() const {
    std::vector<char> seen(node_count(), 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop();
      for (LinkId l : out_[u]) {
        const NodeId v = links_[l].head;
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          q.push(v);
        }
      }
    }
    if (reached != node_count()) {
      for (NodeId v = 0; v < node_count(); ++v)
        if (!seen[v])
          throw ValidationError("graph is disconnected: node " + std::to_string(v) +
                                " unreachable from node 0");
    }
  }

  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_;
  std::unordered_map<std::uint64_t, LinkId> index_;
};

// One source->destination demand.
struct Flow {
  int id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double lambda = 0.0;      // hop-count regularization weight, >= 0
  double demand_pps = 0.0;  // offered load, packets per time step
};

using FlowSet = std::vector<Flow>;

// Simple path: node sequence plus the matching link sequence.
struct Path {
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;

  int hops() const { return static_cast<int>(links.size()); }

  bool operator==(const Path& other) const { return links == other.links && nodes == other.nodes; }
};

// Builds a Path from a node sequence, resolving and validating each link.
inline Path make_path(const NetworkGraph& g, const std::vector<NodeId>& nodes) {
  if (nodes.size() < 2) throw ValidationError("path needs at least 2 nodes");
  Path p;
  p.nodes = nodes;
  p.links.reserve(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    auto l = g.find_link(nodes[i], nodes[i + 1]);
    if (!l)
      throw ValidationError("no link (" + std::to_string(nodes[i]) + "," +
                            std::to_string(nodes[i + 1]) + ") in graph");
    p.links.push_back(*l);
  }
  return p;
}

// The selected path vector. Entries are absent before a flow's first
// allocation; readers that need the exclusion view pass the flow id to skip.
class PathAllocation {
public:
  PathAllocation() = default;
  explicit PathAllocation(std::size_t flow_count) : paths_(flow_count) {}

  std::size_t flow_count() const { return paths_.size(); }
  bool has(int flow) const { return paths_.at(flow).has_value(); }
  const Path& path(int flow) const { return paths_.at(flow).value(); }
  const std::optional<Path>& maybe_path(int flow) const { return paths_.at(flow); }
  void set(int flow, Path p) { paths_.at(flow) = std::move(p); }
  void reset(int flow) { paths_.at(flow).reset(); }

private:
  std::vector<std::optional<Path>> paths_;
};

// Per-flow diagnostics: endpoint existence, src != dst, dst reachable.
// Empty result means the flow set is valid for the graph.
inline std::vector<std::string> validate_flow_set(const NetworkGraph& g, const FlowSet& flows) {
  std::vector<std::string> errors;
  for (const Flow& f : flows) {
    const std::string tag = "flow " + std::to_string(f.id);
    if (f.src >= g.node_count()) {
      errors.push_back(tag + ": unknown source node " + std::to_string(f.src));
      continue;
    }
    if (f.dst >= g.node_count()) {
      errors.push_back(tag + ": unknown destination node " + std::to_string(f.dst));
      continue;
    }
    if (f.src == f.dst) {
      errors.push_back(tag + ": source equals destination");
      continue;
    }
    if (f.lambda < 0.0) errors.push_back(tag + ": lambda must be >= 0");
    if (f.demand_pps < 0.0) errors.push_back(tag + ": demand must be >= 0");
    // reachability by BFS (always true on connected graphs, but files may lie)
    std::vector<char> seen(g.node_count(), 0);
    std::queue<NodeId> q;
    q.push(f.src);
    seen[f.src] = 1;
    bool found = false;
    while (!q.empty() && !found) {
      const NodeId u = q.front();
      q.pop();
      for (LinkId l : g.out_links(u)) {
        const NodeId v = g.link(l).head;
        if (!seen[v]) {
          if (v == f.dst) {
            found = true;
            break;
          }
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    if (!found) errors.push_back(tag + ": destination unreachable from source");
  }
  return errors;
}

}  // namespace netopt
