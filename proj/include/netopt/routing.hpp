#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "netopt/graph.hpp"
#include "netopt/interference.hpp"
#include "netopt/rng.hpp"

namespace netopt {

struct RoutingResult {
  Path path;
  double regularized_cost = 0.0;   // objective value under the producing algorithm
  double bottleneck_weight = 0.0;  // max link weight along the path (weight-based searches)
  int hop_count = 0;
};

// Search instrumentation. `settled` is filled only when a stats pointer is
// passed; extraction and relaxation counters are always cheap.
struct SearchStats {
  struct Label {
    NodeId node;
    double d;  // regularized distance
    double m;  // max weight on the stored path
    double h;  // accumulated hop cost (units of lambda)
    int hops;
  };
  std::size_t extractions = 0;       // nodes settled, destination included
  std::size_t edge_relaxations = 0;  // relaxation attempts toward unsettled nodes
  std::vector<Label> settled;        // in settlement order
};

struct PathCost {
  double bottleneck = 0.0;
  int hops = 0;
  double regularized = 0.0;
};

// Objective of a concrete path: bottleneck = max link weight; the hop term
// accumulates lambda once per hop (same left-to-right addition order as the
// search, so costs compare bitwise against search results).
inline PathCost path_cost(const Path& path, const WeightTable& weights, double lambda) {
  PathCost c;
  double hop_term = 0.0;
  for (LinkId l : path.links) {
    if (l >= weights.w.size()) throw ValidationError("path uses unknown link " + std::to_string(l));
    c.bottleneck = std::max(c.bottleneck, weights.w[l]);
    hop_term += lambda;
  }
  c.hops = path.hops();
  c.regularized = c.bottleneck + hop_term;
  return c;
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// min-heap entry ordered by (distance, node index); the index part makes
// frontier extraction deterministic under ties.
using HeapEntry = std::pair<double, NodeId>;
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>>;

inline void check_endpoints(const NetworkGraph& g, NodeId src, NodeId dst) {
  if (src >= g.node_count() || dst >= g.node_count())
    throw ValidationError("route endpoints outside the graph");
  if (src == dst) throw ValidationError("source equals destination");
}

inline Path unfold_path(const NetworkGraph& g, const std::vector<NodeId>& pred,
                        const std::vector<LinkId>& pred_link, NodeId src, NodeId dst) {
  Path p;
  for (NodeId v = dst; v != src; v = pred[v]) {
    p.nodes.push_back(v);
    p.links.push_back(pred_link[v]);
  }
  p.nodes.push_back(src);
  std::reverse(p.nodes.begin(), p.nodes.end());
  std::reverse(p.links.begin(), p.links.end());
  return p;
}

}  // namespace detail

// Regularized routing search: label-setting over the regularized distance
// d(v) = m(v) + h(v), where m is the running max link weight and h counts
// lambda per hop. Relaxation accepts strictly smaller d only; equal-distance
// frontier ties extract the lowest node index; the search stops as soon as
// the destination settles.
//
// Exact for lambda = 0 (pure bottleneck) and lambda > 1 with weights in
// [0,1] (hop count dominates). For intermediate lambda the single label per
// node makes this a high-quality heuristic: a kept label can shadow one that
// would have extended better downstream, so results can exceed the optimum
// (never undercut it). See tests/test_routing.cpp for a pinned instance.
inline RoutingResult rro_route(const NetworkGraph& g, const WeightTable& weights, NodeId src,
                               NodeId dst, double lambda, SearchStats* stats = nullptr) {
  detail::check_endpoints(g, src, dst);
  if (weights.w.size() != g.link_count())
    throw ValidationError("weight table does not cover the graph");
  if (lambda < 0.0) throw ValidationError("lambda must be >= 0");

  const std::size_t n = g.node_count();
  std::vector<double> dist(n, detail::kInf), maxw(n, 0.0), hopcost(n, 0.0);
  std::vector<int> hops(n, 0);
  std::vector<NodeId> pred(n, kNoNode);
  std::vector<LinkId> pred_link(n, kNoLink);
  std::vector<char> settled(n, 0);

  dist[src] = 0.0;
  detail::MinHeap frontier;
  frontier.push({0.0, src});

  while (!frontier.empty()) {
    const auto [du, u] = frontier.top();
    frontier.pop();
    if (settled[u] || du > dist[u]) continue;  // stale lazy-deletion entry
    settled[u] = 1;
    if (stats) {
      ++stats->extractions;
      stats->settled.push_back({u, dist[u], maxw[u], hopcost[u], hops[u]});
    }
    if (u == dst) break;
    for (LinkId l : g.out_links(u)) {
      const NodeId v = g.link(l).head;
      if (settled[v]) continue;
      if (stats) ++stats->edge_relaxations;
      const double m_new = std::max(maxw[u], weights.w[l]);
      const double h_new = hopcost[u] + lambda;
      const double d_new = m_new + h_new;
      if (d_new < dist[v]) {
        dist[v] = d_new;
        maxw[v] = m_new;
        hopcost[v] = h_new;
        hops[v] = hops[u] + 1;
        pred[v] = u;
        pred_link[v] = l;
        frontier.push({d_new, v});
      }
    }
  }

  if (!settled[dst])
    throw NoPathError("no path from " + std::to_string(src) + " to " + std::to_string(dst));

  RoutingResult res;
  res.path = detail::unfold_path(g, pred, pred_link, src, dst);
  res.regularized_cost = dist[dst];
  res.bottleneck_weight = maxw[dst];
  res.hop_count = hops[dst];
  return res;
}

// Minimum-hop routing (unit edge cost), same frontier tie-breaking as the
// regularized search. Cost fields report the hop count.
inline RoutingResult ospf_route(const NetworkGraph& g, NodeId src, NodeId dst,
                                SearchStats* stats = nullptr) {
  detail::check_endpoints(g, src, dst);
  const std::size_t n = g.node_count();
  constexpr int kUnreached = std::numeric_limits<int>::max();
  std::vector<int> dist(n, kUnreached);
  std::vector<NodeId> pred(n, kNoNode);
  std::vector<LinkId> pred_link(n, kNoLink);
  std::vector<char> settled(n, 0);

  dist[src] = 0;
  std::priority_queue<std::pair<int, NodeId>, std::vector<std::pair<int, NodeId>>,
                      std::greater<std::pair<int, NodeId>>>
      frontier;
  frontier.push({0, src});
  while (!frontier.empty()) {
    const auto [du, u] = frontier.top();
    frontier.pop();
    if (settled[u] || du > dist[u]) continue;
    settled[u] = 1;
    if (stats) {
      ++stats->extractions;
      stats->settled.push_back({u, double(dist[u]), 0.0, double(dist[u]), dist[u]});
    }
    if (u == dst) break;
    for (LinkId l : g.out_links(u)) {
      const NodeId v = g.link(l).head;
      if (settled[v]) continue;
      if (stats) ++stats->edge_relaxations;
      if (du + 1 < dist[v]) {
        dist[v] = du + 1;
        pred[v] = u;
        pred_link[v] = l;
        frontier.push({dist[v], v});
      }
    }
  }
  if (!settled[dst])
    throw NoPathError("no path from " + std::to_string(src) + " to " + std::to_string(dst));

  RoutingResult res;
  res.path = detail::unfold_path(g, pred, pred_link, src, dst);
  res.hop_count = dist[dst];
  res.regularized_cost = dist[dst];
  res.bottleneck_weight = 0.0;
  return res;
}

// Interference-minimizing baseline: Dijkstra with additive per-link cost
// equal to the interference power absorbed at that link's receiver given the
// other flows' allocation. Equal-interference ties fall back to hop count
// (sparse maps leave most paths at zero cost, where an interference-only
// label would wander), then to node index. Cost field reports the path's
// summed interference.
inline RoutingResult ima_route(const NetworkGraph& g, const InterferenceMap& imap,
                               const PathAllocation& alloc, int exclude_flow, NodeId src,
                               NodeId dst) {
  detail::check_endpoints(g, src, dst);
  if (imap.link_count() != g.link_count())
    throw ValidationError("interference map link count does not match graph");
  const auto uses = link_usage(alloc, exclude_flow, g.link_count());
  std::vector<double> cost(g.link_count());
  for (LinkId l = 0; l < g.link_count(); ++l) cost[l] = interference_from_usage(imap, uses, l);

  const std::size_t n = g.node_count();
  std::vector<double> dist(n, detail::kInf);
  std::vector<int> hops(n, 0);
  std::vector<NodeId> pred(n, kNoNode);
  std::vector<LinkId> pred_link(n, kNoLink);
  std::vector<char> settled(n, 0);
  dist[src] = 0.0;
  using Entry = std::tuple<double, int, NodeId>;  // (interference, hops, node)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> frontier;
  frontier.push({0.0, 0, src});
  while (!frontier.empty()) {
    const auto [du, hu, u] = frontier.top();
    frontier.pop();
    if (settled[u] || du > dist[u] || (du == dist[u] && hu > hops[u])) continue;
    settled[u] = 1;
    if (u == dst) break;
    for (LinkId l : g.out_links(u)) {
      const NodeId v = g.link(l).head;
      if (settled[v]) continue;
      const double d_new = dist[u] + cost[l];
      const int h_new = hops[u] + 1;
      if (d_new < dist[v] || (d_new == dist[v] && h_new < hops[v])) {
        dist[v] = d_new;
        hops[v] = h_new;
        pred[v] = u;
        pred_link[v] = l;
        frontier.push({d_new, h_new, v});
      }
    }
  }
  if (!settled[dst])
    throw NoPathError("no path from " + std::to_string(src) + " to " + std::to_string(dst));

  RoutingResult res;
  res.path = detail::unfold_path(g, pred, pred_link, src, dst);
  res.regularized_cost = dist[dst];
  res.bottleneck_weight = 0.0;
  res.hop_count = res.path.hops();
  return res;
}

// Randomized greedy baseline: `trials` loop-erased random walks from src
// (restarting when a trial exceeds 50*|V| steps), best trial under the
// regularized objective wins. Deterministic for a given seed.
inline RoutingResult rga_route(const NetworkGraph& g, const WeightTable& weights, NodeId src,
                               NodeId dst, double lambda, int trials, std::uint64_t seed) {
  detail::check_endpoints(g, src, dst);
  if (trials < 1) throw ValidationError("trial count must be >= 1");
  if (weights.w.size() != g.link_count())
    throw ValidationError("weight table does not cover the graph");

  Rng rng(seed);
  const std::size_t step_budget = 50 * g.node_count();
  bool have_best = false;
  RoutingResult best;

  for (int t = 0; t < trials; ++t) {
    std::vector<NodeId> walk{src};
    std::vector<LinkId> walk_links;
    std::vector<char> on_walk(g.node_count(), 0);
    on_walk[src] = 1;
    bool complete = false;
    for (std::size_t step = 0; step < step_budget; ++step) {
      const NodeId u = walk.back();
      const auto out = g.out_links(u);
      if (out.empty()) {  // dead end: restart the walk from the source
        for (NodeId w : walk) on_walk[w] = 0;
        walk.assign(1, src);
        walk_links.clear();
        on_walk[src] = 1;
        continue;
      }
      const LinkId l = out[rng.below(out.size())];
      const NodeId v = g.link(l).head;
      if (on_walk[v]) {
        // loop erasure: truncate back to the first visit of v
        while (walk.back() != v) {
          on_walk[walk.back()] = 0;
          walk.pop_back();
          walk_links.pop_back();
        }
        continue;
      }
      walk.push_back(v);
      walk_links.push_back(l);
      on_walk[v] = 1;
      if (v == dst) {
        complete = true;
        break;
      }
    }
    if (!complete) continue;
    Path p;
    p.nodes = walk;
    p.links = walk_links;
    const PathCost c = path_cost(p, weights, lambda);
    if (!have_best || c.regularized < best.regularized_cost) {
      best.path = std::move(p);
      best.regularized_cost = c.regularized;
      best.bottleneck_weight = c.bottleneck;
      best.hop_count = c.hops;
      have_best = true;
    }
  }
  if (!have_best)
    throw NoPathError("no path from " + std::to_string(src) + " to " + std::to_string(dst) +
                      " found in " + std::to_string(trials) + " random trials");
  return best;
}

// Exhaustive reference: enumerates every simple src->dst path by DFS and
// returns the minimum regularized objective. Guarded to small graphs; the
// objective is evaluated with the same accumulation order as the search so
// equal costs compare exactly.
inline RoutingResult brute_force_rmep(const NetworkGraph& g, const WeightTable& weights,
                                      NodeId src, NodeId dst, double lambda) {
  detail::check_endpoints(g, src, dst);
  if (g.node_count() > 12)
    throw ValidationError("exhaustive search refused for more than 12 nodes");
  if (weights.w.size() != g.link_count())
    throw ValidationError("weight table does not cover the graph");

  std::vector<char> on_path(g.node_count(), 0);
  std::vector<NodeId> nodes{src};
  std::vector<LinkId> links;
  bool found = false;
  RoutingResult best;

  auto consider = [&]() {
    Path p;
    p.nodes = nodes;
    p.links = links;
    const PathCost c = path_cost(p, weights, lambda);
    if (!found || c.regularized < best.regularized_cost) {
      best.path = std::move(p);
      best.regularized_cost = c.regularized;
      best.bottleneck_weight = c.bottleneck;
      best.hop_count = c.hops;
      found = true;
    }
  };

  auto dfs = [&](auto&& self, NodeId u) -> void {
    if (u == dst) {
      consider();
      return;
    }
    on_path[u] = 1;
    for (LinkId l : g.out_links(u)) {
      const NodeId v = g.link(l).head;
      if (on_path[v]) continue;
      nodes.push_back(v);
      links.push_back(l);
      self(self, v);
      nodes.pop_back();
      links.pop_back();
    }
    on_path[u] = 0;
  };
  dfs(dfs, src);

  if (!found)
    throw NoPathError("no path from " + std::to_string(src) + " to " + std::to_string(dst));
  return best;
}

}  // namespace netopt
