// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run from the build directory; scratch output goes to a temp dir.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "netopt/experiments.hpp"

using namespace netopt;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("[%s] %s — %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// --- shared generators and oracles ------------------------------------------

struct Instance {
  NetworkGraph graph;
  WeightTable weights;
  NodeId src, dst;
};

Instance random_instance(std::uint64_t seed, std::size_t min_nodes, std::size_t max_nodes) {
  Rng rng(seed);
  const auto n = min_nodes + rng.below(max_nodes - min_nodes + 1);
  const auto max_e = n * (n - 1) / 2;
  const auto e = (n - 1) + rng.below(max_e - (n - 1) + 1);
  NetworkGraph g = random_topology(n, e, rng.next_u64());
  WeightTable wt;
  wt.w.resize(g.link_count());
  for (auto& w : wt.w) w = rng.unit();
  auto s = static_cast<NodeId>(rng.below(n));
  auto d = static_cast<NodeId>(rng.below(n));
  while (d == s) d = static_cast<NodeId>(rng.below(n));
  return {std::move(g), std::move(wt), s, d};
}

int bfs_hops(const NetworkGraph& g, NodeId s, NodeId d) {
  std::vector<int> dist(g.node_count(), -1);
  std::queue<NodeId> q;
  q.push(s);
  dist[s] = 0;
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (LinkId l : g.out_links(u)) {
      const NodeId v = g.link(l).head;
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist[d];
}

bool reachable_within(const NetworkGraph& g, const WeightTable& wt, NodeId s, NodeId d,
                      double threshold) {
  std::vector<char> seen(g.node_count(), 0);
  std::queue<NodeId> q;
  q.push(s);
  seen[s] = 1;
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    if (u == d) return true;
    for (LinkId l : g.out_links(u)) {
      const NodeId v = g.link(l).head;
      if (!seen[v] && wt.w[l] <= threshold) {
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  return false;
}

double widest_path_value(const NetworkGraph& g, const WeightTable& wt, NodeId s, NodeId d) {
  std::vector<double> t(wt.w);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::size_t lo = 0, hi = t.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (reachable_within(g, wt, s, d, t[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return t[lo];
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- criteria ---------------------------------------------------------------

// C1: exhaustive-search equality on 1,000 random graphs, four lambdas.
void criterion_oracle_equivalence() {
  const auto t0 = Clock::now();
  const double lambdas[] = {0.0, 0.05, 0.3, 1.5};
  int mismatches[4] = {0, 0, 0, 0};
  const int graphs = 1000;
  for (int i = 0; i < graphs; ++i) {
    const Instance inst = random_instance(mix_seed(0xC1, i), 4, 10);
    for (int k = 0; k < 4; ++k) {
      const RoutingResult got = rro_route(inst.graph, inst.weights, inst.src, inst.dst, lambdas[k]);
      const RoutingResult ref =
          brute_force_rmep(inst.graph, inst.weights, inst.src, inst.dst, lambdas[k]);
      if (got.regularized_cost != ref.regularized_cost) ++mismatches[k];
    }
  }
  const double elapsed = seconds_since(t0);
  const int total = mismatches[0] + mismatches[1] + mismatches[2] + mismatches[3];
  char detail[256];
  std::snprintf(detail, sizeof detail,
                "mismatches/1000 graphs: lambda 0: %d, 0.05: %d, 0.3: %d, 1.5: %d; %.1fs",
                mismatches[0], mismatches[1], mismatches[2], mismatches[3], elapsed);
  report("C1 oracle equivalence (exact, all lambdas)", total == 0 && elapsed < 60.0, detail);
}

// C2: degeneration to min-hop (lambda=2) and widest path (lambda=0).
void criterion_lambda_degeneration() {
  int hop_mismatch = 0, widest_mismatch = 0;
  for (int i = 0; i < 200; ++i) {
    const Instance inst = random_instance(mix_seed(0xC2, i), 4, 12);
    const RoutingResult high = rro_route(inst.graph, inst.weights, inst.src, inst.dst, 2.0);
    if (high.hop_count != bfs_hops(inst.graph, inst.src, inst.dst)) ++hop_mismatch;
    const RoutingResult low = rro_route(inst.graph, inst.weights, inst.src, inst.dst, 0.0);
    if (low.bottleneck_weight != widest_path_value(inst.graph, inst.weights, inst.src, inst.dst))
      ++widest_mismatch;
  }
  char detail[160];
  std::snprintf(detail, sizeof detail,
                "200 instances: min-hop mismatches %d, widest-path mismatches %d", hop_mismatch,
                widest_mismatch);
  report("C2 lambda degeneration", hop_mismatch == 0 && widest_mismatch == 0, detail);
}

// C3: operation-count bounds and linear scaling on a 2000-node graph.
void criterion_operation_bounds() {
  const std::size_t nodes = 2000, undirected = 5000;
  const NetworkGraph g = random_topology(nodes, undirected, 0xC3);
  const InterferenceMap imap(g.link_count(), 1e-3);
  Rng rng(0xC3C3);
  PathAllocation empty(0);

  // base flows, replicated so per-flow work is distributed identically at every N
  std::vector<std::pair<NodeId, NodeId>> base;
  for (int i = 0; i < 25; ++i) {
    auto s = static_cast<NodeId>(rng.below(nodes));
    auto d = static_cast<NodeId>(rng.below(nodes));
    while (d == s) d = static_cast<NodeId>(rng.below(nodes));
    base.push_back({s, d});
  }

  bool bounds_ok = true;
  auto run_batch = [&](int n) {
    for (int i = 0; i < n; ++i) {
      const auto [s, d] = base[i % base.size()];
      const auto weights = rate_to_weights(compute_link_rate_table(g, imap, empty, -1));
      SearchStats stats;
      rro_route(g, weights, s, d, 0.1, &stats);
      if (stats.extractions > g.node_count() || stats.edge_relaxations > g.link_count())
        bounds_ok = false;
    }
  };

  run_batch(25);  // warm-up
  double per_flow[4];
  double t100 = 0.0;
  const int sizes[4] = {25, 50, 100, 200};
  for (int k = 0; k < 4; ++k) {
    double best = 1e9;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      run_batch(sizes[k]);
      best = std::min(best, seconds_since(t0));
    }
    per_flow[k] = best / sizes[k];
    if (sizes[k] == 100) t100 = best;
  }
  double mean = (per_flow[0] + per_flow[1] + per_flow[2] + per_flow[3]) / 4.0;
  double max_dev = 0.0;
  for (double r : per_flow) max_dev = std::max(max_dev, std::abs(r - mean) / mean);

  char detail[256];
  std::snprintf(detail, sizeof detail,
                "|V|=%zu |E|=%zu; bounds %s; N=100 in %.3fs; per-flow ms {%.3f %.3f %.3f %.3f}, "
                "max dev %.0f%%",
                nodes, g.link_count(), bounds_ok ? "held" : "VIOLATED", t100, 1e3 * per_flow[0],
                1e3 * per_flow[1], 1e3 * per_flow[2], 1e3 * per_flow[3], 100.0 * max_dev);
  report("C3 operation bounds and linear scaling", bounds_ok && t100 < 1.0 && max_dev <= 0.25,
         detail);
}

// C4: weight-transform properties on 500 random rate tables.
void criterion_weight_transform() {
  Rng rng(0xC4);
  int violations = 0;
  for (int iter = 0; iter < 500; ++iter) {
    LinkRateTable rates;
    const auto n = 2 + rng.below(40);
    const bool degenerate = iter % 25 == 0;
    const double flat = rng.uniform(1e6, 1e8);
    for (std::size_t i = 0; i < n; ++i)
      rates.bps.push_back(degenerate ? flat : rng.uniform(1e6, 1e8));
    const WeightTable wt = rate_to_weights(rates);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(wt.w[i] >= 0.0 && wt.w[i] <= 1.0)) ++violations;
      for (std::size_t k = 0; k < n; ++k) {
        if (rates.bps[i] > rates.bps[k] && !(wt.w[i] < wt.w[k])) ++violations;
        if (rates.bps[i] == rates.bps[k] && wt.w[i] != wt.w[k]) ++violations;
      }
    }
    const auto lo = std::min_element(rates.bps.begin(), rates.bps.end()) - rates.bps.begin();
    const auto hi = std::max_element(rates.bps.begin(), rates.bps.end()) - rates.bps.begin();
    if (degenerate) {
      for (std::size_t i = 0; i < n; ++i)
        if (wt.w[i] != 0.0) ++violations;
    } else {
      if (wt.w[lo] != 1.0) ++violations;
      if (wt.w[hi] != 0.0) ++violations;
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof detail, "500 tables, %d violations", violations);
  report("C4 weight-transform properties", violations == 0, detail);
}

// C5: bounded queue at 0.8x bottleneck vs linear growth at 1.2x.
void criterion_stability_dichotomy() {
  // two-hop line; bottleneck service 2.5 packets/step
  std::vector<NetworkGraph::UndirectedEdge> edges = {{0, 1, 30e6, 0.1, 0.1},
                                                     {1, 2, 36e6, 0.1, 0.1}};
  const NetworkGraph g(3, edges);
  const InterferenceMap imap(g.link_count(), 0.1);
  PathAllocation alloc(1);
  alloc.set(0, make_path(g, {0, 1, 2}));
  SimConfig cfg;
  cfg.horizon = 10000;
  cfg.warmup = 0;

  auto run_with_demand = [&](double demand) {
    const FlowSet flows = {{0, 0, 2, 0.1, demand}};
    return run_simulation(g, imap, flows, alloc, cfg);
  };

  // 0.8x: bounded within 2 packets of the early steady level for the whole horizon
  const SimReport light = run_with_demand(0.8 * 2.5);
  long long offset = 0;
  for (int t = 0; t < 100; ++t) offset = std::max(offset, light.max_queue_series[t]);
  bool bounded = true;
  long long peak = 0;
  for (long long v : light.max_queue_series) {
    peak = std::max(peak, v);
    if (v > offset + 2) bounded = false;
  }

  // 1.2x: linear growth at slope demand - service, within 1 packet per 1000 steps
  const SimReport heavy = run_with_demand(1.2 * 2.5);
  const int h = cfg.horizon;
  const double slope =
      static_cast<double>(heavy.max_queue_series[h - 1] - heavy.max_queue_series[h / 2 - 1]) /
      (h - h / 2);
  const double excess = 1.2 * 2.5 - 2.5;
  const bool linear = std::abs(slope - excess) <= 1e-3;

  char detail[192];
  std::snprintf(detail, sizeof detail,
                "0.8x: peak %lld vs offset %lld (bounded %s); 1.2x: slope %.5f vs excess %.5f",
                peak, offset, bounded ? "yes" : "NO", slope, excess);
  report("C5 simulator stability dichotomy", bounded && linear, detail);
}

// C6: qualitative ordering on the heavy random shape (N=30, V=25, E=40).
void criterion_ordering() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.name = "heavy-random";
  cfg.topology.kind = TopologySpec::Kind::kRandom;
  cfg.topology.nodes = 25;
  cfg.topology.edges = 40;
  cfg.flow_counts = {30};
  cfg.seed_count = 20;
  cfg.seed_base = 1;
  const ScenarioResult res = run_scenario_grid(cfg);
  const double elapsed = seconds_since(t0);

  const auto cell = [&](Algorithm a) {
    for (std::size_t i = 0; i < res.algorithms.size(); ++i)
      if (res.algorithms[i] == a) return res.cells[0][i];
    throw ValidationError("algorithm missing from scenario");
  };
  const ScenarioCell rro = cell(Algorithm::kRro), ima = cell(Algorithm::kIma),
                     ospf = cell(Algorithm::kOspf), rga = cell(Algorithm::kRga);

  const bool rate_order = rro.avg_rate_mbps > ima.avg_rate_mbps &&
                          ima.avg_rate_mbps > ospf.avg_rate_mbps &&
                          rro.avg_rate_mbps > rga.avg_rate_mbps;
  const bool delay_lowest = rro.avg_delay_steps < ima.avg_delay_steps &&
                            rro.avg_delay_steps < ospf.avg_delay_steps &&
                            rro.avg_delay_steps < rga.avg_delay_steps;

  char detail[256];
  std::snprintf(detail, sizeof detail,
                "rate Mbps RRO %.3f IMA %.3f OSPF %.3f RGA %.3f; delay steps RRO %.2f IMA %.2f "
                "OSPF %.2f RGA %.2f; %.0fs",
                rro.avg_rate_mbps, ima.avg_rate_mbps, ospf.avg_rate_mbps, rga.avg_rate_mbps,
                rro.avg_delay_steps, ima.avg_delay_steps, ospf.avg_delay_steps,
                rga.avg_delay_steps, elapsed);
  report("C6 mean-metric ordering on the heavy random shape",
         rate_order && delay_lowest && elapsed < 300.0, detail);
}

// C7: queue study on the 14-node network, N=10, default config.
void criterion_queue_study() {
  ExperimentConfig cfg;
  cfg.topology.kind = TopologySpec::Kind::kEmbedded;
  cfg.topology.name = "nsfnet";
  cfg.flow_counts = {10};
  const auto series = queue_study_series(cfg, 10);

  const auto& rro = series.at(Algorithm::kRro);
  const int h = static_cast<int>(rro.size());
  const int q3 = h - h / 4;  // final quartile start

  long long rro_head = 0, rro_tail = 0;
  for (int t = 0; t < q3; ++t) rro_head = std::max(rro_head, rro[t]);
  for (int t = q3; t < h; ++t) rro_tail = std::max(rro_tail, rro[t]);
  const bool rro_bounded = rro_tail <= rro_head + 2;

  auto diverging = [&](const std::vector<long long>& s) {
    for (int t = q3 + 1; t < h; ++t)
      if (s[t] < s[t - 1]) return false;  // must be non-decreasing throughout
    return s[h - 1] > s[q3];
  };
  std::string who;
  for (Algorithm a : {Algorithm::kIma, Algorithm::kOspf, Algorithm::kRga})
    if (diverging(series.at(a))) who += (who.empty() ? "" : ",") + algorithm_name(a);

  char detail[224];
  std::snprintf(detail, sizeof detail,
                "RRO tail max %lld vs head max %lld (bounded %s); diverging baselines: %s",
                rro_tail, rro_head, rro_bounded ? "yes" : "NO",
                who.empty() ? "none" : who.c_str());
  report("C7 queue study: stable search vs diverging baseline", rro_bounded && !who.empty(),
         detail);
}

// C8: bit-identical CSVs when re-running a scenario from its manifest.
void criterion_determinism() {
  ExperimentConfig cfg;
  cfg.name = "repro";
  cfg.topology.kind = TopologySpec::Kind::kEmbedded;
  cfg.topology.name = "nsfnet";
  cfg.flow_counts = {4, 8};
  cfg.seed_count = 3;
  cfg.seed_base = 5;
  cfg.sim.horizon = 500;
  cfg.sim.warmup = 50;
  cfg.sim.arrivals = ArrivalModel::kBernoulli;

  const auto base = std::filesystem::temp_directory_path() / "netopt_acceptance";
  const auto dir1 = base / "run1";
  const auto dir2 = base / "run2";
  std::filesystem::remove_all(base);
  run_scenario(cfg, dir1.string());
  const ExperimentConfig replay = config_from_json(read_json_file((dir1 / "manifest.json").string()));
  run_scenario(replay, dir2.string());

  bool identical = true;
  for (const char* f : {"avg_rate.csv", "avg_delay.csv", "fairness.csv"})
    identical = identical && !slurp(dir1 / f).empty() && slurp(dir1 / f) == slurp(dir2 / f);
  report("C8 manifest re-run reproduces bit-identical CSVs", identical,
         identical ? "3 CSVs byte-equal" : "byte mismatch");
}

}  // namespace

int main() {
  criterion_oracle_equivalence();
  criterion_lambda_degeneration();
  criterion_operation_bounds();
  criterion_weight_transform();
  criterion_stability_dichotomy();
  criterion_ordering();
  criterion_queue_study();
  criterion_determinism();
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
