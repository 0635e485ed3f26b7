#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netopt/graph.hpp"
#include "netopt/interference.hpp"
#include "netopt/routing.hpp"
#include "netopt/rng.hpp"
#include "netopt/simulator.hpp"
#include "netopt/topology.hpp"

namespace netopt {

enum class Algorithm { kRro, kIma, kOspf, kRga };

// Canonical ordering used for every emitted table.
inline constexpr Algorithm kCanonicalAlgorithms[] = {Algorithm::kRro, Algorithm::kIma,
                                                     Algorithm::kOspf, Algorithm::kRga};

inline std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kRro: return "RRO";
    case Algorithm::kIma: return "IMA";
    case Algorithm::kOspf: return "OSPF";
    case Algorithm::kRga: return "RGA";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string name) {
  for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (name == "RRO") return Algorithm::kRro;
  if (name == "IMA") return Algorithm::kIma;
  if (name == "OSPF") return Algorithm::kOspf;
  if (name == "RGA") return Algorithm::kRga;
  throw ValidationError("unknown algorithm '" + name + "' (expected RRO, IMA, OSPF or RGA)");
}

// N <= 0.5|V|: light; 0.5|V| < N <= |V|: moderate; beyond: heavy.
inline std::string load_class(int num_flows, std::size_t num_nodes) {
  if (num_flows <= 0.5 * static_cast<double>(num_nodes)) return "lightly-loaded";
  if (num_flows <= static_cast<double>(num_nodes)) return "moderately-loaded";
  return "heavily-loaded";
}

struct TopologySpec {
  enum class Kind { kEmbedded, kFile, kRandom };
  Kind kind = Kind::kEmbedded;
  std::string name = "nsfnet";  // embedded name or file path
  std::size_t nodes = 0;        // random only
  std::size_t edges = 0;        // random only, undirected
};

struct InterferenceParams {
  double sigma2_w = 1e-3;
  double gamma = 6.0;
  double p_int = 0.008;
};

struct DemandRange {
  double lo = 0.3;
  double hi = 1.2;
};

struct ExperimentConfig {
  std::string name = "scenario";
  TopologySpec topology;
  std::vector<int> flow_counts = {10};
  double lambda = 0.1;
  std::vector<Algorithm> algorithms = {Algorithm::kRro, Algorithm::kIma, Algorithm::kOspf,
                                       Algorithm::kRga};
  int seed_count = 20;
  std::uint64_t seed_base = 1;
  int rounds = 3;
  int rga_trials = 10;
  DemandRange demand;
  LinkParamRanges link_params;
  InterferenceParams interference;
  SimConfig sim;
  bool centralized = false;  // labeling only; the allocation loop is identical

  void validate() const {
    if (flow_counts.empty()) throw ValidationError("config needs at least one flow count");
    for (int n : flow_counts)
      if (n < 1) throw ValidationError("flow counts must be >= 1");
    if (seed_count < 1) throw ValidationError("seed count must be >= 1");
    if (rounds < 1) throw ValidationError("rounds must be >= 1");
    if (rga_trials < 1) throw ValidationError("rga trials must be >= 1");
    if (algorithms.empty()) throw ValidationError("config needs at least one algorithm");
    if (lambda < 0.0) throw ValidationError("lambda must be >= 0");
    if (!(demand.lo >= 0.0 && demand.hi >= demand.lo))
      throw ValidationError("demand range must satisfy 0 <= lo <= hi");
    sim.validate();
  }
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["name"] = c.name;
  nlohmann::json topo;
  switch (c.topology.kind) {
    case TopologySpec::Kind::kEmbedded:
      topo = {{"kind", "embedded"}, {"name", c.topology.name}};
      break;
    case TopologySpec::Kind::kFile:
      topo = {{"kind", "file"}, {"path", c.topology.name}};
      break;
    case TopologySpec::Kind::kRandom:
      topo = {{"kind", "random"}, {"nodes", c.topology.nodes}, {"edges", c.topology.edges}};
      break;
  }
  j["topology"] = topo;
  j["flow_counts"] = c.flow_counts;
  j["lambda"] = c.lambda;
  nlohmann::json algos = nlohmann::json::array();
  for (Algorithm a : c.algorithms) algos.push_back(algorithm_name(a));
  j["algorithms"] = algos;
  j["seeds"] = {{"count", c.seed_count}, {"base", c.seed_base}};
  j["rounds"] = c.rounds;
  j["rga_trials"] = c.rga_trials;
  j["demand_pps"] = {{"lo", c.demand.lo}, {"hi", c.demand.hi}};
  j["link_params"] = {{"bandwidth_hz", {c.link_params.bandwidth_hz_lo, c.link_params.bandwidth_hz_hi}},
                      {"power_w", {c.link_params.power_w_lo, c.link_params.power_w_hi}}};
  j["interference"] = {{"sigma2_w", c.interference.sigma2_w},
                       {"gamma", c.interference.gamma},
                       {"p_int", c.interference.p_int}};
  j["sim"] = {{"horizon", c.sim.horizon},
              {"warmup", c.sim.warmup},
              {"step_seconds", c.sim.step_seconds},
              {"packet_size_bits", c.sim.packet_size_bits},
              {"arrivals",
               c.sim.arrivals == ArrivalModel::kDeterministic ? "deterministic" : "bernoulli"},
              {"seed", c.sim.seed}};
  j["centralized"] = c.centralized;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    const std::string kind = t.value("kind", "embedded");
    if (kind == "embedded") {
      c.topology.kind = TopologySpec::Kind::kEmbedded;
      c.topology.name = t.value("name", "nsfnet");
    } else if (kind == "file") {
      c.topology.kind = TopologySpec::Kind::kFile;
      c.topology.name = t.at("path").get<std::string>();
    } else if (kind == "random") {
      c.topology.kind = TopologySpec::Kind::kRandom;
      c.topology.nodes = t.at("nodes").get<std::size_t>();
      c.topology.edges = t.at("edges").get<std::size_t>();
    } else {
      throw ValidationError("unknown topology kind '" + kind + "'");
    }
  }
  if (j.contains("flow_counts")) c.flow_counts = j.at("flow_counts").get<std::vector<int>>();
  c.lambda = j.value("lambda", c.lambda);
  if (j.contains("algorithms")) {
    std::set<Algorithm> requested;
    for (const auto& a : j.at("algorithms")) requested.insert(parse_algorithm(a.get<std::string>()));
    c.algorithms.clear();
    for (Algorithm a : kCanonicalAlgorithms)
      if (requested.count(a)) c.algorithms.push_back(a);
  }
  if (j.contains("seeds")) {
    c.seed_count = j.at("seeds").value("count", c.seed_count);
    c.seed_base = j.at("seeds").value("base", c.seed_base);
  }
  c.rounds = j.value("rounds", c.rounds);
  c.rga_trials = j.value("rga_trials", c.rga_trials);
  if (j.contains("demand_pps")) {
    c.demand.lo = j.at("demand_pps").value("lo", c.demand.lo);
    c.demand.hi = j.at("demand_pps").value("hi", c.demand.hi);
  }
  if (j.contains("link_params")) {
    const auto& lp = j.at("link_params");
    if (lp.contains("bandwidth_hz")) {
      c.link_params.bandwidth_hz_lo = lp.at("bandwidth_hz").at(0).get<double>();
      c.link_params.bandwidth_hz_hi = lp.at("bandwidth_hz").at(1).get<double>();
    }
    if (lp.contains("power_w")) {
      c.link_params.power_w_lo = lp.at("power_w").at(0).get<double>();
      c.link_params.power_w_hi = lp.at("power_w").at(1).get<double>();
    }
  }
  if (j.contains("interference")) {
    const auto& ip = j.at("interference");
    c.interference.sigma2_w = ip.value("sigma2_w", c.interference.sigma2_w);
    c.interference.gamma = ip.value("gamma", c.interference.gamma);
    c.interference.p_int = ip.value("p_int", c.interference.p_int);
  }
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    c.sim.horizon = s.value("horizon", c.sim.horizon);
    c.sim.warmup = s.value("warmup", c.sim.warmup);
    c.sim.step_seconds = s.value("step_seconds", c.sim.step_seconds);
    c.sim.packet_size_bits = s.value("packet_size_bits", c.sim.packet_size_bits);
    const std::string arrivals = s.value("arrivals", "deterministic");
    if (arrivals == "deterministic")
      c.sim.arrivals = ArrivalModel::kDeterministic;
    else if (arrivals == "bernoulli")
      c.sim.arrivals = ArrivalModel::kBernoulli;
    else
      throw ValidationError("unknown arrival model '" + arrivals + "'");
    c.sim.seed = s.value("seed", c.sim.seed);
  }
  c.centralized = j.value("centralized", c.centralized);
  c.validate();
  return c;
}

// --- Sequential allocation -------------------------------------------------

struct TraceEntry {
  int round = 0;
  int flow = 0;
  RoutingResult result;
  double objective_cost = 0.0;  // bottleneck + lambda*hops against the weights in force
  bool changed = false;         // differs from the flow's previous path
};

struct AllocationTrace {
  std::vector<TraceEntry> entries;
  int rounds_run = 0;
  bool converged = false;  // a full round left every path unchanged
};

// Allocates all flows with the chosen algorithm, in flow-id order, each flow
// routed against the latest allocation of the others (sequential update).
// Repeats up to `rounds` passes, stopping early once a pass changes nothing.
inline std::pair<PathAllocation, AllocationTrace> allocate_all(
    const NetworkGraph& g, const InterferenceMap& imap, const FlowSet& flows,
    Algorithm algorithm, int rounds, std::uint64_t seed, int rga_trials = 10) {
  if (rounds < 1) throw ValidationError("rounds must be >= 1");
  if (const auto errors = validate_flow_set(g, flows); !errors.empty())
    throw ValidationError("invalid flow set: " + errors.front());

  PathAllocation alloc(flows.size());
  AllocationTrace trace;
  for (int r = 0; r < rounds; ++r) {
    bool any_change = false;
    for (int n = 0; n < static_cast<int>(flows.size()); ++n) {
      const Flow& f = flows[n];
      const LinkRateTable table = compute_link_rate_table(g, imap, alloc, n);
      const WeightTable weights = rate_to_weights(table);
      RoutingResult res;
      try {
        switch (algorithm) {
          case Algorithm::kRro:
            res = rro_route(g, weights, f.src, f.dst, f.lambda);
            break;
          case Algorithm::kIma:
            res = ima_route(g, imap, alloc, n, f.src, f.dst);
            break;
          case Algorithm::kOspf:
            res = ospf_route(g, f.src, f.dst);
            break;
          case Algorithm::kRga:
            res = rga_route(g, weights, f.src, f.dst, f.lambda, rga_trials,
                            mix_seed(seed, static_cast<std::uint64_t>(r) * 100003 + n));
            break;
        }
      } catch (const NoPathError& e) {
        throw NoPathError("flow " + std::to_string(n) + ", round " + std::to_string(r) + ": " +
                          e.what());
      }
      TraceEntry entry;
      entry.round = r;
      entry.flow = n;
      entry.objective_cost = path_cost(res.path, weights, f.lambda).regularized;
      entry.changed = !alloc.has(n) || !(alloc.path(n) == res.path);
      any_change |= entry.changed;
      alloc.set(n, res.path);
      entry.result = std::move(res);
      trace.entries.push_back(std::move(entry));
    }
    trace.rounds_run = r + 1;
    if (!any_change) {
      trace.converged = true;
      break;
    }
  }
  return {std::move(alloc), std::move(trace)};
}

// Uniform flow endpoints: distinct ordered (s,d) pairs without replacement
// while the pair space allows, independent draws beyond.
inline FlowSet sample_flows(const NetworkGraph& g, int n, double lambda, const DemandRange& demand,
                            Rng& rng) {
  const std::size_t cap = g.node_count() * (g.node_count() - 1);
  const bool distinct = static_cast<std::size_t>(n) <= cap;
  std::set<std::pair<NodeId, NodeId>> seen;
  FlowSet flows;
  flows.reserve(n);
  while (static_cast<int>(flows.size()) < n) {
    const auto s = static_cast<NodeId>(rng.below(g.node_count()));
    const auto d = static_cast<NodeId>(rng.below(g.node_count()));
    if (s == d) continue;
    if (distinct && !seen.insert({s, d}).second) continue;
    Flow f;
    f.id = static_cast<int>(flows.size());
    f.src = s;
    f.dst = d;
    f.lambda = lambda;
    f.demand_pps = rng.uniform(demand.lo, demand.hi);
    flows.push_back(f);
  }
  return flows;
}

// --- Scenario orchestration ------------------------------------------------

struct ScenarioCell {
  double avg_rate_mbps = 0.0;
  double avg_delay_steps = 0.0;
  double fairness = 0.0;
};

struct ScenarioResult {
  std::vector<int> flow_counts;
  std::vector<Algorithm> algorithms;
  // cell[n_idx][algo_idx], already averaged over seeds
  std::vector<std::vector<ScenarioCell>> cells;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// One seed's world: structure with redrawn parameters plus a fresh map.
struct SeedEnvironment {
  NetworkGraph graph;
  InterferenceMap imap;
};

inline SeedEnvironment make_seed_environment(const NetworkGraph& base,
                                             const ExperimentConfig& cfg, std::uint64_t cfg_seed) {
  NetworkGraph graph = redraw_link_params(base, mix_seed(cfg_seed, 1), cfg.link_params);
  InterferenceMap imap =
      random_interference_map(graph, cfg.interference.sigma2_w, cfg.interference.gamma,
                              cfg.interference.p_int, mix_seed(cfg_seed, 2));
  return {std::move(graph), std::move(imap)};
}

inline NetworkGraph base_structure(const ExperimentConfig& cfg) {
  switch (cfg.topology.kind) {
    case TopologySpec::Kind::kEmbedded:
    case TopologySpec::Kind::kFile:
      return load_topology(cfg.topology.name);
    case TopologySpec::Kind::kRandom:
      return random_topology(cfg.topology.nodes, cfg.topology.edges,
                             mix_seed(cfg.seed_base, 0xA11), cfg.link_params);
  }
  throw ValidationError("bad topology spec");
}

}  // namespace detail

// Runs the full comparison grid: for every (seed, N, algorithm), fresh flow
// endpoints, demands, link parameters and interference map (identical across
// algorithms for a given seed and N), sequential allocation, then one
// simulation. Returns per-(N, algorithm) means over seeds.
inline ScenarioResult run_scenario_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  const NetworkGraph base = detail::base_structure(cfg);

  ScenarioResult result;
  result.flow_counts = cfg.flow_counts;
  result.algorithms = cfg.algorithms;
  result.cells.assign(cfg.flow_counts.size(),
                      std::vector<ScenarioCell>(cfg.algorithms.size()));

  for (int i = 0; i < cfg.seed_count; ++i) {
    const std::uint64_t cfg_seed = cfg.seed_base + 1 + static_cast<std::uint64_t>(i);
    const auto env = detail::make_seed_environment(base, cfg, cfg_seed);
    for (std::size_t ni = 0; ni < cfg.flow_counts.size(); ++ni) {
      const int n = cfg.flow_counts[ni];
      Rng flow_rng(mix_seed(cfg_seed, 3 + static_cast<std::uint64_t>(n)));
      const FlowSet flows = sample_flows(env.graph, n, cfg.lambda, cfg.demand, flow_rng);
      for (std::size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
        const Algorithm algo = cfg.algorithms[ai];
        auto [alloc, trace] = allocate_all(env.graph, env.imap, flows, algo, cfg.rounds,
                                           mix_seed(cfg_seed, 5), cfg.rga_trials);
        SimConfig sim = cfg.sim;
        sim.seed = mix_seed(cfg_seed, 6);
        const SimReport report = run_simulation(env.graph, env.imap, flows, alloc, sim);
        double rate_sum = 0.0;
        for (const auto& fs : report.flows) rate_sum += fs.analytic_rate_bps / 1e6;
        auto& cell = result.cells[ni][ai];
        cell.avg_rate_mbps += rate_sum / static_cast<double>(n);
        cell.avg_delay_steps += report.avg_delay_steps;
        cell.fairness += report.fairness;
      }
    }
  }
  for (auto& row : result.cells)
    for (auto& cell : row) {
      cell.avg_rate_mbps /= cfg.seed_count;
      cell.avg_delay_steps /= cfg.seed_count;
      cell.fairness /= cfg.seed_count;
    }
  return result;
}

inline std::string metrics_csv(const ScenarioResult& r,
                               double ScenarioCell::* metric) {
  std::string csv = "flows";
  for (Algorithm a : r.algorithms) csv += "," + algorithm_name(a);
  csv += "\n";
  for (std::size_t ni = 0; ni < r.flow_counts.size(); ++ni) {
    csv += std::to_string(r.flow_counts[ni]);
    for (std::size_t ai = 0; ai < r.algorithms.size(); ++ai)
      csv += "," + detail::format_double(r.cells[ni][ai].*metric);
    csv += "\n";
  }
  return csv;
}

// Scenario manifest: the resolved config (re-runnable as a config file) plus
// derived bookkeeping. Every random quantity in the run derives from the
// seeds recorded here.
inline nlohmann::json scenario_manifest(const ExperimentConfig& cfg, const NetworkGraph& base,
                                        const std::vector<std::string>& outputs) {
  nlohmann::json j = config_to_json(cfg);
  nlohmann::json meta;
  meta["topology_nodes"] = base.node_count();
  meta["topology_directed_links"] = base.link_count();
  nlohmann::json classes;
  for (int n : cfg.flow_counts) classes[std::to_string(n)] = load_class(n, base.node_count());
  meta["load_classes"] = classes;
  meta["outputs"] = outputs;
  nlohmann::json seeds = nlohmann::json::array();
  for (int i = 0; i < cfg.seed_count; ++i) seeds.push_back(cfg.seed_base + 1 + i);
  meta["config_seeds"] = seeds;
  meta["mode"] = cfg.centralized ? "centralized" : "distributed";
  j["manifest"] = meta;
  return j;
}

// Full scenario: compute the grid and emit one CSV per metric plus the
// manifest into `out_dir`.
inline ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::string& out_dir) {
  const ScenarioResult result = run_scenario_grid(cfg);
  std::filesystem::create_directories(out_dir);
  const std::vector<std::string> outputs = {"avg_rate.csv", "avg_delay.csv", "fairness.csv",
                                            "manifest.json"};
  write_text_file(out_dir + "/avg_rate.csv", metrics_csv(result, &ScenarioCell::avg_rate_mbps));
  write_text_file(out_dir + "/avg_delay.csv", metrics_csv(result, &ScenarioCell::avg_delay_steps));
  write_text_file(out_dir + "/fairness.csv", metrics_csv(result, &ScenarioCell::fairness));
  write_json_file(out_dir + "/manifest.json",
                  scenario_manifest(cfg, detail::base_structure(cfg), outputs));
  return result;
}

// Max-queue time series for one flow count: a single allocation and
// simulation per algorithm on the first seed's environment.
inline std::map<Algorithm, std::vector<long long>> queue_study_series(const ExperimentConfig& cfg,
                                                                      int num_flows) {
  cfg.validate();
  bool known = false;
  for (int n : cfg.flow_counts) known |= (n == num_flows);
  if (!known) throw ValidationError("flow count " + std::to_string(num_flows) +
                                    " is not in the configured list");
  const NetworkGraph base = detail::base_structure(cfg);
  const std::uint64_t cfg_seed = cfg.seed_base + 1;
  const auto env = detail::make_seed_environment(base, cfg, cfg_seed);
  Rng flow_rng(mix_seed(cfg_seed, 3 + static_cast<std::uint64_t>(num_flows)));
  const FlowSet flows = sample_flows(env.graph, num_flows, cfg.lambda, cfg.demand, flow_rng);

  std::map<Algorithm, std::vector<long long>> series;
  for (Algorithm algo : cfg.algorithms) {
    auto [alloc, trace] = allocate_all(env.graph, env.imap, flows, algo, cfg.rounds,
                                       mix_seed(cfg_seed, 5), cfg.rga_trials);
    SimConfig sim = cfg.sim;
    sim.seed = mix_seed(cfg_seed, 6);
    series[algo] = run_simulation(env.graph, env.imap, flows, alloc, sim).max_queue_series;
  }
  return series;
}

inline std::string queue_series_csv(const ExperimentConfig& cfg,
                                    const std::map<Algorithm, std::vector<long long>>& series) {
  std::string csv = "time_step";
  for (Algorithm a : cfg.algorithms) csv += "," + algorithm_name(a);
  csv += "\n";
  const std::size_t horizon = series.begin()->second.size();
  for (std::size_t t = 0; t < horizon; ++t) {
    csv += std::to_string(t);
    for (Algorithm a : cfg.algorithms) csv += "," + std::to_string(series.at(a)[t]);
    csv += "\n";
  }
  return csv;
}

inline void queue_study(const ExperimentConfig& cfg, int num_flows, const std::string& out_dir) {
  const auto series = queue_study_series(cfg, num_flows);
  std::filesystem::create_directories(out_dir);
  const std::string name = "max_queue_n" + std::to_string(num_flows) + ".csv";
  write_text_file(out_dir + "/" + name, queue_series_csv(cfg, series));
  write_json_file(out_dir + "/manifest.json",
                  scenario_manifest(cfg, detail::base_structure(cfg), {name, "manifest.json"}));
}

}  // namespace netopt
