// netopt: route allocation experiments from the command line.
//
//   netopt gen    --nodes V --edges E --seed S [--out topo.json]
//   netopt route  --topology <file|nsfnet|geant2> --flows flows.json
//                 --algo rro [--lambda 0.1] [--imap map.json] [--rounds 3]
//   netopt run    --config scenario.json [--out dir]
//   netopt queues --config scenario.json --flows N [--out dir]
//
// Exit codes: 0 success, 1 validation error, 2 no route found.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "netopt/experiments.hpp"

namespace {

using namespace netopt;

int cmd_gen(const std::string& out, std::size_t nodes, std::size_t edges, std::uint64_t seed,
            const LinkParamRanges& ranges) {
  const NetworkGraph g = random_topology(nodes, edges, seed, ranges);
  const nlohmann::json j = topology_to_json(g);
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_json_file(out, j);
  return 0;
}

int cmd_route(const std::string& topology, const std::string& flows_path, const std::string& algo,
              double lambda, bool lambda_set, const std::string& imap_path, int rounds,
              std::uint64_t seed, int rga_trials) {
  const NetworkGraph g = load_topology(topology);
  FlowSet flows = load_flows(flows_path);
  if (lambda_set)
    for (Flow& f : flows) f.lambda = lambda;
  if (const auto errors = validate_flow_set(g, flows); !errors.empty()) {
    for (const auto& e : errors) std::cerr << "error: " << e << '\n';
    return 1;
  }
  const InterferenceMap imap = imap_path.empty()
                                   ? InterferenceMap(g.link_count(), 1e-3)
                                   : load_interference_map(imap_path, g);
  const Algorithm algorithm = parse_algorithm(algo);
  auto [alloc, trace] = allocate_all(g, imap, flows, algorithm, rounds, seed);

  nlohmann::json out;
  out["algorithm"] = algorithm_name(algorithm);
  out["rounds_run"] = trace.rounds_run;
  out["converged"] = trace.converged;
  auto& jflows = out["flows"] = nlohmann::json::array();
  const auto rates = analytic_flow_rates(g, imap, alloc);
  for (const Flow& f : flows) {
    const Path& p = alloc.path(f.id);
    const TraceEntry* last = nullptr;
    for (const auto& e : trace.entries)
      if (e.flow == f.id) last = &e;
    jflows.push_back({{"id", f.id},
                      {"src", f.src},
                      {"dst", f.dst},
                      {"path", p.nodes},
                      {"hops", p.hops()},
                      {"objective_cost", last ? last->objective_cost : 0.0},
                      {"analytic_rate_bps", rates[f.id]}});
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-flow routing optimization experiments"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random connected topology");
  std::size_t gen_nodes = 0, gen_edges = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  LinkParamRanges ranges;
  gen->add_option("--nodes", gen_nodes, "node count")->required();
  gen->add_option("--edges", gen_edges, "undirected edge count")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output file (default: stdout)");
  gen->add_option("--bandwidth-lo", ranges.bandwidth_hz_lo, "bandwidth draw lower bound, Hz");
  gen->add_option("--bandwidth-hi", ranges.bandwidth_hz_hi, "bandwidth draw upper bound, Hz");
  gen->add_option("--power-lo", ranges.power_w_lo, "received power draw lower bound, W");
  gen->add_option("--power-hi", ranges.power_w_hi, "received power draw upper bound, W");

  // route
  auto* route = app.add_subcommand("route", "one-shot allocation, JSON to stdout");
  std::string route_topology, route_flows, route_algo = "rro", route_imap;
  double route_lambda = 0.1;
  int route_rounds = 3, route_trials = 10;
  std::uint64_t route_seed = 0;
  route->add_option("--topology", route_topology, "topology file or embedded name")->required();
  route->add_option("--flows", route_flows, "flow file (JSON list)")->required();
  route->add_option("--algo", route_algo, "rro | ima | ospf | rga");
  auto* lambda_opt = route->add_option("--lambda", route_lambda, "override every flow's lambda");
  route->add_option("--imap", route_imap, "interference map file (default: no interference)");
  route->add_option("--rounds", route_rounds, "allocation passes");
  route->add_option("--seed", route_seed, "seed (rga trials)");
  route->add_option("--rga-trials", route_trials, "random trials for rga");

  // run
  auto* run = app.add_subcommand("run", "run a scenario config, emit CSVs + manifest");
  std::string run_config, run_out = "out";
  run->add_option("--config", run_config, "scenario config JSON")->required();
  run->add_option("--out", run_out, "output directory");

  // queues
  auto* queues = app.add_subcommand("queues", "max-queue time series for one flow count");
  std::string q_config, q_out = "out";
  int q_flows = 0;
  queues->add_option("--config", q_config, "scenario config JSON")->required();
  queues->add_option("--flows", q_flows, "flow count N (must be in the config's list)")->required();
  queues->add_option("--out", q_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_out, gen_nodes, gen_edges, gen_seed, ranges);
    if (route->parsed())
      return cmd_route(route_topology, route_flows, route_algo, route_lambda,
                       lambda_opt->count() > 0, route_imap, route_rounds, route_seed,
                       route_trials);
    if (run->parsed()) {
      const ExperimentConfig cfg = config_from_json(read_json_file(run_config));
      run_scenario(cfg, run_out);
      std::cout << "wrote avg_rate.csv, avg_delay.csv, fairness.csv, manifest.json to " << run_out
                << '\n';
      return 0;
    }
    if (queues->parsed()) {
      const ExperimentConfig cfg = config_from_json(read_json_file(q_config));
      queue_study(cfg, q_flows, q_out);
      std::cout << "wrote max_queue_n" << q_flows << ".csv, manifest.json to " << q_out << '\n';
      return 0;
    }
  } catch (const netopt::NoPathError& e) {
    std::cerr << "no-path error: " << e.what() << '\n';
    return 2;
  } catch (const netopt::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
