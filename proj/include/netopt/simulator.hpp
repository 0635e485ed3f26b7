#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "netopt/graph.hpp"
#include "netopt/interference.hpp"
#include "netopt/rng.hpp"

namespace netopt {

enum class ArrivalModel { kDeterministic, kBernoulli };

struct SimConfig {
  int horizon = 2000;             // time steps
  int warmup = 100;               // delivery steps excluded from delay averaging
  double step_seconds = 1e-3;     // duration of one step
  double packet_size_bits = 12000;  // 1500 bytes
  ArrivalModel arrivals = ArrivalModel::kDeterministic;
  std::uint64_t seed = 0;         // consumed by Bernoulli arrivals only

  void validate() const {
    if (horizon <= 0) throw ValidationError("horizon must be > 0");
    if (warmup < 0 || warmup >= horizon) throw ValidationError("need horizon > warmup >= 0");
    if (!(step_seconds > 0.0)) throw ValidationError("step duration must be > 0");
    if (!(packet_size_bits > 0.0)) throw ValidationError("packet size must be > 0");
  }
};

struct FlowSimStats {
  double analytic_rate_bps = 0.0;  // bottleneck rate under the full allocation
  long long injected_packets = 0;
  long long delivered_packets = 0;
  double delivered_bits_per_step = 0.0;
  double mean_delay_steps = 0.0;  // over counted deliveries; 0 when none counted
};

struct SimReport {
  std::vector<FlowSimStats> flows;
  long long total_injected = 0;
  long long total_delivered = 0;
  long long final_in_queue = 0;
  double avg_delay_steps = 0.0;  // pooled over counted deliveries; horizon when none
  double fairness = 0.0;         // mean ln(analytic rate in Mbps, clamped)
  std::vector<long long> max_queue_series;  // per step, packets, end-of-step
};

// Bottleneck rate of every allocated flow under the full allocation: the
// flow's own view of each link rate (everyone else interfering), divided by
// the number of flows traversing the link, minimized along its path.
inline std::vector<double> analytic_flow_rates(const NetworkGraph& g, const InterferenceMap& imap,
                                               const PathAllocation& alloc) {
  const auto uses = link_usage(alloc, -1, g.link_count());
  std::vector<double> rates(alloc.flow_count(), 0.0);
  for (int n = 0; n < static_cast<int>(alloc.flow_count()); ++n) {
    if (!alloc.has(n)) throw ValidationError("flow " + std::to_string(n) + " has no allocated path");
    const LinkRateTable table = compute_link_rate_table(g, imap, alloc, n);
    double r = std::numeric_limits<double>::infinity();
    for (LinkId l : alloc.path(n).links) r = std::min(r, table.bps[l] / uses[l]);
    rates[n] = r;
  }
  return rates;
}

// Proportional-fairness metric: average natural log of the per-flow rate in
// Mbps, clamped below at 1e-6 Mbps so starved flows stay finite.
inline double fairness_avg_log_rate(const std::vector<double>& rates_bps) {
  if (rates_bps.empty()) throw ValidationError("fairness of an empty flow set");
  constexpr double kClampMbps = 1e-6;
  double sum = 0.0;
  for (double r : rates_bps) sum += std::log(std::max(r / 1e6, kClampMbps));
  return sum / static_cast<double>(rates_bps.size());
}

// Deterministic discrete-time packet simulator.
//
// Per step: (1) sources inject `demand` packets with fractional carry
// (optionally Bernoulli-jittered on the fractional part), (2) every link
// serves its backlogged resident flows an equal split of the link rate with
// per-queue fractional credit, at most one hop per packet per step,
// (3) forwarded packets join the next queue and deliveries record their
// delay. Link rates come from the full allocation once (quasi-static).
inline SimReport run_simulation(const NetworkGraph& g, const InterferenceMap& imap,
                                const FlowSet& flows, const PathAllocation& alloc,
                                const SimConfig& cfg) {
  cfg.validate();
  if (alloc.flow_count() != flows.size())
    throw ValidationError("allocation and flow set sizes differ");
  const int num_flows = static_cast<int>(flows.size());
  for (int n = 0; n < num_flows; ++n)
    if (!alloc.has(n)) throw ValidationError("flow " + std::to_string(n) + " has no allocated path");

  // quasi-static service rates, all flows interfering
  const auto uses = link_usage(alloc, -1, g.link_count());
  std::vector<double> service_pps(g.link_count());
  for (LinkId l = 0; l < g.link_count(); ++l) {
    const Link& lk = g.link(l);
    const double rate =
        link_rate_bps(lk.bandwidth_hz, lk.power_w, interference_from_usage(imap, uses, l),
                      imap.sigma2_w());
    service_pps[l] = rate * cfg.step_seconds / cfg.packet_size_bits;
  }

  // residents of each link in flow-id order; queue q[n][pos] sits at
  // path.nodes[pos] feeding path.links[pos]
  struct Resident {
    int flow;
    int pos;
  };
  std::vector<std::vector<Resident>> residents(g.link_count());
  std::vector<std::vector<std::deque<int>>> queue(num_flows);
  std::vector<std::vector<double>> credit(num_flows);
  for (int n = 0; n < num_flows; ++n) {
    const Path& p = alloc.path(n);
    queue[n].resize(p.links.size());
    credit[n].assign(p.links.size(), 0.0);
    for (int pos = 0; pos < static_cast<int>(p.links.size()); ++pos)
      residents[p.links[pos]].push_back({n, pos});
  }

  SimReport report;
  report.flows.resize(num_flows);
  report.max_queue_series.resize(cfg.horizon, 0);
  std::vector<double> arrival_carry(num_flows, 0.0);
  std::vector<double> delay_sum(num_flows, 0.0);
  std::vector<long long> delay_count(num_flows, 0);
  Rng rng(cfg.seed);

  struct Handoff {
    int flow;
    int pos;  // destination queue position; -1 = delivered
    int creation;
  };
  std::vector<Handoff> in_flight;

  for (int t = 0; t < cfg.horizon; ++t) {
    // (1) arrivals
    for (int n = 0; n < num_flows; ++n) {
      const double demand = flows[n].demand_pps;
      long long k = 0;
      if (cfg.arrivals == ArrivalModel::kDeterministic) {
        arrival_carry[n] += demand;
        k = static_cast<long long>(arrival_carry[n]);
        arrival_carry[n] -= static_cast<double>(k);
      } else {
        k = static_cast<long long>(demand);
        const double frac = demand - static_cast<double>(k);
        if (frac > 0.0 && rng.bernoulli(frac)) ++k;
      }
      for (long long i = 0; i < k; ++i) queue[n][0].push_back(t);
      report.flows[n].injected_packets += k;
    }

    // (2) service, one hop per packet per step
    in_flight.clear();
    for (LinkId l = 0; l < g.link_count(); ++l) {
      if (residents[l].empty()) continue;
      int active = 0;
      for (const Resident& r : residents[l])
        if (!queue[r.flow][r.pos].empty()) ++active;
      if (active == 0) continue;
      const double quantum = service_pps[l] / active;
      for (const Resident& r : residents[l]) {
        auto& q = queue[r.flow][r.pos];
        if (q.empty()) continue;
        double& c = credit[r.flow][r.pos];
        c += quantum;
        auto serve = static_cast<long long>(c);
        if (serve > static_cast<long long>(q.size())) serve = static_cast<long long>(q.size());
        c -= static_cast<double>(serve);
        const int hops = static_cast<int>(queue[r.flow].size());
        for (long long i = 0; i < serve; ++i) {
          const int creation = q.front();
          q.pop_front();
          const int next = r.pos + 1;
          in_flight.push_back({r.flow, next == hops ? -1 : next, creation});
        }
        if (q.empty()) c = 0.0;  // no banking while idle
      }
    }

    // (3) handoffs and deliveries
    for (const Handoff& h : in_flight) {
      if (h.pos < 0) {
        ++report.flows[h.flow].delivered_packets;
        if (t >= cfg.warmup) {
          delay_sum[h.flow] += static_cast<double>(t - h.creation + 1);
          ++delay_count[h.flow];
        }
      } else {
        queue[h.flow][h.pos].push_back(h.creation);
      }
    }

    long long max_q = 0;
    for (int n = 0; n < num_flows; ++n)
      for (const auto& q : queue[n])
        max_q = std::max(max_q, static_cast<long long>(q.size()));
    report.max_queue_series[t] = max_q;
  }

  const auto rates = analytic_flow_rates(g, imap, alloc);
  double pooled_delay = 0.0;
  long long pooled_count = 0;
  for (int n = 0; n < num_flows; ++n) {
    auto& fs = report.flows[n];
    fs.analytic_rate_bps = rates[n];
    fs.delivered_bits_per_step =
        static_cast<double>(fs.delivered_packets) * cfg.packet_size_bits / cfg.horizon;
    fs.mean_delay_steps = delay_count[n] ? delay_sum[n] / static_cast<double>(delay_count[n]) : 0.0;
    pooled_delay += delay_sum[n];
    pooled_count += delay_count[n];
    report.total_injected += fs.injected_packets;
    report.total_delivered += fs.delivered_packets;
  }
  for (int n = 0; n < num_flows; ++n)
    for (const auto& q : queue[n]) report.final_in_queue += static_cast<long long>(q.size());
  report.avg_delay_steps =
      pooled_count ? pooled_delay / static_cast<double>(pooled_count) : double(cfg.horizon);
  report.fairness = fairness_avg_log_rate(rates);
  return report;
}

inline nlohmann::json report_to_json(const SimReport& r) {
  nlohmann::json j;
  j["total_injected"] = r.total_injected;
  j["total_delivered"] = r.total_delivered;
  j["final_in_queue"] = r.final_in_queue;
  j["avg_delay_steps"] = r.avg_delay_steps;
  j["fairness"] = r.fairness;
  auto& flows = j["flows"] = nlohmann::json::array();
  for (const auto& f : r.flows)
    flows.push_back({{"analytic_rate_bps", f.analytic_rate_bps},
                     {"injected_packets", f.injected_packets},
                     {"delivered_packets", f.delivered_packets},
                     {"delivered_bits_per_step", f.delivered_bits_per_step},
                     {"mean_delay_steps", f.mean_delay_steps}});
  j["max_queue_series"] = r.max_queue_series;
  return j;
}

}  // namespace netopt
