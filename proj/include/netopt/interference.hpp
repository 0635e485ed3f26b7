#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netopt/graph.hpp"
#include "netopt/rng.hpp"
#include "netopt/topology.hpp"

namespace netopt {

// Achievable rate per link, bits/s.
struct LinkRateTable {
  std::vector<double> bps;
};

// Transformed link weights in [0,1]; lower weight = higher rate.
struct WeightTable {
  std::vector<double> w;
};

// Pairwise interference gains: gain(rx, tx) is the power absorbed at the
// receiver of rx while tx carries an active transmission. Pairs outside a
// receiver's interference range are not stored and contribute exactly zero.
class InterferenceMap {
public:
  InterferenceMap() = default;
  InterferenceMap(std::size_t link_count, double sigma2_w)
      : sigma2_w_(sigma2_w), in_range_(link_count) {
    if (!(sigma2_w > 0.0)) throw ValidationError("noise power sigma2 must be > 0");
  }

  std::size_t link_count() const { return in_range_.size(); }
  double sigma2_w() const { return sigma2_w_; }

  void set_gain(LinkId rx, LinkId tx, double gain_w) {
    if (rx >= in_range_.size() || tx >= in_range_.size())
      throw ValidationError("interference entry references unknown link");
    if (rx == tx) throw ValidationError("a link does not interfere with itself");
    if (gain_w < 0.0) throw ValidationError("interference gain must be >= 0");
    auto& row = in_range_[rx];
    auto it = std::lower_bound(row.begin(), row.end(), tx,
                               [](const auto& p, LinkId id) { return p.first < id; });
    if (gain_w == 0.0) {
      if (it != row.end() && it->first == tx) row.erase(it);
      return;
    }
    if (it != row.end() && it->first == tx)
      it->second = gain_w;
    else
      row.insert(it, {tx, gain_w});
  }

  double gain(LinkId rx, LinkId tx) const {
    const auto& row = in_range_.at(rx);
    auto it = std::lower_bound(row.begin(), row.end(), tx,
                               [](const auto& p, LinkId id) { return p.first < id; });
    return (it != row.end() && it->first == tx) ? it->second : 0.0;
  }

  // The interference range of rx: links with nonzero gain, ascending id.
  std::span<const std::pair<LinkId, double>> in_range(LinkId rx) const {
    return in_range_.at(rx);
  }

private:
  double sigma2_w_ = 1e-3;
  std::vector<std::vector<std::pair<LinkId, double>>> in_range_;
};

// How many of the included flows' paths traverse each link. The excluded
// flow (own-flow view) contributes nothing; pass -1 to include everyone.
inline std::vector<std::uint32_t> link_usage(const PathAllocation& alloc, int exclude_flow,
                                             std::size_t link_count) {
  std::vector<std::uint32_t> uses(link_count, 0);
  for (int n = 0; n < static_cast<int>(alloc.flow_count()); ++n) {
    if (n == exclude_flow || !alloc.has(n)) continue;
    for (LinkId l : alloc.path(n).links) ++uses.at(l);
  }
  return uses;
}

inline double interference_from_usage(const InterferenceMap& imap,
                                      std::span<const std::uint32_t> uses, LinkId rx) {
  double total = 0.0;
  for (const auto& [tx, g] : imap.in_range(rx)) total += g * uses[tx];
  return total;
}

// Cumulative interference power at the receiver of `link`, summed per flow
// over the path links inside the receiver's interference range. Flows with
// no allocated path contribute zero.
inline double aggregate_interference(const InterferenceMap& imap, const PathAllocation& alloc,
                                     int exclude_flow, LinkId link) {
  if (link >= imap.link_count()) throw ValidationError("unknown link " + std::to_string(link));
  const auto uses = link_usage(alloc, exclude_flow, imap.link_count());
  return interference_from_usage(imap, uses, link);
}

// Shannon-style achievable rate, bits/s.
inline double link_rate_bps(double bandwidth_hz, double power_w, double interference_w,
                            double sigma2_w) {
  return bandwidth_hz * std::log2(1.0 + power_w / (interference_w + sigma2_w));
}

// Achievable rate of every link as seen by `flow` when choosing its next
// path: interference counts all flows except `flow` itself.
inline LinkRateTable compute_link_rate_table(const NetworkGraph& g, const InterferenceMap& imap,
                                             const PathAllocation& alloc, int flow) {
  if (imap.link_count() != g.link_count())
    throw ValidationError("interference map link count does not match graph");
  const auto uses = link_usage(alloc, flow, g.link_count());
  LinkRateTable table;
  table.bps.resize(g.link_count());
  for (LinkId l = 0; l < g.link_count(); ++l) {
    const Link& lk = g.link(l);
    const double interference = interference_from_usage(imap, uses, l);
    table.bps[l] = link_rate_bps(lk.bandwidth_hz, lk.power_w, interference, imap.sigma2_w());
  }
  return table;
}

// Affine order-reversing map of rates onto [0,1]: the best link gets 0, the
// worst 1. All-equal tables collapse to all-zero weights (pure min-hop).
inline WeightTable rate_to_weights(const LinkRateTable& rates) {
  if (rates.bps.empty()) throw ValidationError("rate table is empty");
  const auto [lo_it, hi_it] = std::minmax_element(rates.bps.begin(), rates.bps.end());
  const double lo = *lo_it, hi = *hi_it;
  WeightTable wt;
  wt.w.resize(rates.bps.size());
  if (hi == lo) return wt;  // zeros
  const double span = hi - lo;
  for (std::size_t i = 0; i < rates.bps.size(); ++i) wt.w[i] = (hi - rates.bps[i]) / span;
  return wt;
}

// Random map for generated experiments: every ordered link pair (rx, tx)
// lands inside rx's interference range with probability p_int, with gain
// gamma * P_tx. Deterministic for equal seeds.
inline InterferenceMap random_interference_map(const NetworkGraph& g, double sigma2_w,
                                               double gamma, double p_int, std::uint64_t seed) {
  InterferenceMap imap(g.link_count(), sigma2_w);
  Rng rng(seed);
  for (LinkId rx = 0; rx < g.link_count(); ++rx) {
    for (LinkId tx = 0; tx < g.link_count(); ++tx) {
      if (rx == tx) continue;
      if (rng.bernoulli(p_int)) imap.set_gain(rx, tx, gamma * g.link(tx).power_w);
    }
  }
  return imap;
}

// File format: { "sigma2_w": f,
//                "entries": [ {"rx_link": [u,v], "tx_link": [x,y], "gain_w": f} ] }
// Absent pairs mean zero gain.
inline nlohmann::json interference_map_to_json(const InterferenceMap& imap,
                                               const NetworkGraph& g) {
  nlohmann::json j;
  j["sigma2_w"] = imap.sigma2_w();
  auto& entries = j["entries"] = nlohmann::json::array();
  for (LinkId rx = 0; rx < imap.link_count(); ++rx) {
    const Link& rl = g.link(rx);
    for (const auto& [tx, gain] : imap.in_range(rx)) {
      const Link& tl = g.link(tx);
      entries.push_back({{"rx_link", {rl.tail, rl.head}},
                         {"tx_link", {tl.tail, tl.head}},
                         {"gain_w", gain}});
    }
  }
  return j;
}

inline InterferenceMap interference_map_from_json(const nlohmann::json& j,
                                                  const NetworkGraph& g) {
  InterferenceMap imap(g.link_count(), j.at("sigma2_w").get<double>());
  for (const auto& e : j.value("entries", nlohmann::json::array())) {
    const auto& rx = e.at("rx_link");
    const auto& tx = e.at("tx_link");
    auto rx_id = g.find_link(rx.at(0).get<NodeId>(), rx.at(1).get<NodeId>());
    auto tx_id = g.find_link(tx.at(0).get<NodeId>(), tx.at(1).get<NodeId>());
    if (!rx_id || !tx_id)
      throw ValidationError("interference entry references a link missing from the topology: " +
                            e.dump());
    imap.set_gain(*rx_id, *tx_id, e.at("gain_w").get<double>());
  }
  return imap;
}

inline InterferenceMap load_interference_map(const std::string& path, const NetworkGraph& g) {
  try {
    return interference_map_from_json(read_json_file(path), g);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": bad interference map: " + e.what());
  }
}

}  // namespace netopt
