#include "iscc/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iscc/netmodel.hpp"
#include "iscc/sensing.hpp"

namespace iscc {

void Scenario::validate() const {
  const double positives[] = {t_max, p_max, nu_max, nu_s, kappa, bandwidth, snr, t0, fs};
  for (double x : positives) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("scenario: constants must be positive and finite");
  }
  if (chirps < 1) throw std::invalid_argument("scenario: m_chirps must be >= 1");
  if (q_max < 2) throw std::invalid_argument("scenario: q_max must be >= 2");
  if (!(r_t >= 0.0 && r_t < 1.0)) throw std::invalid_argument("scenario: r_t must lie in [0, 1)");
}

double Scenario::rate(double comm_power) const { return bandwidth * std::log2(1.0 + snr * comm_power); }

double payload_bits(std::size_t split, int bits, const NetworkModel& net) {
  if (split >= net.depth()) return 0.0;
  return static_cast<double>(net.feature_dim(split)) * static_cast<double>(bits);
}

CommCost comm_cost(std::size_t split, int bits, double comm_power, const NetworkModel& net, const Scenario& sc) {
  const double payload = payload_bits(split, bits, net);
  if (payload == 0.0) return {};
  if (!(comm_power > 0.0)) throw std::invalid_argument("comm_cost: transmit power must be positive");
  const double latency = payload / sc.rate(comm_power);
  return {latency, comm_power * latency};
}

CompCost comp_cost(std::size_t split, double rho, double edge_freq, const NetworkModel& net, const Scenario& sc) {
  CompCost c;
  const double edge = split == 0 ? 0.0 : cum_flops(net, 1, split, rho);
  const double server = split == net.depth() ? 0.0 : cum_flops(net, split + 1, net.depth(), 1.0);
  if (edge > 0.0) {
    if (!(edge_freq > 0.0)) throw std::invalid_argument("comp_cost: edge frequency must be positive");
    c.edge_latency = edge / edge_freq;
    c.energy = sc.kappa * edge * edge_freq * edge_freq;
  }
  c.server_latency = server / sc.nu_s;
  return c;
}

CostBreakdown total_cost(const Allocation& alloc, const NetworkModel& net, const Scenario& sc) {
  CostBreakdown b;
  const auto sen = sensing_cost(alloc.sensing_power, sc.t0, sc.chirps);
  const auto comp = comp_cost(alloc.split, alloc.rho, alloc.edge_freq, net, sc);
  const auto comm = comm_cost(alloc.split, alloc.bits, alloc.comm_power, net, sc);
  b.e_sen = sen.energy;
  b.t_sen = sen.latency;
  b.e_comp = comp.energy;
  b.t_comp_e = comp.edge_latency;
  b.t_comp_s = comp.server_latency;
  b.e_comm = comm.energy;
  b.t_comm = comm.latency;
  b.e_total = b.e_sen + b.e_comp + b.e_comm;
  b.t_total = b.t_sen + b.t_comp_e + b.t_comp_s + b.t_comm;
  return b;
}

bool FeasibilityReport::feasible() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const ConstraintCheck& FeasibilityReport::at(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no constraint named " + name);
}

FeasibilityReport check_feasible(const Allocation& alloc, const NetworkModel& net, const Scenario& sc,
                                 const PenaltyTerms& terms, const AccuracyParams& ap) {
  FeasibilityReport r;
  auto add = [&](std::string name, double slack, double tol) {
    r.checks.push_back({std::move(name), slack >= -tol, slack});
  };

  const bool bits_ok = alloc.bits >= 2 && alloc.bits <= sc.q_max;
  const bool rho_ok = alloc.rho > 0.0 && alloc.rho <= 1.0;
  const bool split_ok = alloc.split <= net.depth();

  if (bits_ok && rho_ok && split_ok && alloc.sensing_power >= 0.0) {
    add("C1", accuracy_bound(alloc, terms, ap) - sc.r_t, 1e-9);
  } else {
    r.checks.push_back({"C1", false, -1.0});
  }

  if (rho_ok && split_ok && alloc.sensing_power >= 0.0) {
    try {
      add("C2", sc.t_max - total_cost(alloc, net, sc).t_total, 1e-9 * sc.t_max);
    } catch (const std::invalid_argument&) {
      r.checks.push_back({"C2", false, -1.0});
    }
  } else {
    r.checks.push_back({"C2", false, -1.0});
  }

  const auto& splits = net.split_candidates();
  r.checks.push_back({"C3", std::find(splits.begin(), splits.end(), alloc.split) != splits.end(),
                      split_ok ? 0.0 : -1.0});
  r.checks.push_back({"C4", rho_ok, rho_ok ? 1.0 - alloc.rho : std::min(alloc.rho, 1.0 - alloc.rho)});

  const double power_slack =
      std::min({sc.p_max - alloc.sensing_power, sc.p_max - alloc.comm_power, alloc.sensing_power,
                alloc.comm_power});
  add("C5", power_slack, 0.0);

  double freq_slack = std::min(sc.nu_max - alloc.edge_freq, alloc.edge_freq);
  if (alloc.split > 0 && split_ok && alloc.edge_freq <= 0.0) freq_slack = -1.0;
  add("C6", freq_slack, 0.0);

  r.checks.push_back({"C7", bits_ok,
                      bits_ok ? static_cast<double>(sc.q_max - alloc.bits)
                              : static_cast<double>(std::min(alloc.bits - 2, sc.q_max - alloc.bits))});
  return r;
}

}  // namespace iscc
