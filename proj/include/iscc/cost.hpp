#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "iscc/accuracy.hpp"
#include "iscc/allocation.hpp"

namespace iscc {

class NetworkModel;

// System constants of one edge-inference round.
struct Scenario {
  double t_max = 0.8;        // s
  double r_t = 0.85;
  double p_max = 1.0;        // W
  double nu_max = 8e6;       // FLOP/s
  double nu_s = 1e11;        // FLOP/s
  double kappa = 1e-21;
  double bandwidth = 1e5;    // Hz
  double snr = 100.0;        // g / (B N0), linear, per watt
  double t0 = 1e-5;          // s
  std::size_t chirps = 50000;
  double fs = 1e7;           // Hz
  int q_max = 8;

  void validate() const;
  double sensing_time() const { return t0 * static_cast<double>(chirps); }
  double rate(double comm_power) const;
};

struct CostBreakdown {
  double e_sen = 0.0;
  double e_comp = 0.0;
  double e_comm = 0.0;
  double t_sen = 0.0;
  double t_comp_e = 0.0;
  double t_comp_s = 0.0;
  double t_comm = 0.0;
  double e_total = 0.0;
  double t_total = 0.0;
};

struct CommCost {
  double latency = 0.0;
  double energy = 0.0;
};

struct CompCost {
  double edge_latency = 0.0;
  double server_latency = 0.0;
  double energy = 0.0;
};

// Bits uploaded at this split: N_l * Q, zero when fully on-device.
double payload_bits(std::size_t split, int bits, const NetworkModel& net);

CommCost comm_cost(std::size_t split, int bits, double comm_power, const NetworkModel& net, const Scenario& sc);
CompCost comp_cost(std::size_t split, double rho, double edge_freq, const NetworkModel& net, const Scenario& sc);
CostBreakdown total_cost(const Allocation& alloc, const NetworkModel& net, const Scenario& sc);

struct ConstraintCheck {
  std::string name;
  bool pass = false;
  double slack = 0.0;  // >= 0 when satisfied
};

struct FeasibilityReport {
  std::vector<ConstraintCheck> checks;
  bool feasible() const;
  const ConstraintCheck& at(const std::string& name) const;
};

FeasibilityReport check_feasible(const Allocation& alloc, const NetworkModel& net, const Scenario& sc,
                                 const PenaltyTerms& terms, const AccuracyParams& ap);

}  // namespace iscc
