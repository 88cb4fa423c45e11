#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "iscc/accuracy.hpp"
#include "iscc/allocation.hpp"
#include "iscc/cost.hpp"
#include "iscc/solvers.hpp"

namespace iscc {

class NetworkModel;

enum class Origin { Proposed, OnServer, OnDevice, NoPrune };
const char* to_string(Origin o);
Origin origin_from_string(const std::string& s);

struct PairReason {
  std::size_t split = 0;
  int bits = 0;
  std::string reason;
};

struct Solution {
  Allocation alloc;
  CostBreakdown cost;
  bool feasible = false;
  std::size_t iterations = 0;
  std::vector<double> trace;  // total energy after each alternating round
  Origin origin = Origin::Proposed;
  std::string reason;                  // why infeasible, empty otherwise
  std::vector<PairReason> pair_reasons;  // per (split, Q) failures of an enumeration
};

struct OptimizerOptions {
  SolverTolerances tol;
  double rel_tol = 1e-6;
  std::size_t max_iter = 100;
  bool parallel = true;
};

// Starting point of the alternating loop; defaults to (P_max, nu_max).
struct InnerStart {
  std::optional<double> comm_power;
  std::optional<double> edge_freq;
  std::optional<double> rho;
};

Solution alternate_inner(std::size_t split, int bits, const NetworkModel& net, const Scenario& sc,
                         const PenaltyTerms& terms, const AccuracyParams& ap, const OptimizerOptions& opts = {},
                         std::optional<double> fixed_rho = std::nullopt, const InnerStart& start = {});

// Minimum-energy solution over all (split, Q). When `all` is given it
// receives the per-pair solutions in enumeration order.
Solution solve_scenario(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                        const OptimizerOptions& opts = {}, std::vector<Solution>* all = nullptr);

Solution solve_baseline(Origin kind, const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                        const OptimizerOptions& opts = {});

enum class SweepAxis { TMax, RT, Snr };
const char* to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

// Scenario with one axis replaced; SNR values are in dB.
Scenario with_axis(const Scenario& sc, SweepAxis axis, double value);

struct SweepRow {
  std::size_t scenario_id = 0;
  double value = 0.0;
  Solution solution;
};

// Four rows per value in the order proposed, on_server, on_device, no_prune.
std::vector<SweepRow> sweep(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap, SweepAxis axis,
                            const std::vector<double>& values, const OptimizerOptions& opts = {});

}  // namespace iscc
