#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "iscc/accuracy.hpp"
#include "iscc/cost.hpp"
#include "iscc/outcome.hpp"

namespace iscc {

class NetworkModel;

struct SolverTolerances {
  double eps_rho = 1e-6;   // golden-section bracket width on rho
  double eps_mu = 1e-10;   // relative latency error of the multiplier bisection
  double eps_w = 1e-12;    // Lambert-W relative residual
};

// Principal branch W0; x >= -1/e.
double lambert_w0(double x, double eps = 1e-12);

// 1 + W0((p - 1) / e) for p >= 0, accurate near the branch point p -> 0.
double lambert_w0_branch_offset(double p, double eps = 1e-12);

inline constexpr double kGoldenRatioConjugate = 0.6180339887498949;  // (sqrt(5) - 1) / 2

std::size_t golden_iterations(double width, double eps);

struct GoldenResult {
  double argmin = 0.0;
  std::size_t iterations = 0;
};

GoldenResult golden_section_traced(const std::function<double(double)>& f, double lb, double ub, double eps);
double golden_section(const std::function<double(double)>& f, double lb, double ub, double eps);

// Number of strict interior local minima of f sampled on an even grid
// (plateaus count once). A unimodal f gives at most one.
std::size_t sampled_local_minima(const std::function<double(double)>& f, double lb, double ub, std::size_t samples);

// ---------------------------------------------------------------------------
// (rho, P_S) subproblem for fixed (split, Q, P_C, nu_e).

struct RhoProblem {
  bool feasible = false;
  std::string reason;
  double rho_lo = 0.0;    // clamp-free FLOP floor
  double rho_min = 0.0;   // smallest rho with required_ps <= P_max
  double rho_max = 1.0;   // edge latency budget
  double t1 = 0.0;        // residual latency budget for the edge sub-model

  std::size_t split = 0;
  int bits = 2;
  double edge_freq = 0.0;
  const NetworkModel* net = nullptr;
  const Scenario* sc = nullptr;
  const PenaltyTerms* terms = nullptr;
  const AccuracyParams* ap = nullptr;

  // T_sen * P_S*(rho) + kappa * nu_e^2 * sum lambda(l, rho); +inf where
  // the accuracy target is unreachable.
  double objective(double rho) const;
};

RhoProblem make_rho_problem(std::size_t split, int bits, double comm_power, double edge_freq,
                            const NetworkModel& net, const Scenario& sc, const PenaltyTerms& terms,
                            const AccuracyParams& ap);

struct RhoPsSolution {
  double rho = 1.0;
  double sensing_power = 0.0;
  double objective = 0.0;
  double rho_min = 0.0;
  double rho_max = 1.0;
};

struct RhoPsOptions {
  std::optional<double> fixed_rho;  // pin rho (no-pruning ablation) instead of searching
  std::optional<double> incumbent;  // kept when it beats the search result
};

Outcome<RhoPsSolution> solve_rho_ps(std::size_t split, int bits, double comm_power, double edge_freq,
                                    const NetworkModel& net, const Scenario& sc, const PenaltyTerms& terms,
                                    const AccuracyParams& ap, const SolverTolerances& tol = {},
                                    const RhoPsOptions& opts = {});

// ---------------------------------------------------------------------------
// (P_C, nu_e) subproblem. a1 = N_l Q / B, a2 = edge FLOPs, t2 = latency
// budget left for upload plus edge compute.

struct SubproblemContext {
  double a1 = 0.0;
  double a2 = 0.0;
  double t2 = 0.0;
};

SubproblemContext make_subproblem_context(std::size_t split, int bits, double rho, const NetworkModel& net,
                                          const Scenario& sc);

struct PcNueSolution {
  double comm_power = 0.0;
  double edge_freq = 0.0;
  double t = 0.0;           // 1 / log2(1 + snr * P_C)
  double multiplier = 0.0;  // latency multiplier mu_1
  double objective = 0.0;
  double latency = 0.0;
};

double min_channel_uses(const Scenario& sc);  // t_min
// E_comm + E_comp of the reformulated problem.
double pc_nue_objective(const SubproblemContext& ctx, const Scenario& sc, double t, double edge_freq);
// Stationary t for multiplier mu through the Lambert-W closed form.
double stationary_t(double mu, double snr);
// Same quantity by bisection on the stationarity residual, for cross-checks.
double stationary_t_rootfind(double mu, double snr);

Outcome<PcNueSolution> solve_pc_nue(const SubproblemContext& ctx, const Scenario& sc, const SolverTolerances& tol = {});

struct KktResiduals {
  double stationarity_t = 0.0;
  double stationarity_nu = 0.0;
  double comp_slack_t = 0.0;
  double comp_slack_nu = 0.0;
  double primal = 0.0;  // (latency - T2) / T2
  double mu_t = 0.0;    // multiplier of t >= t_min
  double mu_nu = 0.0;   // multiplier of nu_e <= nu_max
};

KktResiduals kkt_residuals(const SubproblemContext& ctx, const Scenario& sc, const PcNueSolution& sol);

}  // namespace iscc
