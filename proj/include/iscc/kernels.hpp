#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "iscc/cost.hpp"
#include "iscc/quant.hpp"
#include "iscc/solvers.hpp"

// Data-parallel Monte-Carlo and grid kernels behind the oracles. Each has a
// serial reference and an OpenMP version; both draw every trial from its own
// stream and reduce in trial order, so their results are bit-identical.
namespace iscc::kernels {

enum class Exec { Serial, Parallel };

// Stream seed of trial i.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t i);

// Per trial: draw m magnitudes from Exponential(rate), sort, and sum the
// squares of the floor((1 - rho) m) smallest, for each rho. Row-major
// [trial][rho].
std::vector<double> order_stat_trials(std::size_t m, double rate, std::span<const double> rhos, std::size_t trials,
                                      std::uint64_t seed, Exec exec);

struct Lemma2Trial {
  double rho = 1.0;
  double measured = 0.0;  // ||f(x) - f_pruned(x)||^2
  double bound = 0.0;     // Frobenius chain bound times ||x||^2
};

// Fresh Laplacian FC network, rho ~ U(0.05, 1) and unit-norm x per trial.
std::vector<Lemma2Trial> lemma2_trials(std::span<const std::size_t> widths, std::size_t trials, std::uint64_t seed,
                                       Exec exec);

struct QuantMoments {
  std::vector<double> err_sq;     // ||q(f) - f||^2 per draw
  std::vector<double> bias_sum;   // per element sum of q_i - f_i over draws
  std::vector<double> bias_sumsq; // per element sum of (q_i - f_i)^2
};

QuantMoments quant_trials(std::span<const double> f, const QuantSpec& spec, std::size_t trials, std::uint64_t seed,
                          Exec exec);

struct GridPoint {
  bool found = false;
  double objective = 0.0;
  double t = 0.0;
  double edge_freq = 0.0;
};

// Best feasible point of the (t, nu_e) subproblem on an n x n grid with
// t in [t_min, T2 / A1] and nu_e in (0, nu_max].
GridPoint grid_pc_nue(const SubproblemContext& ctx, const Scenario& sc, std::size_t n, Exec exec);

}  // namespace iscc::kernels
