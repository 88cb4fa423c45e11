#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iscc/accuracy.hpp"
#include "iscc/cost.hpp"
#include "iscc/kernels.hpp"
#include "iscc/quant.hpp"
#include "iscc/solvers.hpp"

namespace iscc {

class NetworkModel;

struct OracleReport {
  std::string name;
  std::size_t trials = 0;
  bool pass = false;
  double worst_violation = 0.0;  // <= tolerance iff pass
  double tolerance = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double rel_error = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, double> stats;
  std::string note;
};

// Monte-Carlo order statistics of |w| ~ Exponential(rate) against
// (M / rate^2) * u(rho); one report per rho.
std::vector<OracleReport> mc_pruning_expectation(std::size_t m, double rate, const std::vector<double>& rhos,
                                                 std::size_t trials, std::uint64_t seed,
                                                 kernels::Exec exec = kernels::Exec::Parallel);

OracleReport mc_lemma2_check(const std::vector<std::size_t>& widths, std::size_t trials, std::uint64_t seed,
                             kernels::Exec exec = kernels::Exec::Parallel);

// Feature vector with |f_i| uniform on [f_min, f_max] and random signs.
std::vector<double> random_features(const QuantSpec& spec, std::size_t n, std::uint64_t seed);
OracleReport mc_quant_check(const QuantSpec& spec, std::size_t n, std::size_t trials, std::uint64_t seed,
                            kernels::Exec exec = kernels::Exec::Parallel);
OracleReport mc_quant_check(const QuantSpec& spec, const std::vector<double>& f, std::size_t trials,
                            std::uint64_t seed, kernels::Exec exec = kernels::Exec::Parallel);

OracleReport grid_subproblem(const SubproblemContext& ctx, const Scenario& sc, std::size_t grid_n,
                             const SolverTolerances& tol = {}, kernels::Exec exec = kernels::Exec::Parallel);

struct GridSpec {
  std::size_t rho_points = 16;
  std::size_t pc_points = 16;
  std::size_t nu_points = 16;
};

struct GridFullResult {
  bool feasible = false;
  double energy = 0.0;
  std::size_t split = 0;
  int bits = 0;
};

// Exhaustive coarse search of the full problem; P_S from the accuracy model.
GridFullResult grid_full_search(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                                const GridSpec& grid);
OracleReport grid_full(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap, const GridSpec& grid);

// Linear head z = H f + c on extracted features.
struct LinearHead {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
  int predict(const Eigen::VectorXd& f) const;
  // Euclidean distance from f to the nearest boundary of class y; negative
  // when f is misclassified.
  double margin(const Eigen::VectorXd& f, int y) const;
};

// min_{j != y} sqrt(2) (z_y - z_j) of the head output.
double score(const LinearHead& head, const Eigen::VectorXd& f, int y);

struct MarginConfig {
  std::vector<std::size_t> widths = {32, 24, 16};  // feature extractor, input first
  std::size_t classes = 5;
  double spread = 0.35;       // cluster std relative to unit-norm centres
  double label_noise = 0.05;  // fraction of flipped labels
  double margin_quantile = 0.1;
  std::size_t pilot = 2000;
  std::size_t samples = 10000;
  double rho = 0.9;
  int bits = 6;
  double headroom = 0.0;
  bool quantize = true;
};

OracleReport margin_experiment(const MarginConfig& cfg, std::uint64_t seed);

// Named batteries used by the CLI and the acceptance run.
std::vector<OracleReport> suite_prop1(std::size_t trials, std::uint64_t seed);
std::vector<OracleReport> suite_lemma2(std::size_t trials, std::uint64_t seed);
std::vector<OracleReport> suite_quant(std::size_t trials, std::uint64_t seed);
std::vector<OracleReport> suite_lemma4(std::size_t contexts, std::uint64_t seed, std::size_t grid_n = 400);
std::vector<OracleReport> suite_lambertw(std::size_t points, std::uint64_t seed);
std::vector<OracleReport> suite_golden();
std::vector<OracleReport> suite_margin(std::size_t samples, std::uint64_t seed);
std::vector<OracleReport> suite_grid_full(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                                          std::size_t scenarios, std::uint64_t seed, const GridSpec& grid = {});

}  // namespace iscc
