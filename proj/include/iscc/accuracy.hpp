#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "iscc/allocation.hpp"

namespace iscc {

class NetworkModel;

// Accuracy-model constants. With an empty r0_table the ideal accuracy is
// a * atan(b * P_S); otherwise r0_table holds (P_S, accuracy) points of a
// nondecreasing piecewise-linear curve, flat beyond its last point.
struct AccuracyParams {
  double a = 0.62;
  double b = 200.0;
  double min_score = 1.0;
  double margin_comp = 1.0;
  int margin_exponent = 2;
  double f_min = 0.0;
  double f_max = 1.0;
  std::vector<std::pair<double, double>> r0_table;

  void validate() const;
  bool tabulated() const { return !r0_table.empty(); }
  // Supremum of the ideal accuracy over P_S >= 0.
  double r0_ceiling() const;
};

// Per-split coefficients of the accuracy penalty.
struct PenaltyTerms {
  double prune_coeff = 0.0;  // C(l)
  double quant_coeff = 0.0;  // Delta(l); zero when nothing is transmitted
  double tail_margin = 1.0;  // w(l)
};

double u(double rho);
double v(int bits);

double r0(double sensing_power, const AccuracyParams& params);

struct R0Fit {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;
};

// Least squares a*atan(b*P) fit; a is solved in closed form for each b and b
// by golden-section search in log space.
R0Fit fit_r0(std::span<const std::pair<double, double>> samples);

// Quantization coefficient Delta(l), with the pooling shortcut.
double quant_delta(const NetworkModel& net, std::size_t split, double f_min, double f_max);
PenaltyTerms penalty_terms(const NetworkModel& net, std::size_t split, const AccuracyParams& params);

// Relative accuracy loss K; the bound is R0 * (1 - K).
double penalty(double rho, int bits, const PenaltyTerms& terms, const AccuracyParams& params);
double accuracy_bound(const Allocation& alloc, const PenaltyTerms& terms, const AccuracyParams& params);

enum class PowerStatus { Ok, PenaltySaturated, AboveAccuracyCeiling, AbovePowerCap };
const char* to_string(PowerStatus s);

struct RequiredPower {
  PowerStatus status = PowerStatus::Ok;
  double watts = 0.0;
  double penalty = 0.0;
  bool ok() const { return status == PowerStatus::Ok; }
};

RequiredPower required_ps(double rho, int bits, const PenaltyTerms& terms, const AccuracyParams& params,
                          double target_accuracy, double p_max);

}  // namespace iscc
