#include "iscc/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "iscc/netmodel.hpp"
#include "iscc/solvers.hpp"

namespace iscc {

void AccuracyParams::validate() const {
  if (!(min_score > 0.0)) throw std::invalid_argument("accuracy: min_score must be positive");
  if (!(margin_comp > 0.0)) throw std::invalid_argument("accuracy: margin_comp must be positive");
  if (margin_exponent != 1 && margin_exponent != 2) throw std::invalid_argument("accuracy: margin_exponent must be 1 or 2");
  if (!(f_min < f_max) || f_min < 0.0) throw std::invalid_argument("accuracy: need 0 <= f_min < f_max");
  if (tabulated()) {
    for (std::size_t i = 0; i < r0_table.size(); ++i) {
      const auto [p, acc] = r0_table[i];
      if (p < 0.0 || acc < 0.0 || acc > 1.0) throw std::invalid_argument("accuracy: r0_table entry out of range");
      if (i > 0 && (p <= r0_table[i - 1].first || acc < r0_table[i - 1].second)) {
        throw std::invalid_argument("accuracy: r0_table must be strictly increasing in P_S and nondecreasing in accuracy");
      }
    }
  } else {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("accuracy: a and b must be positive");
    if (a * std::numbers::pi / 2.0 > 1.0) throw std::invalid_argument("accuracy: a * pi / 2 must not exceed 1");
  }
}

double AccuracyParams::r0_ceiling() const {
  if (tabulated()) return r0_table.back().second;
  return a * std::numbers::pi / 2.0;
}

double u(double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("u: rho must be positive");
  const double t = std::log(rho) - 1.0;
  return 2.0 - rho - rho * t * t;
}

double v(int bits) {
  if (bits < 2) throw std::invalid_argument("v: need at least 2 quantization bits");
  const double levels = std::ldexp(1.0, bits - 1) - 1.0;
  return 1.0 / (levels * levels);
}

double r0(double sensing_power, const AccuracyParams& params) {
  if (sensing_power < 0.0) throw std::invalid_argument("r0: negative sensing power");
  if (!params.tabulated()) return params.a * std::atan(params.b * sensing_power);

  const auto& t = params.r0_table;
  if (sensing_power <= t.front().first) {
    // Linear from the origin to the first point.
    return t.front().first > 0.0 ? t.front().second * sensing_power / t.front().first : t.front().second;
  }
  if (sensing_power >= t.back().first) return t.back().second;
  const auto hi = std::upper_bound(t.begin(), t.end(), sensing_power,
                                   [](double p, const auto& e) { return p < e.first; });
  const auto lo = hi - 1;
  const double w = (sensing_power - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

R0Fit fit_r0(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("fit_r0: need at least 2 samples");
  double p_lo = std::numeric_limits<double>::infinity(), p_hi = 0.0, p_min_pos = p_lo;
  for (const auto& [p, y] : samples) {
    if (p < 0.0) throw std::invalid_argument("fit_r0: negative sensing power");
    p_lo = std::min(p_lo, p);
    p_hi = std::max(p_hi, p);
    if (p > 0.0) p_min_pos = std::min(p_min_pos, p);
  }
  if (p_lo == p_hi) throw std::invalid_argument("fit_r0: all samples share the same sensing power");

  auto scale_for = [&](double b) {
    double num = 0.0, den = 0.0;
    for (const auto& [p, y] : samples) {
      const double g = std::atan(b * p);
      num += y * g;
      den += g * g;
    }
    return num / den;
  };
  auto residual = [&](double log_b) {
    const double b = std::exp(log_b);
    const double a = scale_for(b);
    double r = 0.0;
    for (const auto& [p, y] : samples) {
      const double e = y - a * std::atan(b * p);
      r += e * e;
    }
    return r;
  };

  const double lo = std::log(1e-4 / p_hi);
  const double hi = std::log(1e4 / p_min_pos);
  const double log_b = golden_section(residual, lo, hi, 1e-11);
  R0Fit fit;
  fit.b = std::exp(log_b);
  fit.a = scale_for(fit.b);
  fit.residual = residual(log_b);
  return fit;
}

double quant_delta(const NetworkModel& net, std::size_t split, double f_min, double f_max) {
  std::size_t dim = net.feature_dim(split);
  if (split < net.depth() && net.layer(split + 1).kind == LayerKind::MP) dim = net.feature_dim(split + 1);
  const double range = f_max - f_min;
  return 0.25 * static_cast<double>(dim) * range * range;
}

PenaltyTerms penalty_terms(const NetworkModel& net, std::size_t split, const AccuracyParams& params) {
  PenaltyTerms t;
  t.prune_coeff = prune_coeff(net, split);
  // Features computed entirely on the device are never quantized.
  t.quant_coeff = split == net.depth() ? 0.0 : quant_delta(net, split, params.f_min, params.f_max);
  t.tail_margin = tail_frobenius(net, split);
  return t;
}

double penalty(double rho, int bits, const PenaltyTerms& terms, const AccuracyParams& params) {
  const double ratio = terms.tail_margin / (params.margin_comp * params.min_score);
  const double scale = params.margin_exponent == 2 ? ratio * ratio : ratio;
  double err = terms.prune_coeff * u(rho);
  if (terms.quant_coeff > 0.0) err += terms.quant_coeff * v(bits);
  return scale * err;
}

double accuracy_bound(const Allocation& alloc, const PenaltyTerms& terms, const AccuracyParams& params) {
  const double k = penalty(alloc.rho, alloc.bits, terms, params);
  return std::max(0.0, r0(alloc.sensing_power, params) * (1.0 - k));
}

const char* to_string(PowerStatus s) {
  switch (s) {
    case PowerStatus::Ok: return "ok";
    case PowerStatus::PenaltySaturated: return "accuracy penalty K >= 1";
    case PowerStatus::AboveAccuracyCeiling: return "target exceeds the ideal-accuracy ceiling";
    case PowerStatus::AbovePowerCap: return "required sensing power exceeds P_max";
  }
  return "?";
}

RequiredPower required_ps(double rho, int bits, const PenaltyTerms& terms, const AccuracyParams& params,
                          double target_accuracy, double p_max) {
  RequiredPower out;
  out.penalty = penalty(rho, bits, terms, params);
  // A zero target is met by the clamped bound even at zero power.
  if (target_accuracy <= 0.0) return out;
  if (out.penalty >= 1.0) {
    out.status = PowerStatus::PenaltySaturated;
    return out;
  }
  const double needed = target_accuracy / (1.0 - out.penalty);
  if (params.tabulated()) {
    if (needed > params.r0_ceiling()) {
      out.status = PowerStatus::AboveAccuracyCeiling;
      return out;
    }
    // r0 is nondecreasing: bisect for the smallest P_S reaching `needed`.
    double lo = 0.0, hi = params.r0_table.back().first;
    while (hi - lo > 1e-10 * std::max(hi, 1e-300)) {
      const double mid = 0.5 * (lo + hi);
      (r0(mid, params) >= needed ? hi : lo) = mid;
    }
    out.watts = hi;
  } else {
    if (needed >= params.r0_ceiling()) {
      out.status = PowerStatus::AboveAccuracyCeiling;
      return out;
    }
    out.watts = std::tan(needed / params.a) / params.b;
  }
  if (out.watts > p_max) out.status = PowerStatus::AbovePowerCap;
  return out;
}

}  // namespace iscc
