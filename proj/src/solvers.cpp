#include "iscc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "iscc/netmodel.hpp"

namespace iscc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - (1 - y) e^y = sum_{k>=2} (k-1) y^k / k!, evaluated without cancellation.
double branch_gap(double y) {
  if (y > 0.05) return y * std::exp(y) - std::expm1(y);
  double term = y;  // y^k / k! at k = 1
  double sum = 0.0;
  for (int k = 2; k < 40; ++k) {
    term *= y / k;
    const double add = (k - 1) * term;
    sum += add;
    if (add <= 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

double lambert_w0(double x, double eps) {
  constexpr double branch = -1.0 / std::numbers::e;
  if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN argument");
  if (x < branch) {
    if (x < branch - 4.0 * std::numeric_limits<double>::epsilon()) {
      throw std::domain_error("lambert_w0: argument below -1/e");
    }
    return -1.0;
  }
  if (x == branch) return -1.0;
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return kInf;

  double w;
  if (x < -0.25) {
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x <= std::numbers::e) {
    w = std::log1p(x) * (x > 0.0 ? 0.8 : 1.0);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 0.25 * eps * (1.0 + std::abs(w))) break;
  }
  return w;
}

double lambert_w0_branch_offset(double p, double eps) {
  if (p < 0.0) throw std::domain_error("lambert_w0_branch_offset: negative offset");
  if (p == 0.0) return 0.0;
  if (p >= 0.05) return 1.0 + lambert_w0((p - 1.0) / std::numbers::e, eps);
  // Newton on branch_gap(z) = p; branch_gap'(z) = z e^z.
  double z = std::sqrt(2.0 * p);
  for (int it = 0; it < 64; ++it) {
    const double step = (branch_gap(z) - p) / (z * std::exp(z));
    z -= step;
    if (std::abs(step) <= 0.25 * eps * z) break;
  }
  return z;
}

// ---------------------------------------------------------------------------

std::size_t golden_iterations(double width, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("golden_section: eps must be positive");
  if (width <= eps) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(width / eps) / std::log(1.0 / kGoldenRatioConjugate)));
}

GoldenResult golden_section_traced(const std::function<double(double)>& f, double lb, double ub, double eps) {
  if (!(lb < ub)) throw std::invalid_argument("golden_section: need lb < ub");
  auto eval = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) throw std::domain_error("golden_section: objective is not finite at " + std::to_string(x));
    return y;
  };

  constexpr double g = kGoldenRatioConjugate;
  const std::size_t n = golden_iterations(ub - lb, eps);
  double t1 = lb + (1.0 - g) * (ub - lb);
  double t2 = lb + g * (ub - lb);
  double f1 = n > 0 ? eval(t1) : 0.0;
  double f2 = n > 0 ? eval(t2) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (f1 < f2) {
      ub = t2;
      t2 = t1;
      f2 = f1;
      t1 = lb + (1.0 - g) * (ub - lb);
      if (i + 1 < n) f1 = eval(t1);
    } else {
      lb = t1;
      t1 = t2;
      f1 = f2;
      t2 = lb + g * (ub - lb);
      if (i + 1 < n) f2 = eval(t2);
    }
  }
  return {0.5 * (lb + ub), n};
}

double golden_section(const std::function<double(double)>& f, double lb, double ub, double eps) {
  return golden_section_traced(f, lb, ub, eps).argmin;
}

std::size_t sampled_local_minima(const std::function<double(double)>& f, double lb, double ub, std::size_t samples) {
  if (samples < 3) return 0;
  std::vector<double> y(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    y[i] = f(lb + (ub - lb) * static_cast<double>(i) / static_cast<double>(samples - 1));
  }
  // Collapse plateaus, then count interior valleys.
  std::vector<double> runs;
  for (double v : y) {
    if (runs.empty() || v != runs.back()) runs.push_back(v);
  }
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < runs.size(); ++i) {
    if (runs[i] < runs[i - 1] && runs[i] < runs[i + 1]) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------

double RhoProblem::objective(double rho) const {
  const auto ps = required_ps(rho, bits, *terms, *ap, sc->r_t, sc->p_max);
  if (!ps.ok() && ps.status != PowerStatus::AbovePowerCap) return kInf;
  const double edge = split == 0 ? 0.0 : cum_flops(*net, 1, split, rho);
  return sc->sensing_time() * ps.watts + sc->kappa * edge_freq * edge_freq * edge;
}

RhoProblem make_rho_problem(std::size_t split, int bits, double comm_power, double edge_freq,
                            const NetworkModel& net, const Scenario& sc, const PenaltyTerms& terms,
                            const AccuracyParams& ap) {
  RhoProblem p;
  p.split = split;
  p.bits = bits;
  p.edge_freq = edge_freq;
  p.net = &net;
  p.sc = &sc;
  p.terms = &terms;
  p.ap = &ap;

  if (split > net.depth()) throw std::out_of_range("solve_rho_ps: split beyond network depth");
  const double server = split == net.depth() ? 0.0 : cum_flops(net, split + 1, net.depth(), 1.0);
  double t_comm = 0.0;
  if (payload_bits(split, bits, net) > 0.0) {
    if (!(comm_power > 0.0)) {
      p.reason = "transmit power must be positive when features are uploaded";
      return p;
    }
    t_comm = comm_cost(split, bits, comm_power, net, sc).latency;
  }
  p.t1 = sc.t_max - sc.sensing_time() - server / sc.nu_s - t_comm;

  auto status_at = [&](double rho) { return required_ps(rho, bits, terms, ap, sc.r_t, sc.p_max); };

  if (split == 0) {
    // Nothing runs on the device, so rho has no effect.
    p.rho_lo = p.rho_min = p.rho_max = 1.0;
    if (p.t1 < 0.0) {
      p.reason = "latency budget exhausted before edge compute (T1 < 0)";
      return p;
    }
    const auto s = status_at(1.0);
    if (!s.ok()) {
      p.reason = std::string("accuracy target unreachable: ") + to_string(s.status);
      return p;
    }
    p.feasible = true;
    return p;
  }

  if (!(p.t1 > 0.0)) {
    p.reason = "latency budget exhausted before edge compute (T1 <= 0)";
    return p;
  }
  if (!(edge_freq > 0.0)) {
    p.reason = "edge frequency must be positive";
    return p;
  }
  const AffineFlops edge = edge_flops_affine(net, split);
  p.rho_lo = std::max(flops_rho_floor(net, split), 1e-9);
  p.rho_max = edge.slope > 0.0 ? (edge_freq * p.t1 - edge.intercept) / edge.slope : 1.0;
  if (edge.slope <= 0.0 && edge.intercept > edge_freq * p.t1) p.rho_max = 0.0;
  p.rho_max = std::min(p.rho_max, 1.0);
  if (!(p.rho_max > 0.0) || p.rho_max < p.rho_lo) {
    p.reason = "edge latency budget below the FLOPs of the sparsest model (rho_max <= 0)";
    return p;
  }

  const auto top = status_at(p.rho_max);
  if (!top.ok()) {
    p.reason = std::string("accuracy target unreachable within the latency-limited rho (rho_min > rho_max): ") +
               to_string(top.status);
    return p;
  }
  if (status_at(p.rho_lo).ok()) {
    p.rho_min = p.rho_lo;
  } else {
    double lo = p.rho_lo, hi = p.rho_max;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (status_at(mid).ok() ? hi : lo) = mid;
    }
    p.rho_min = hi;
  }
  p.feasible = true;
  return p;
}

Outcome<RhoPsSolution> solve_rho_ps(std::size_t split, int bits, double comm_power, double edge_freq,
                                    const NetworkModel& net, const Scenario& sc, const PenaltyTerms& terms,
                                    const AccuracyParams& ap, const SolverTolerances& tol,
                                    const RhoPsOptions& opts) {
  const RhoProblem p = make_rho_problem(split, bits, comm_power, edge_freq, net, sc, terms, ap);
  if (!p.feasible) return Outcome<RhoPsSolution>::infeasible(p.reason);

  double rho;
  if (opts.fixed_rho && split > 0) {
    rho = *opts.fixed_rho;
    if (rho > p.rho_max) return Outcome<RhoPsSolution>::infeasible("fixed rho exceeds the latency-limited rho_max");
    if (rho < p.rho_min) return Outcome<RhoPsSolution>::infeasible("fixed rho misses the accuracy target");
  } else if (p.rho_min >= p.rho_max) {
    rho = p.rho_max;
  } else {
    auto h = [&](double r) { return p.objective(r); };
    rho = golden_section(h, p.rho_min, p.rho_max, tol.eps_rho);
    // The bracket ends are exact candidates; golden section only gets within eps of them.
    double best = h(rho);
    std::vector<double> extra = {p.rho_min, p.rho_max};
    if (opts.incumbent && *opts.incumbent >= p.rho_min && *opts.incumbent <= p.rho_max) extra.push_back(*opts.incumbent);
    for (double end : extra) {
      const double he = h(end);
      if (he < best) {
        best = he;
        rho = end;
      }
    }
  }

  const auto ps = required_ps(rho, bits, terms, ap, sc.r_t, sc.p_max);
  if (!ps.ok()) return Outcome<RhoPsSolution>::infeasible(std::string("accuracy target unreachable: ") + to_string(ps.status));
  RhoPsSolution s;
  s.rho = rho;
  s.sensing_power = ps.watts;
  s.objective = p.objective(rho);
  s.rho_min = p.rho_min;
  s.rho_max = p.rho_max;
  return s;
}

// ---------------------------------------------------------------------------

SubproblemContext make_subproblem_context(std::size_t split, int bits, double rho, const NetworkModel& net,
                                          const Scenario& sc) {
  SubproblemContext c;
  c.a1 = payload_bits(split, bits, net) / sc.bandwidth;
  c.a2 = split == 0 ? 0.0 : cum_flops(net, 1, split, rho);
  const double server = split == net.depth() ? 0.0 : cum_flops(net, split + 1, net.depth(), 1.0);
  c.t2 = sc.t_max - sc.sensing_time() - server / sc.nu_s;
  return c;
}

double min_channel_uses(const Scenario& sc) { return 1.0 / std::log2(1.0 + sc.snr * sc.p_max); }

double pc_nue_objective(const SubproblemContext& ctx, const Scenario& sc, double t, double edge_freq) {
  double e = 0.0;
  if (ctx.a1 > 0.0) e += ctx.a1 / sc.snr * std::expm1(std::numbers::ln2 / t) * t;
  if (ctx.a2 > 0.0) e += sc.kappa * ctx.a2 * edge_freq * edge_freq;
  return e;
}

double stationary_t(double mu, double snr) {
  const double p = mu * snr;
  if (!(p > 0.0)) return kInf;
  return std::numbers::ln2 / lambert_w0_branch_offset(p);
}

double stationary_t_rootfind(double mu, double snr) {
  const double p = mu * snr;
  if (!(p > 0.0)) return kInf;
  // Stationarity in y = ln2 / t: y e^y - expm1(y) = p, increasing in y.
  auto gap = [](double y) { return y * std::exp(y) - std::expm1(y); };
  double lo = 1e-300, hi = 1.0;
  while (gap(hi) < p) hi *= 2.0;
  for (int it = 0; it < 2000 && hi > lo * (1.0 + 4e-16); ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    (gap(mid) < p ? lo : hi) = mid;
  }
  return std::numbers::ln2 / (0.5 * (lo + hi));
}

namespace {

struct Activated {
  double t = 0.0;
  double nu = 0.0;
  double latency = 0.0;
};

Activated activate(double mu, const SubproblemContext& ctx, const Scenario& sc, double t_min) {
  Activated a;
  if (ctx.a1 > 0.0) {
    a.t = std::max(stationary_t(mu, sc.snr), t_min);
    a.latency += ctx.a1 * a.t;
  }
  if (ctx.a2 > 0.0) {
    a.nu = std::min(sc.nu_max, std::cbrt(mu / (2.0 * sc.kappa)));
    a.latency += a.nu > 0.0 ? ctx.a2 / a.nu : kInf;
  }
  return a;
}

}  // namespace

Outcome<PcNueSolution> solve_pc_nue(const SubproblemContext& ctx, const Scenario& sc, const SolverTolerances& tol) {
  const double t_min = min_channel_uses(sc);
  PcNueSolution s;
  if (ctx.a1 <= 0.0 && ctx.a2 <= 0.0) {
    if (ctx.t2 < 0.0) return Outcome<PcNueSolution>::infeasible("latency budget exhausted (T2 < 0)");
    return s;
  }
  const double floor_latency = (ctx.a1 > 0.0 ? ctx.a1 * t_min : 0.0) + (ctx.a2 > 0.0 ? ctx.a2 / sc.nu_max : 0.0);
  if (floor_latency > ctx.t2) {
    return Outcome<PcNueSolution>::infeasible("latency budget below A1*t_min + A2/nu_max even at full power and frequency");
  }

  double lo = 1e-30;
  double hi = 1.0;
  int doublings = 0;
  while (activate(hi, ctx, sc, t_min).latency > ctx.t2) {
    hi *= 2.0;
    if (++doublings > 4000) return Outcome<PcNueSolution>::infeasible("multiplier bisection failed to bracket the deadline");
  }
  if (activate(lo, ctx, sc, t_min).latency <= ctx.t2) {
    hi = lo;
  } else {
    for (int it = 0; it < 4000; ++it) {
      // hi stays on the feasible side; stop once its deadline slack is negligible.
      const double slack = ctx.t2 - activate(hi, ctx, sc, t_min).latency;
      if (slack <= tol.eps_mu * ctx.t2 || hi <= lo * (1.0 + 4e-16)) break;
      const double mid = std::sqrt(lo) * std::sqrt(hi);
      (activate(mid, ctx, sc, t_min).latency > ctx.t2 ? lo : hi) = mid;
    }
  }

  const Activated a = activate(hi, ctx, sc, t_min);
  s.t = a.t;
  s.edge_freq = a.nu;
  s.multiplier = hi;
  s.latency = a.latency;
  if (ctx.a1 > 0.0) {
    s.comm_power = a.t == t_min ? sc.p_max : std::min(sc.p_max, std::expm1(std::numbers::ln2 / a.t) / sc.snr);
  }
  s.objective = pc_nue_objective(ctx, sc, s.t, s.edge_freq);
  return s;
}

KktResiduals kkt_residuals(const SubproblemContext& ctx, const Scenario& sc, const PcNueSolution& sol) {
  KktResiduals r;
  const double mu = sol.multiplier;
  const double t_min = min_channel_uses(sc);
  if (ctx.a1 > 0.0) {
    // d/dt of the comm energy plus mu * A1.
    const double g = ctx.a1 * (mu - branch_gap(std::numbers::ln2 / sol.t) / sc.snr);
    const double scale = std::max(mu * ctx.a1, std::numeric_limits<double>::min());
    const bool at_cap = sol.t <= t_min;
    r.mu_t = at_cap ? std::max(0.0, g) : 0.0;
    r.stationarity_t = std::abs(g - r.mu_t) / scale;
    r.comp_slack_t = std::abs(r.mu_t * (t_min - sol.t)) / scale;
  }
  if (ctx.a2 > 0.0) {
    const double nu = sol.edge_freq;
    const double pull = mu * ctx.a2 / (nu * nu);
    const double g = 2.0 * sc.kappa * ctx.a2 * nu - pull;
    const double scale = std::max(pull, std::numeric_limits<double>::min());
    const bool at_cap = nu >= sc.nu_max;
    r.mu_nu = at_cap ? std::max(0.0, -g) : 0.0;
    r.stationarity_nu = std::abs(g + r.mu_nu) / scale;
    r.comp_slack_nu = std::abs(r.mu_nu * (nu - sc.nu_max)) / scale;
  }
  r.primal = ctx.t2 != 0.0 ? (sol.latency - ctx.t2) / ctx.t2 : sol.latency;
  return r;
}

}  // namespace iscc
