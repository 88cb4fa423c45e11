#include "iscc/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "iscc/netmodel.hpp"
#include "iscc/optimizer.hpp"

namespace iscc {

namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments moments(const std::vector<double>& x) {
  Moments m;
  if (x.empty()) return m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(x.size() - 1));
  }
  return m;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::vector<OracleReport> mc_pruning_expectation(std::size_t m, double rate, const std::vector<double>& rhos,
                                                 std::size_t trials, std::uint64_t seed, kernels::Exec exec) {
  const auto raw = kernels::order_stat_trials(m, rate, rhos, trials, seed, exec);
  std::vector<OracleReport> out;
  const double scale = static_cast<double>(m) / (rate * rate);
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    std::vector<double> col(trials);
    for (std::size_t t = 0; t < trials; ++t) col[t] = raw[t * rhos.size() + r];
    const auto mo = moments(col);
    const double model = scale * u(rhos[r]);
    OracleReport rep;
    rep.name = "prop1 M=" + std::to_string(m) + " rate=" + fmt(rate) + " rho=" + fmt(rhos[r]);
    rep.trials = trials;
    rep.seed = seed;
    rep.mean = mo.mean;
    rep.stddev = mo.stddev;
    rep.rel_error = model > 0.0 ? std::abs(mo.mean - model) / model : std::abs(mo.mean);
    rep.tolerance = 0.05;
    rep.worst_violation = rep.rel_error;
    rep.pass = rep.rel_error <= rep.tolerance;
    rep.stats["model"] = model;
    rep.stats["abs_gap_over_scale"] = std::abs(mo.mean - model) / scale;
    out.push_back(std::move(rep));
  }
  return out;
}

OracleReport mc_lemma2_check(const std::vector<std::size_t>& widths, std::size_t trials, std::uint64_t seed,
                             kernels::Exec exec) {
  const auto res = kernels::lemma2_trials(widths, trials, seed, exec);
  OracleReport rep;
  rep.name = "lemma2 depth=" + std::to_string(widths.size() - 1);
  rep.trials = trials;
  rep.seed = seed;
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  std::vector<double> ratios;
  for (const auto& t : res) {
    if (t.measured > t.bound) {
      ++violations;
      rep.worst_violation = std::max(rep.worst_violation, t.measured - t.bound);
    }
    if (t.bound > 0.0) {
      ratios.push_back(t.measured / t.bound);
      worst_ratio = std::max(worst_ratio, ratios.back());
    }
  }
  const auto mo = moments(ratios);
  rep.mean = mo.mean;
  rep.stddev = mo.stddev;
  rep.tolerance = 0.0;
  rep.pass = violations == 0;
  rep.stats["violations"] = static_cast<double>(violations);
  rep.stats["worst_ratio"] = worst_ratio;
  return rep;
}

std::vector<double> random_features(const QuantSpec& spec, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(spec.f_min(), spec.f_max());
  std::bernoulli_distribution neg(0.5);
  std::vector<double> f(n);
  for (auto& x : f) x = neg(rng) ? -mag(rng) : mag(rng);
  return f;
}

OracleReport mc_quant_check(const QuantSpec& spec, std::size_t n, std::size_t trials, std::uint64_t seed,
                            kernels::Exec exec) {
  return mc_quant_check(spec, random_features(spec, n, seed ^ 0xA5A5A5A5ULL), trials, seed, exec);
}

OracleReport mc_quant_check(const QuantSpec& spec, const std::vector<double>& f, std::size_t trials,
                            std::uint64_t seed, kernels::Exec exec) {
  const auto m = kernels::quant_trials(f, spec, trials, seed, exec);
  const double levels = std::pow(2.0, spec.bits() - 1) - 1.0;
  const double range = spec.f_max() - spec.f_min();
  const double bound = static_cast<double>(f.size()) * range * range / (4.0 * levels * levels);

  OracleReport rep;
  rep.name = "quant Q=" + std::to_string(spec.bits()) + " N=" + std::to_string(f.size());
  rep.trials = trials;
  rep.seed = seed;
  const auto mo = moments(m.err_sq);
  rep.mean = mo.mean;
  rep.stddev = mo.stddev;
  const double se = mo.stddev / std::sqrt(static_cast<double>(trials));
  const double excess = mo.mean - 3.0 * se - bound;
  rep.tolerance = 0.0;
  rep.worst_violation = std::max(0.0, excess);
  rep.rel_error = bound > 0.0 ? mo.mean / bound : 0.0;

  const double tn = static_cast<double>(trials);
  double worst_z = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double mean = m.bias_sum[i] / tn;
    // Exact per-draw variance of stochastic rounding, step^2 p (1 - p). The
    // sample variance degenerates when f_i sits next to a knob and every draw
    // rounds the same way.
    const double pos = (std::clamp(std::abs(f[i]), spec.f_min(), spec.f_max()) - spec.f_min()) / spec.step();
    const double p = pos - std::floor(pos);
    const double var = spec.step() * spec.step() * p * (1.0 - p);
    if (var <= 0.0) {
      if (mean != 0.0) worst_z = std::numeric_limits<double>::infinity();
      continue;
    }
    worst_z = std::max(worst_z, std::abs(mean) / std::sqrt(var / tn));
  }
  rep.pass = rep.worst_violation == 0.0 && worst_z <= 4.0;
  rep.stats["bound"] = bound;
  rep.stats["mean_over_bound"] = rep.rel_error;
  rep.stats["worst_bias_z"] = worst_z;
  return rep;
}

OracleReport grid_subproblem(const SubproblemContext& ctx, const Scenario& sc, std::size_t grid_n,
                             const SolverTolerances& tol, kernels::Exec exec) {
  OracleReport rep;
  rep.name = "lemma4 grid " + std::to_string(grid_n) + "x" + std::to_string(grid_n);
  rep.trials = grid_n * grid_n;
  rep.tolerance = 5e-3;
  const auto sol = solve_pc_nue(ctx, sc, tol);
  const auto grid = kernels::grid_pc_nue(ctx, sc, grid_n, exec);
  if (!sol) {
    rep.pass = !grid.found;
    rep.note = grid.found ? "solver infeasible but the grid found a point" : "both infeasible";
    if (grid.found) rep.worst_violation = 1.0;
    return rep;
  }
  // Objective recomputed from the returned powers, independent of the solver's own bookkeeping.
  double e = sc.kappa * ctx.a2 * sol->edge_freq * sol->edge_freq;
  if (ctx.a1 > 0.0) e += sol->comm_power * ctx.a1 / std::log2(1.0 + sc.snr * sol->comm_power);
  const auto kkt = kkt_residuals(ctx, sc, *sol);
  rep.stats["solver_objective"] = e;
  rep.stats["kkt_stationarity_t"] = kkt.stationarity_t;
  rep.stats["kkt_stationarity_nu"] = kkt.stationarity_nu;
  rep.stats["kkt_comp_slack_t"] = kkt.comp_slack_t;
  rep.stats["kkt_comp_slack_nu"] = kkt.comp_slack_nu;
  rep.stats["latency_rel_gap"] = kkt.primal;
  if (!grid.found) {
    rep.pass = true;
    rep.note = "grid too coarse to hit the feasible set";
    return rep;
  }
  rep.stats["grid_objective"] = grid.objective;
  rep.rel_error = (e - grid.objective) / grid.objective;
  rep.worst_violation = std::max(0.0, rep.rel_error);
  rep.pass = rep.worst_violation <= rep.tolerance;
  return rep;
}

GridFullResult grid_full_search(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                                const GridSpec& grid) {
  GridFullResult best;
  const std::size_t depth = net.depth();
  for (std::size_t l : net.split_candidates()) {
    const auto terms = penalty_terms(net, l, ap);
    const double server_time = l == depth ? 0.0 : cum_flops(net, l + 1, depth, 1.0) / sc.nu_s;
    const double rho_lo = std::max(flops_rho_floor(net, l), 1e-3);
    for (int q = 2; q <= sc.q_max; ++q) {
      if (l == depth && q != 2) continue;
      const std::size_t nr = l == 0 ? 1 : grid.rho_points;
      for (std::size_t i = 0; i < nr; ++i) {
        const double rho = nr == 1 ? 1.0 : rho_lo + (1.0 - rho_lo) * static_cast<double>(i) / static_cast<double>(nr - 1);
        const auto ps = required_ps(rho, q, terms, ap, sc.r_t, sc.p_max);
        if (!ps.ok()) continue;
        const double edge = l == 0 ? 0.0 : cum_flops(net, 1, l, rho);
        const std::size_t np = l == depth ? 1 : grid.pc_points;
        for (std::size_t j = 0; j < np; ++j) {
          double pc = 0.0;
          double t_comm = 0.0;
          if (l < depth) {
            pc = sc.p_max * std::pow(1e-4, 1.0 - static_cast<double>(j) / static_cast<double>(np - 1));
            t_comm = static_cast<double>(net.feature_dim(l)) * q / (sc.bandwidth * std::log2(1.0 + sc.snr * pc));
          }
          const double rest = sc.t_max - sc.sensing_time() - server_time - t_comm;
          if (rest < 0.0) continue;
          std::vector<double> nus = {0.0};
          if (edge > 0.0) {
            if (rest <= 0.0) continue;
            const double nu_min = edge / rest;
            if (nu_min > sc.nu_max) continue;
            nus.clear();
            for (std::size_t k = 0; k < grid.nu_points; ++k) {
              nus.push_back(nu_min + (sc.nu_max - nu_min) * static_cast<double>(k) /
                                         static_cast<double>(std::max<std::size_t>(1, grid.nu_points - 1)));
            }
          }
          for (double nu : nus) {
            Allocation a{l, q, rho, ps.watts, pc, nu};
            const auto c = total_cost(a, net, sc);
            if (c.t_total > sc.t_max * (1.0 + 1e-12)) continue;
            if (!best.feasible || c.e_total < best.energy) best = {true, c.e_total, l, q};
          }
        }
      }
    }
  }
  return best;
}

OracleReport grid_full(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap, const GridSpec& grid) {
  OracleReport rep;
  rep.name = "grid-full";
  rep.tolerance = 0.05;
  const auto sol = solve_scenario(net, sc, ap);
  const auto g = grid_full_search(net, sc, ap, grid);
  rep.trials = 1;
  if (!sol.feasible || !g.feasible) {
    rep.pass = !g.feasible;
    rep.worst_violation = g.feasible ? 1.0 : 0.0;
    rep.note = sol.feasible ? "grid found no feasible point" : (g.feasible ? "solver infeasible, grid feasible" : "both infeasible");
    return rep;
  }
  rep.rel_error = (sol.cost.e_total - g.energy) / g.energy;
  rep.worst_violation = std::max(0.0, rep.rel_error);
  rep.pass = rep.rel_error <= rep.tolerance;
  rep.stats["solver_energy"] = sol.cost.e_total;
  rep.stats["grid_energy"] = g.energy;
  rep.stats["gap"] = rep.rel_error;
  rep.stats["solver_split"] = static_cast<double>(sol.alloc.split);
  rep.stats["grid_split"] = static_cast<double>(g.split);
  return rep;
}

// ---------------------------------------------------------------------------

int LinearHead::predict(const Eigen::VectorXd& f) const {
  const Eigen::VectorXd z = weights * f + bias;
  Eigen::Index best = 0;
  z.maxCoeff(&best);
  return static_cast<int>(best);
}

double LinearHead::margin(const Eigen::VectorXd& f, int y) const {
  const Eigen::VectorXd z = weights * f + bias;
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (j == y) continue;
    const double gap = (z[y] - z[j]) / (weights.row(y) - weights.row(j)).norm();
    m = std::min(m, gap);
  }
  return m;
}

double score(const LinearHead& head, const Eigen::VectorXd& f, int y) {
  const Eigen::VectorXd z = head.weights * f + head.bias;
  double s = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (j != y) s = std::min(s, std::numbers::sqrt2 * (z[y] - z[j]));
  }
  return s;
}

OracleReport margin_experiment(const MarginConfig& cfg, std::uint64_t seed) {
  if (cfg.widths.size() < 2 || cfg.classes < 2 || cfg.samples == 0) {
    throw std::invalid_argument("margin_experiment: need a feature extractor, >= 2 classes and samples");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> rates;
  for (std::size_t i = 1; i < cfg.widths.size(); ++i) {
    rates.push_back(unit_norm_laplace_rate(cfg.widths[i] * cfg.widths[i - 1]));
  }
  const NetworkModel net = make_analysis_network(cfg.widths, rates, rng());
  const std::size_t depth = net.depth();
  const auto d_in = static_cast<Eigen::Index>(cfg.widths.front());
  const auto n_cls = static_cast<int>(cfg.classes);

  std::normal_distribution<double> gauss;
  std::vector<Eigen::VectorXd> centres(cfg.classes, Eigen::VectorXd(d_in));
  for (auto& c : centres) {
    for (Eigen::Index i = 0; i < d_in; ++i) c[i] = gauss(rng);
    c.normalize();
  }
  std::uniform_int_distribution<int> pick(0, n_cls - 1);
  std::uniform_int_distribution<int> other(1, n_cls - 1);
  std::bernoulli_distribution flip(cfg.label_noise);
  struct Sample {
    Eigen::VectorXd x;
    Eigen::VectorXd f;
    int y;
  };
  auto draw = [&](bool noisy) {
    const int c = pick(rng);
    Eigen::VectorXd x = centres[static_cast<std::size_t>(c)];
    for (Eigen::Index i = 0; i < d_in; ++i) x[i] += cfg.spread * gauss(rng) / std::sqrt(static_cast<double>(d_in));
    x.normalize();
    int y = c;
    if (noisy && flip(rng)) y = (c + other(rng)) % n_cls;
    Eigen::VectorXd f = forward(net, x, depth);
    return Sample{std::move(x), std::move(f), y};
  };

  // Nearest-class-mean head fitted on clean pilot features.
  const auto d_f = static_cast<Eigen::Index>(cfg.widths.back());
  LinearHead head{Eigen::MatrixXd::Zero(n_cls, d_f), Eigen::VectorXd::Zero(n_cls)};
  std::vector<double> counts(cfg.classes, 0.0);
  for (std::size_t i = 0; i < cfg.pilot; ++i) {
    const auto s = draw(false);
    head.weights.row(s.y) += s.f.transpose();
    counts[static_cast<std::size_t>(s.y)] += 1.0;
  }
  for (int c = 0; c < n_cls; ++c) {
    head.weights.row(c) /= std::max(1.0, counts[static_cast<std::size_t>(c)]);
    head.bias[c] = -0.5 * head.weights.row(c).squaredNorm();
  }

  std::vector<double> pilot_margins;
  for (std::size_t i = 0; i < cfg.pilot; ++i) {
    const auto s = draw(true);
    if (head.predict(s.f) == s.y) pilot_margins.push_back(head.margin(s.f, s.y));
  }
  double floor = 0.0;
  if (!pilot_margins.empty()) {
    std::sort(pilot_margins.begin(), pilot_margins.end());
    floor = pilot_margins[static_cast<std::size_t>(cfg.margin_quantile * static_cast<double>(pilot_margins.size() - 1))];
  }

  // Correctly classified samples closer than the floor to a boundary are redrawn.
  std::vector<Sample> data;
  data.reserve(cfg.samples);
  std::size_t correct = 0;
  double delta = std::numeric_limits<double>::infinity();
  double min_score = std::numeric_limits<double>::infinity();
  while (data.size() < cfg.samples) {
    auto s = draw(true);
    const bool ok = head.predict(s.f) == s.y;
    const double m = head.margin(s.f, s.y);
    if (ok && m < floor) continue;
    if (ok) {
      ++correct;
      delta = std::min(delta, m);
      min_score = std::min(min_score, score(head, s.f, s.y));
    }
    data.push_back(std::move(s));
  }
  const double n = static_cast<double>(cfg.samples);
  const double r0_emp = static_cast<double>(correct) / n;

  const auto pruned = prune(net, cfg.rho, depth);
  std::vector<Eigen::VectorXd> fp(data.size());
  std::vector<double> all_fp;
  for (std::size_t i = 0; i < data.size(); ++i) {
    fp[i] = forward(pruned, data[i].x, depth);
    all_fp.insert(all_fp.end(), fp[i].data(), fp[i].data() + fp[i].size());
  }
  const QuantSpec qspec = calibrate_range(all_fp, std::max(cfg.bits, 2), cfg.headroom);
  const std::uint64_t qseed = rng();

  double e1_sq = 0.0, e2_sq = 0.0, e_sq = 0.0;
  std::size_t correct_p = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Eigen::VectorXd fq = fp[i];
    if (cfg.quantize) {
      std::mt19937_64 qrng(kernels::trial_seed(qseed, i));
      const auto q = quantize_vector(std::span<const double>(fp[i].data(), static_cast<std::size_t>(fp[i].size())),
                                     qspec, qrng);
      fq = Eigen::Map<const Eigen::VectorXd>(q.values.data(), fp[i].size());
    }
    e1_sq += (fp[i] - data[i].f).squaredNorm();
    e2_sq += (fq - fp[i]).squaredNorm();
    e_sq += (fq - data[i].f).squaredNorm();
    if (head.predict(fq) == data[i].y) ++correct_p;
  }
  e1_sq /= n;
  e2_sq /= n;
  e_sq /= n;
  const double r_p = static_cast<double>(correct_p) / n;
  const double k = correct > 0 ? e_sq / (delta * delta) : std::numeric_limits<double>::infinity();
  const double bound = std::max(0.0, r0_emp * (1.0 - k));
  const double sigma = std::sqrt(r_p * (1.0 - r_p) / n);

  OracleReport rep;
  rep.name = "margin rho=" + fmt(cfg.rho) + " Q=" + std::to_string(cfg.bits);
  rep.seed = seed;
  rep.trials = cfg.samples;
  rep.tolerance = 0.0;
  rep.mean = r_p;
  rep.stddev = sigma;
  rep.worst_violation = std::max(0.0, bound - 3.0 * sigma - r_p);
  rep.pass = rep.worst_violation == 0.0;
  rep.rel_error = r0_emp > 0.0 ? (r_p - bound) / r0_emp : 0.0;
  rep.stats["r0"] = r0_emp;
  rep.stats["r_p"] = r_p;
  rep.stats["bound"] = bound;
  rep.stats["sigma"] = sigma;
  rep.stats["delta"] = delta;
  rep.stats["margin_floor"] = floor;
  rep.stats["min_score"] = min_score;
  rep.stats["delta_over_score"] = delta / min_score;
  rep.stats["e1_sq"] = e1_sq;
  rep.stats["e2_sq"] = e2_sq;
  rep.stats["e_sq"] = e_sq;
  rep.stats["penalty"] = k;
  if (r_p < r0_emp) {
    rep.stats["calibrated_cm"] = std::sqrt(e_sq / (delta * delta * (1.0 - r_p / r0_emp)));
  } else {
    rep.note = "no accuracy loss observed; any c_m makes the bound tight from below";
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<OracleReport> suite_prop1(std::size_t trials, std::uint64_t seed) {
  const std::vector<double> rhos = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<OracleReport> out;
  std::uint64_t s = seed;
  for (double rate : {0.5, 1.0, 2.0}) {
    auto part = mc_pruning_expectation(100000, rate, rhos, trials, s++);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<OracleReport> suite_lemma2(std::size_t trials, std::uint64_t seed) {
  return {mc_lemma2_check({32, 24, 16, 8}, trials, seed)};
}

std::vector<OracleReport> suite_quant(std::size_t trials, std::uint64_t seed) {
  std::vector<OracleReport> out;
  for (int q : {2, 3, 4, 6}) out.push_back(mc_quant_check(QuantSpec(q, 0.0, 1.0), 100, trials, seed + q));
  return out;
}

std::vector<OracleReport> suite_lemma4(std::size_t contexts, std::uint64_t seed, std::size_t grid_n) {
  std::mt19937_64 rng(seed);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
  };
  std::vector<OracleReport> out;
  for (std::size_t i = 0; i < contexts; ++i) {
    Scenario sc;
    sc.snr = log_uniform(1.0, 1000.0);
    SubproblemContext ctx;
    ctx.a1 = log_uniform(1e-4, 1e-1);
    ctx.a2 = log_uniform(1e5, 5e6);
    const double floor = ctx.a1 * min_channel_uses(sc) + ctx.a2 / sc.nu_max;
    ctx.t2 = floor * std::uniform_real_distribution<double>(1.05, 5.0)(rng);
    auto rep = grid_subproblem(ctx, sc, grid_n);
    const double kkt = std::max({rep.stats["kkt_stationarity_t"], rep.stats["kkt_stationarity_nu"],
                                 rep.stats["kkt_comp_slack_t"], rep.stats["kkt_comp_slack_nu"]});
    const bool active = std::abs(rep.stats["latency_rel_gap"]) <= 1e-9;
    rep.name += " context " + std::to_string(i);
    rep.seed = seed;
    if (kkt > 1e-8 || !active) {
      rep.pass = false;
      rep.note = "KKT residual " + fmt(kkt) + ", latency gap " + fmt(rep.stats["latency_rel_gap"]);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<OracleReport> suite_lambertw(std::size_t points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> xs = {-1.0 / std::numbers::e, 0.0, std::numbers::e, 1e6};
  while (xs.size() < points) {
    if (xs.size() % 2 == 0) {
      xs.push_back(std::uniform_real_distribution<double>(-1.0 / std::numbers::e, 1.0)(rng));
    } else {
      xs.push_back(std::exp(std::uniform_real_distribution<double>(0.0, std::log(1e6))(rng)));
    }
  }
  OracleReport rep;
  rep.name = "lambert-w residual";
  rep.trials = xs.size();
  rep.seed = seed;
  rep.tolerance = 1e-12;
  for (double x : xs) {
    const double w = lambert_w0(x);
    const double r = std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x));
    rep.worst_violation = std::max(rep.worst_violation, r);
  }
  rep.pass = rep.worst_violation <= rep.tolerance;
  return {rep};
}

std::vector<OracleReport> suite_golden() {
  struct Case {
    const char* name;
    std::function<double(double)> f;
    double lb, ub, argmin;
  };
  const double c = 0.7;
  const std::vector<Case> cases = {
      {"quadratic", [](double x) { return (x - 2.0) * (x - 2.0); }, 0.0, 5.0, 2.0},
      {"abs", [](double x) { return std::abs(x - std::numbers::pi); }, 0.0, 6.0, std::numbers::pi},
      {"asymmetric", [c](double x) { return x < c ? 4.0 * (c - x) : (x - c) * (x - c) + 0.1 * std::pow(x - c, 3); },
       0.0, 2.0, c},
      {"decreasing", [](double x) { return -x; }, 0.0, 1.0, 1.0},
      {"increasing", [](double x) { return std::exp(x); }, -1.0, 2.0, -1.0},
  };
  const double eps = 1e-8;
  std::vector<OracleReport> out;
  for (const auto& k : cases) {
    OracleReport rep;
    rep.name = std::string("golden ") + k.name;
    rep.tolerance = eps;
    const auto g = golden_section_traced(k.f, k.lb, k.ub, eps);
    rep.trials = g.iterations;
    rep.worst_violation = std::abs(g.argmin - k.argmin);
    rep.stats["iterations"] = static_cast<double>(g.iterations);
    rep.stats["expected_iterations"] =
        std::ceil(std::log((k.ub - k.lb) / eps) / std::log(1.0 / kGoldenRatioConjugate));
    rep.pass = rep.worst_violation <= eps && rep.stats["iterations"] == rep.stats["expected_iterations"];
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<OracleReport> suite_margin(std::size_t samples, std::uint64_t seed) {
  // Light perturbation keeps the bound informative; the heavy one loses accuracy, so c_m is identifiable.
  MarginConfig light;
  light.samples = samples;
  MarginConfig heavy = light;
  heavy.rho = 0.5;
  heavy.bits = 3;
  return {margin_experiment(light, seed), margin_experiment(heavy, seed)};
}

std::vector<OracleReport> suite_grid_full(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                                          std::size_t scenarios, std::uint64_t seed, const GridSpec& grid) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit;
  std::vector<OracleReport> out;
  std::vector<double> gaps;
  for (std::size_t i = 0; i < scenarios; ++i) {
    Scenario s = sc;
    s.t_max = 0.6 + 0.8 * unit(rng);
    s.r_t = 0.75 + 0.15 * unit(rng);
    s.snr = std::pow(10.0, (5.0 + 20.0 * unit(rng)) / 10.0);
    auto rep = grid_full(net, s, ap, grid);
    rep.name += " scenario " + std::to_string(i);
    rep.seed = seed;
    rep.stats["t_max"] = s.t_max;
    rep.stats["r_t"] = s.r_t;
    rep.stats["snr"] = s.snr;
    if (rep.stats.count("gap")) gaps.push_back(rep.stats["gap"]);
    out.push_back(std::move(rep));
  }
  OracleReport agg;
  agg.name = "grid-full median gap";
  agg.trials = gaps.size();
  agg.seed = seed;
  agg.tolerance = 0.05;
  if (!gaps.empty()) {
    std::sort(gaps.begin(), gaps.end());
    const std::size_t h = gaps.size() / 2;
    agg.mean = gaps.size() % 2 ? gaps[h] : 0.5 * (gaps[h - 1] + gaps[h]);
    agg.stats["median_gap"] = agg.mean;
    agg.stats["max_gap"] = gaps.back();
    agg.stats["min_gap"] = gaps.front();
  }
  agg.worst_violation = std::max(0.0, agg.mean);
  agg.pass = !gaps.empty() && agg.mean <= agg.tolerance;
  if (gaps.empty()) agg.note = "no scenario where both solver and grid were feasible";
  out.push_back(std::move(agg));
  return out;
}

}  // namespace iscc
