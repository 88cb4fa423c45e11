#include "iscc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "iscc/netmodel.hpp"

namespace iscc::kernels {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t i) {
  // splitmix64 of (seed, i)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

template <class Body>
void for_trials(std::size_t trials, Exec exec, Body&& body) {
  const auto n = static_cast<std::ptrdiff_t>(trials);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  }
}

}  // namespace

std::vector<double> order_stat_trials(std::size_t m, double rate, std::span<const double> rhos, std::size_t trials,
                                      std::uint64_t seed, Exec exec) {
  if (m == 0 || !(rate > 0.0)) throw std::invalid_argument("order_stat_trials: need m >= 1 and rate > 0");
  std::vector<std::size_t> keep(rhos.size());
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    keep[r] = static_cast<std::size_t>(std::floor((1.0 - rhos[r]) * static_cast<double>(m)));
  }
  std::vector<double> out(trials * rhos.size());
  for_trials(trials, exec, [&](std::size_t t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    std::exponential_distribution<double> dist(rate);
    std::vector<double> w(m);
    for (auto& x : w) x = dist(rng);
    std::sort(w.begin(), w.end());
    double acc = 0.0;
    std::size_t done = 0;
    // Answer the rhos in order of increasing k off one running prefix sum.
    std::vector<std::size_t> order(rhos.size());
    for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return keep[a] < keep[b]; });
    for (std::size_t r : order) {
      for (; done < keep[r]; ++done) acc += w[done] * w[done];
      out[t * rhos.size() + r] = acc;
    }
  });
  return out;
}

std::vector<Lemma2Trial> lemma2_trials(std::span<const std::size_t> widths, std::size_t trials, std::uint64_t seed,
                                       Exec exec) {
  if (widths.size() < 2) throw std::invalid_argument("lemma2_trials: need at least input and output widths");
  std::vector<double> rates;
  for (std::size_t i = 1; i < widths.size(); ++i) rates.push_back(unit_norm_laplace_rate(widths[i] * widths[i - 1]));
  std::vector<Lemma2Trial> out(trials);
  for_trials(trials, exec, [&](std::size_t t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    const auto net = make_analysis_network(widths, rates, rng());
    const double rho = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    std::normal_distribution<double> g;
    Eigen::VectorXd x(static_cast<Eigen::Index>(widths.front()));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = g(rng);
    x.normalize();
    const std::size_t depth = net.depth();
    const auto pruned = prune(net, rho, depth);
    const Eigen::VectorXd diff = forward(net, x, depth) - forward(pruned, x, depth);
    out[t] = {rho, diff.squaredNorm(), lemma2_bound(net, pruned, depth) * x.squaredNorm()};
  });
  return out;
}

QuantMoments quant_trials(std::span<const double> f, const QuantSpec& spec, std::size_t trials, std::uint64_t seed,
                          Exec exec) {
  const std::size_t n = f.size();
  std::vector<double> err(trials * n);
  for_trials(trials, exec, [&](std::size_t t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    const auto q = quantize_vector(f, spec, rng);
    for (std::size_t i = 0; i < n; ++i) err[t * n + i] = q.values[i] - f[i];
  });
  QuantMoments m;
  m.err_sq.assign(trials, 0.0);
  m.bias_sum.assign(n, 0.0);
  m.bias_sumsq.assign(n, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double e = err[t * n + i];
      m.err_sq[t] += e * e;
      m.bias_sum[i] += e;
      m.bias_sumsq[i] += e * e;
    }
  }
  return m;
}

GridPoint grid_pc_nue(const SubproblemContext& ctx, const Scenario& sc, std::size_t n, Exec exec) {
  if (n < 2) throw std::invalid_argument("grid_pc_nue: need n >= 2");
  const double t_min = 1.0 / std::log2(1.0 + sc.snr * sc.p_max);
  const bool use_t = ctx.a1 > 0.0;
  const bool use_nu = ctx.a2 > 0.0;
  const double t_max = use_t ? ctx.t2 / ctx.a1 : t_min;
  if (use_t && t_max < t_min) return {};

  const std::size_t nt = use_t ? n : 1;
  const std::size_t nn = use_nu ? n : 1;
  std::vector<GridPoint> rows(nt);
  for_trials(nt, exec, [&](std::size_t i) {
    const double t = nt == 1 ? t_min : t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(nt - 1);
    GridPoint best;
    for (std::size_t j = 1; j <= nn; ++j) {
      const double nu = use_nu ? sc.nu_max * static_cast<double>(j) / static_cast<double>(nn) : 0.0;
      const double latency = (use_t ? ctx.a1 * t : 0.0) + (use_nu ? ctx.a2 / nu : 0.0);
      if (latency > ctx.t2) continue;
      // Comm energy P_C * A1 / log2(1 + snr P_C) with P_C = (2^(1/t) - 1) / snr.
      const double pc = (std::pow(2.0, 1.0 / t) - 1.0) / sc.snr;
      const double e = (use_t ? pc * ctx.a1 * t : 0.0) + sc.kappa * ctx.a2 * nu * nu;
      if (!best.found || e < best.objective) best = {true, e, t, nu};
    }
    rows[i] = best;
  });
  GridPoint best;
  for (const auto& r : rows) {
    if (r.found && (!best.found || r.objective < best.objective)) best = r;
  }
  return best;
}

}  // namespace iscc::kernels
