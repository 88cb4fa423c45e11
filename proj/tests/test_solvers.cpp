#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "iscc/config.hpp"
#include "iscc/kernels.hpp"
#include "iscc/solvers.hpp"

using namespace iscc;

namespace {

struct Fixture {
  RunConfig cfg = default_config();
  NetworkModel net = build_network(cfg.network);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

SubproblemContext ctx_with_slack(double factor, const Scenario& sc) {
  SubproblemContext c;
  c.a1 = 480.0 / sc.bandwidth;
  c.a2 = 1e5;
  c.t2 = factor * (c.a1 * min_channel_uses(sc) + c.a2 / sc.nu_max);
  return c;
}

}  // namespace

TEST(LambertW, KnownValues) {
  EXPECT_NEAR(lambert_w0(0.0), 0.0, 1e-15);
  EXPECT_NEAR(lambert_w0(std::numbers::e), 1.0, 1e-12);
  EXPECT_NEAR(lambert_w0(-1.0 / std::numbers::e), -1.0, 1e-7);
  EXPECT_NEAR(lambert_w0(1.0), 0.5671432904097838, 1e-12);
  EXPECT_THROW(lambert_w0(-0.5), std::domain_error);
}

TEST(LambertW, ResidualOverRange) {
  for (double x = -0.36; x < 1e6; x = x < 1.0 ? x + 0.01 : x * 1.7) {
    const double w = lambert_w0(x);
    EXPECT_LE(std::abs(w * std::exp(w) - x), 1e-12 * std::max(1.0, std::abs(x))) << x;
  }
}

TEST(LambertW, BranchOffsetNearBranchPoint) {
  for (double p : {1e-14, 1e-10, 1e-6, 1e-3, 0.04, 0.06, 0.5, 2.0}) {
    // 1 + W((p - 1)/e) with w = off - 1 solves w e^w = (p - 1)/e.
    const double off = lambert_w0_branch_offset(p);
    const double w = off - 1.0;
    EXPECT_GT(off, 0.0);
    EXPECT_NEAR(w * std::exp(w + 1.0), p - 1.0, 1e-12 * std::max(1.0, p));
    // Leading term of the series: sqrt(2p).
    if (p < 1e-6) EXPECT_NEAR(off, std::sqrt(2.0 * p), 2.0 * p);
  }
}

TEST(Golden, Quadratic) {
  EXPECT_NEAR(golden_section([](double x) { return (x - 2.0) * (x - 2.0); }, 0.0, 5.0, 1e-8), 2.0, 1e-8);
}

TEST(Golden, AbsoluteValue) {
  EXPECT_NEAR(golden_section([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 1e-9), 0.3, 1e-9);
}

TEST(Golden, MonotoneEndsAtBoundary) {
  EXPECT_NEAR(golden_section([](double x) { return -x; }, 0.0, 1.0, 1e-8), 1.0, 1e-8);
  EXPECT_NEAR(golden_section([](double x) { return x; }, 0.0, 1.0, 1e-8), 0.0, 1e-8);
}

TEST(Golden, IterationCount) {
  const auto r = golden_section_traced([](double x) { return (x - 1.0) * (x - 1.0); }, 0.0, 4.0, 1e-6);
  EXPECT_EQ(r.iterations,
            static_cast<std::size_t>(std::ceil(std::log(4.0 / 1e-6) / std::log(1.0 / kGoldenRatioConjugate))));
  EXPECT_EQ(r.iterations, golden_iterations(4.0, 1e-6));
}

TEST(Golden, RejectsEmptyBracket) {
  EXPECT_THROW(golden_section([](double x) { return x; }, 1.0, 1.0, 1e-6), std::invalid_argument);
}

TEST(SampledMinima, CountsWiggles) {
  EXPECT_EQ(sampled_local_minima([](double x) { return (x - 0.5) * (x - 0.5); }, 0.0, 1.0, 200), 1u);
  EXPECT_EQ(sampled_local_minima([](double x) { return std::cos(6.0 * std::numbers::pi * x); }, 0.0, 1.0, 200), 3u);
}

TEST(RhoPs, BeatsDenseGrid) {
  const auto& f = fixture();
  const auto& sc = f.cfg.scenario;
  for (std::size_t split : {3u, 5u, 7u}) {
    const auto terms = penalty_terms(f.net, split, f.cfg.accuracy);
    const auto prob = make_rho_problem(split, 8, sc.p_max, sc.nu_max, f.net, sc, terms, f.cfg.accuracy);
    ASSERT_TRUE(prob.feasible) << prob.reason;
    const auto sol = solve_rho_ps(split, 8, sc.p_max, sc.nu_max, f.net, sc, terms, f.cfg.accuracy);
    ASSERT_TRUE(sol.ok()) << sol.reason();
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = 10000;
    for (std::size_t i = 0; i <= n; ++i) {
      const double rho = prob.rho_min + (prob.rho_max - prob.rho_min) * static_cast<double>(i) / n;
      best = std::min(best, prob.objective(rho));
    }
    EXPECT_LE(sol->objective, best + 1e-9) << "split " << split;
    EXPECT_GE(sol->rho, prob.rho_min);
    EXPECT_LE(sol->rho, prob.rho_max);
    EXPECT_LE(sampled_local_minima([&](double r) { return prob.objective(r); }, prob.rho_min, prob.rho_max, 200),
              1u);
  }
}

TEST(RhoPs, SensingPowerMeetsTargetWithEquality) {
  const auto& f = fixture();
  const auto& sc = f.cfg.scenario;
  const auto terms = penalty_terms(f.net, 5, f.cfg.accuracy);
  const auto sol = solve_rho_ps(5, 8, sc.p_max, sc.nu_max, f.net, sc, terms, f.cfg.accuracy);
  ASSERT_TRUE(sol.ok());
  Allocation a;
  a.split = 5;
  a.bits = 8;
  a.rho = sol->rho;
  a.sensing_power = sol->sensing_power;
  EXPECT_NEAR(accuracy_bound(a, terms, f.cfg.accuracy), sc.r_t, 1e-9);
}

TEST(RhoPs, ZeroTargetPrunesToFloor) {
  const auto& f = fixture();
  auto sc = f.cfg.scenario;
  sc.r_t = 0.0;
  const auto terms = penalty_terms(f.net, 5, f.cfg.accuracy);
  const auto sol = solve_rho_ps(5, 4, sc.p_max, sc.nu_max, f.net, sc, terms, f.cfg.accuracy);
  ASSERT_TRUE(sol.ok());
  EXPECT_EQ(sol->sensing_power, 0.0);
  EXPECT_NEAR(sol->rho, sol->rho_min, 1e-6);
}

TEST(RhoPs, InfeasibleEdgeBudget) {
  const auto& f = fixture();
  auto sc = f.cfg.scenario;
  sc.t_max = sc.sensing_time() + 1e-6;
  const auto terms = penalty_terms(f.net, 5, f.cfg.accuracy);
  const auto sol = solve_rho_ps(5, 4, sc.p_max, 1e6, f.net, sc, terms, f.cfg.accuracy);
  EXPECT_FALSE(sol.ok());
  EXPECT_FALSE(sol.reason().empty());
}

TEST(RhoPs, FixedRhoIsRespected) {
  const auto& f = fixture();
  const auto& sc = f.cfg.scenario;
  const auto terms = penalty_terms(f.net, 5, f.cfg.accuracy);
  RhoPsOptions opts;
  opts.fixed_rho = 1.0;
  const auto sol = solve_rho_ps(5, 8, sc.p_max, sc.nu_max, f.net, sc, terms, f.cfg.accuracy, {}, opts);
  ASSERT_TRUE(sol.ok());
  EXPECT_EQ(sol->rho, 1.0);
}

TEST(StationaryT, ClosedFormMatchesRootFind) {
  for (double snr : {1.0, 10.0, 100.0, 1e4}) {
    for (double mu : {1e-6, 1e-3, 0.1, 10.0, 1e3}) {
      const double a = stationary_t(mu, snr), b = stationary_t_rootfind(mu, snr);
      EXPECT_NEAR(a, b, 1e-9 * b) << snr << " " << mu;
    }
  }
}

TEST(PcNue, BothCapsActiveAtFloor) {
  const Scenario sc;
  const auto ctx = ctx_with_slack(1.0, sc);
  const auto s = solve_pc_nue(ctx, sc);
  ASSERT_TRUE(s.ok()) << s.reason();
  EXPECT_NEAR(s->t, min_channel_uses(sc), 1e-9);
  EXPECT_NEAR(s->comm_power, sc.p_max, 1e-9);
  EXPECT_NEAR(s->edge_freq, sc.nu_max, 1e-3 * sc.nu_max);
}

TEST(PcNue, BelowFloorInfeasible) {
  const Scenario sc;
  EXPECT_FALSE(solve_pc_nue(ctx_with_slack(0.999, sc), sc).ok());
}

TEST(PcNue, LatencyActive) {
  const Scenario sc;
  for (double factor : {1.5, 3.0, 20.0}) {
    const auto ctx = ctx_with_slack(factor, sc);
    const auto s = solve_pc_nue(ctx, sc);
    ASSERT_TRUE(s.ok());
    EXPECT_LE(std::abs(s->latency - ctx.t2) / ctx.t2, 1e-9) << factor;
    EXPECT_LE(s->latency, ctx.t2);
    EXPECT_LE(s->comm_power, sc.p_max);
    EXPECT_LE(s->edge_freq, sc.nu_max);
  }
}

TEST(PcNue, KktResidualsSmall) {
  Scenario sc;
  for (double snr : {1.0, 100.0}) {
    sc.snr = snr;
    for (double factor : {1.2, 4.0, 50.0}) {
      const auto ctx = ctx_with_slack(factor, sc);
      const auto s = solve_pc_nue(ctx, sc);
      ASSERT_TRUE(s.ok());
      const auto r = kkt_residuals(ctx, sc, *s);
      EXPECT_LE(r.stationarity_t, 1e-6) << snr << " " << factor;
      EXPECT_LE(r.stationarity_nu, 1e-6);
      EXPECT_LE(r.comp_slack_t, 1e-6);
      EXPECT_LE(r.comp_slack_nu, 1e-6);
      EXPECT_LE(std::abs(r.primal), 1e-9);
      EXPECT_GE(r.mu_t, 0.0);
      EXPECT_GE(r.mu_nu, 0.0);
    }
  }
}

TEST(PcNue, NoWorseThanGrid) {
  const Scenario sc;
  for (double factor : {1.3, 5.0}) {
    const auto ctx = ctx_with_slack(factor, sc);
    const auto s = solve_pc_nue(ctx, sc);
    const auto g = kernels::grid_pc_nue(ctx, sc, 300, kernels::Exec::Serial);
    ASSERT_TRUE(s.ok());
    ASSERT_TRUE(g.found);
    EXPECT_LE(s->objective, g.objective * (1.0 + 1e-9));
  }
}

TEST(PcNue, OnlyComputation) {
  const Scenario sc;
  SubproblemContext ctx;
  ctx.a2 = 1e6;
  ctx.t2 = 0.5;
  const auto s = solve_pc_nue(ctx, sc);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->comm_power, 0.0);
  EXPECT_NEAR(s->edge_freq, ctx.a2 / ctx.t2, 1e-6 * ctx.a2 / ctx.t2);
}
