#include <vector>

#include <gtest/gtest.h>

#include "iscc/kernels.hpp"

using namespace iscc;
using kernels::Exec;

TEST(Kernels, OrderStatBitIdentical) {
  const std::vector<double> rhos{0.2, 0.5, 0.9};
  EXPECT_EQ(kernels::order_stat_trials(400, 2.0, rhos, 300, 7, Exec::Serial),
            kernels::order_stat_trials(400, 2.0, rhos, 300, 7, Exec::Parallel));
}

TEST(Kernels, OrderStatSeedMatters) {
  const std::vector<double> rhos{0.5};
  EXPECT_NE(kernels::order_stat_trials(50, 1.0, rhos, 10, 1, Exec::Serial),
            kernels::order_stat_trials(50, 1.0, rhos, 10, 2, Exec::Serial));
}

TEST(Kernels, Lemma2BitIdentical) {
  const std::vector<std::size_t> widths{10, 8, 6};
  const auto a = kernels::lemma2_trials(widths, 200, 3, Exec::Serial);
  const auto b = kernels::lemma2_trials(widths, 200, 3, Exec::Parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].rho, b[i].rho);
    EXPECT_EQ(a[i].measured, b[i].measured);
    EXPECT_EQ(a[i].bound, b[i].bound);
  }
}

TEST(Kernels, QuantBitIdentical) {
  const QuantSpec spec(4, 0.0, 1.0);
  const std::vector<double> f{0.1, -0.4, 0.77, 0.0, -0.93, 0.5};
  const auto a = kernels::quant_trials(f, spec, 1000, 11, Exec::Serial);
  const auto b = kernels::quant_trials(f, spec, 1000, 11, Exec::Parallel);
  EXPECT_EQ(a.err_sq, b.err_sq);
  EXPECT_EQ(a.bias_sum, b.bias_sum);
  EXPECT_EQ(a.bias_sumsq, b.bias_sumsq);
}

TEST(Kernels, GridBitIdentical) {
  const Scenario sc;
  SubproblemContext ctx;
  ctx.a1 = 4.8e-3;
  ctx.a2 = 1e5;
  ctx.t2 = 0.05;
  const auto a = kernels::grid_pc_nue(ctx, sc, 120, Exec::Serial);
  const auto b = kernels::grid_pc_nue(ctx, sc, 120, Exec::Parallel);
  ASSERT_TRUE(a.found);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.edge_freq, b.edge_freq);
}

TEST(Kernels, TrialSeedsDistinct) {
  EXPECT_NE(kernels::trial_seed(1, 0), kernels::trial_seed(1, 1));
  EXPECT_NE(kernels::trial_seed(1, 0), kernels::trial_seed(2, 0));
}
