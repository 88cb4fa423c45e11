#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "iscc/accuracy.hpp"
#include "iscc/netmodel.hpp"
#include "iscc/quant.hpp"

using namespace iscc;

namespace {

double mean_of(double x, const QuantSpec& spec, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += quantize_scalar(x, spec, rng);
  return sum / draws;
}

}  // namespace

TEST(QuantSpec, RejectsOneBit) { EXPECT_THROW(QuantSpec(1, 0.0, 1.0), std::invalid_argument); }

TEST(QuantSpec, Knobs) {
  const QuantSpec s(3, 0.0, 1.0);
  ASSERT_EQ(s.knob_count(), 4u);
  EXPECT_DOUBLE_EQ(s.knob(1), 1.0 / 3.0);
  EXPECT_EQ(s.knob(3), 1.0);
}

TEST(Quantize, TwoBitOutcomesAndMean) {
  const QuantSpec s(2, 0.0, 1.0);
  std::mt19937_64 rng(1);
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double q = quantize_scalar(0.3, s, rng);
    ASSERT_TRUE(q == 0.0 || q == 1.0);
    ones += q == 1.0;
  }
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.3, 0.005);
}

TEST(Quantize, NegativeMirrors) {
  const QuantSpec s(2, 0.0, 1.0);
  EXPECT_NEAR(mean_of(-0.3, s, 100000, 2), -0.3, 0.005);
}

TEST(Quantize, KnobIsExact) {
  const QuantSpec s(4, 0.0, 2.0);
  std::mt19937_64 rng(3);
  for (std::size_t i = 0; i < s.knob_count(); ++i) {
    for (int t = 0; t < 20; ++t) EXPECT_EQ(quantize_scalar(s.knob(i), s, rng), s.knob(i));
  }
}

TEST(Quantize, ZeroIsPositive) {
  const QuantSpec s(3, 0.0, 1.0);
  std::mt19937_64 rng(4);
  const double q = quantize_scalar(0.0, s, rng);
  EXPECT_EQ(q, 0.0);
  EXPECT_FALSE(std::signbit(q));
}

TEST(Quantize, UnbiasedWithinFourSigma) {
  const QuantSpec s(3, 0.0, 1.0);
  const int n = 100000;
  for (double x : {0.05, 0.2, 0.5, 0.71, 0.93}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(x * 1000));
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = quantize_scalar(x, s, rng) - x;
      sum += e;
      sumsq += e * e;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(0.0, sumsq / n - mean * mean));
    EXPECT_LE(std::abs(mean), 4.0 * sd / std::sqrt(static_cast<double>(n)) + 1e-15);
    // Per-element variance cap: (step / 2)^2.
    EXPECT_LE(sumsq / n, std::pow(s.step() / 2.0, 2) * 1.02);
  }
}

TEST(Quantize, AlphabetFitsInQBits) {
  const QuantSpec s(3, 0.0, 1.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::set<double> seen;
  for (int i = 0; i < 20000; ++i) seen.insert(quantize_scalar(u(rng), s, rng));
  EXPECT_LE(seen.size(), std::size_t{2} << (s.bits() - 1));
}

TEST(QuantizeVector, ClampsAndCounts) {
  const QuantSpec s(3, 0.0, 1.0);
  const std::vector<double> f{0.5, 1.5, -2.0, 0.25};
  const auto q = quantize_vector(f, s, 7);
  EXPECT_EQ(q.clamped, 2u);
  EXPECT_EQ(q.values[1], 1.0);
  EXPECT_EQ(q.values[2], -1.0);
}

TEST(QuantizeVector, DeterministicGivenSeed) {
  const QuantSpec s(4, 0.0, 1.0);
  const std::vector<double> f{0.11, 0.52, -0.37, 0.8, 0.99};
  EXPECT_EQ(quantize_vector(f, s, 12).values, quantize_vector(f, s, 12).values);
}

TEST(QuantErrorBound, HundredFeaturesThreeBits) {
  NetworkModel net({LayerSpec::fully_connected(100, 10), LayerSpec::fully_connected(5, 100)}, 10);
  EXPECT_NEAR(quant_error_bound(net, 1, QuantSpec(3, 0.0, 1.0)), 100.0 / 36.0, 1e-12);
}

TEST(QuantErrorBound, DecreasesWithBits) {
  NetworkModel net({LayerSpec::fully_connected(100, 10), LayerSpec::fully_connected(5, 100)}, 10);
  double prev = INFINITY;
  for (int q = 2; q <= 16; ++q) {
    const double b = quant_error_bound(net, 1, QuantSpec(q, 0.0, 1.0));
    EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(QuantErrorBound, PoolingShortcut) {
  // 10x10x1 conv map followed by a 2x2 pool: 100 features, 25 after pooling.
  NetworkModel net({LayerSpec::conv(10, 10, 1, 3, 1), LayerSpec::max_pool(5, 5, 1, 2), LayerSpec::fully_connected(3, 25)},
                   144);
  const QuantSpec s(3, 0.0, 1.0);
  EXPECT_NEAR(quant_error_bound(net, 1, s), 0.25 * 25.0 / 9.0, 1e-12);
}

TEST(CalibrateRange, CoversSamples) {
  const std::vector<double> f{0.1, -0.7, 0.4};
  const auto s = calibrate_range(f, 4, 0.1);
  EXPECT_EQ(s.f_min(), 0.0);
  EXPECT_DOUBLE_EQ(s.f_max(), 0.77);
}
