#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "iscc/netmodel.hpp"

using namespace iscc;

namespace {

NetworkModel fc_net(const std::vector<std::size_t>& widths, std::uint64_t seed = 3) {
  std::vector<double> rates;
  for (std::size_t i = 1; i < widths.size(); ++i) rates.push_back(unit_norm_laplace_rate(widths[i] * widths[i - 1]));
  return make_analysis_network(widths, rates, seed);
}

}  // namespace

TEST(Flops, FullyConnectedDense) { EXPECT_DOUBLE_EQ(flops(LayerSpec::fully_connected(60, 120), 1.0).value, 14340.0); }

TEST(Flops, FullyConnectedHalf) { EXPECT_DOUBLE_EQ(flops(LayerSpec::fully_connected(60, 120), 0.5).value, 7140.0); }

TEST(Flops, MaxPool) { EXPECT_DOUBLE_EQ(flops(LayerSpec::max_pool(14, 14, 6, 2), 0.3).value, 4704.0); }

TEST(Flops, Conv) { EXPECT_DOUBLE_EQ(flops(LayerSpec::conv(28, 28, 6, 5, 1), 1.0).value, 230496.0); }

TEST(Flops, AffineInRho) {
  for (const auto& layer : lenet_template().layers()) {
    const auto a = flops_affine(layer);
    EXPECT_GE(a.slope, 0.0);
    const double f1 = flops(layer, 0.4).value, f2 = flops(layer, 0.7).value, f3 = flops(layer, 1.0).value;
    // Equal spacing: the midpoint value is the mean of the ends.
    EXPECT_NEAR(f2 - f1, f3 - f2, 1e-9 * std::max(1.0, f3));
    EXPECT_NEAR(a.at(0.7), f2, 1e-9 * std::max(1.0, f3));
  }
}

TEST(Flops, ClampedAtZero) {
  const auto f = flops(LayerSpec::fully_connected(5, 2), 0.1);
  EXPECT_EQ(f.value, 0.0);
  EXPECT_TRUE(f.clamped);
}

TEST(CumFlops, SingleLayer) {
  const auto net = lenet_template();
  for (std::size_t l = 1; l <= net.depth(); ++l) {
    EXPECT_DOUBLE_EQ(cum_flops(net, l, l, 0.6), flops(net.layer(l), 0.6).value);
  }
}

TEST(CumFlops, FullRangeAdditive) {
  const auto net = lenet_template();
  double sum = 0.0;
  for (const auto& layer : net.layers()) sum += flops(layer, 1.0).value;
  EXPECT_DOUBLE_EQ(cum_flops(net, 1, net.depth(), 1.0), sum);
}

TEST(CumFlops, TwoFcLayersHalf) {
  NetworkModel net({LayerSpec::fully_connected(60, 120), LayerSpec::fully_connected(5, 60)}, 120);
  EXPECT_DOUBLE_EQ(cum_flops(net, 1, 2, 0.5), 7435.0);
}

TEST(FeatureDim, Cases) {
  const auto net = lenet_template();
  EXPECT_EQ(net.feature_dim(0), 1024u);
  EXPECT_EQ(net.feature_dim(2), 1176u);
  EXPECT_EQ(net.feature_dim(6), 60u);
}

TEST(NetworkModel, RejectsBrokenChain) {
  EXPECT_THROW(NetworkModel({LayerSpec::fully_connected(10, 20), LayerSpec::fully_connected(5, 11)}, 20),
               std::invalid_argument);
}

TEST(NetworkModel, DefaultSplitsCoverAllLayers) {
  const auto net = lenet_template();
  ASSERT_EQ(net.split_candidates().size(), net.depth() + 1);
  EXPECT_EQ(net.split_candidates().front(), 0u);
  EXPECT_EQ(net.split_candidates().back(), net.depth());
}

TEST(Forward, IdentityKeepsNonnegativeInput) {
  NetworkModel net({LayerSpec::fully_connected(4, 4), LayerSpec::fully_connected(4, 4)}, 4);
  net.set_weights(1, Eigen::MatrixXd::Identity(4, 4));
  net.set_weights(2, Eigen::MatrixXd::Identity(4, 4));
  Eigen::VectorXd x(4);
  x << 0.5, 0.0, 2.0, 1.0;
  EXPECT_EQ(forward(net, x, 2), x);
}

TEST(Forward, SingleLayerIsProduct) {
  const auto net = fc_net({6, 4});
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
  EXPECT_TRUE(forward(net, x, 1).isApprox(net.weights(1) * x, 1e-14));
}

TEST(Forward, MatchesIndependentChain) {
  const auto net = fc_net({8, 7, 6, 5});
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(8);
  for (auto& v : x) v = g(rng);
  // Plain loops, no Eigen products.
  std::vector<double> h(x.data(), x.data() + x.size());
  for (std::size_t l = 1; l <= 3; ++l) {
    const auto& w = net.weights(l);
    std::vector<double> next(static_cast<std::size_t>(w.rows()), 0.0);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        const double in = l > 1 ? std::max(0.0, h[static_cast<std::size_t>(c)]) : h[static_cast<std::size_t>(c)];
        next[static_cast<std::size_t>(r)] += w(r, c) * in;
      }
    }
    h = next;
  }
  const auto y = forward(net, x, 3);
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(y[static_cast<Eigen::Index>(i)], h[i], 1e-12);
}

TEST(Forward, ConvPrefixUnsupported) {
  auto net = lenet_template();
  fill_laplace_weights(net, std::vector<double>(5, 10.0), 1);
  EXPECT_THROW(forward(net, Eigen::VectorXd::Zero(1024), 1), UnsupportedNetwork);
}

TEST(Relu, OneLipschitz) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd u(20), v(20);
    for (auto& e : u) e = g(rng);
    for (auto& e : v) e = g(rng);
    EXPECT_LE((u.cwiseMax(0.0) - v.cwiseMax(0.0)).norm(), (u - v).norm());
  }
}

TEST(Prune, RhoOneIsIdentity) {
  const auto net = fc_net({6, 5, 4});
  const auto p = prune(net, 1.0, 2);
  for (std::size_t l = 1; l <= 2; ++l) EXPECT_EQ(p.weights(l), net.weights(l));
}

TEST(Prune, DropsSmallestMagnitudes) {
  Eigen::MatrixXd w(1, 4);
  w << 0.1, -0.5, 0.2, 0.9;
  Eigen::MatrixXd expect(1, 4);
  expect << 0.0, -0.5, 0.0, 0.9;
  EXPECT_EQ(prune_matrix(w, 0.5), expect);
}

TEST(Prune, FloorCount) {
  EXPECT_EQ(pruned_count(7, 0.3), 4u);
  Eigen::MatrixXd w = Eigen::RowVectorXd::LinSpaced(7, 1.0, 7.0);
  EXPECT_EQ((prune_matrix(w, 0.3).array() == 0.0).count(), 4);
}

TEST(Prune, ZeroSetsNested) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::MatrixXd w(9, 11);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = g(rng);
  for (double hi : {0.9, 0.7, 0.5}) {
    const auto a = prune_matrix(w, hi);
    const auto b = prune_matrix(w, hi - 0.2);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (a.data()[i] == 0.0) EXPECT_EQ(b.data()[i], 0.0);
    }
  }
}

TEST(Lemma2Bound, ZeroWhenUnpruned) {
  const auto net = fc_net({6, 5, 4});
  EXPECT_EQ(lemma2_bound(net, prune(net, 1.0, 2), 2), 0.0);
}

TEST(Lemma2Bound, SingleLayer) {
  const auto net = fc_net({10, 8});
  const auto p = prune(net, 0.6, 1);
  EXPECT_DOUBLE_EQ(lemma2_bound(net, p, 1), (net.weights(1) - p.weights(1)).squaredNorm());
}

TEST(Lemma2Bound, HoldsOnRandomTrials) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int t = 0; t < 300; ++t) {
    const auto net = fc_net({12, 9, 7, 5}, rng());
    const double rho = unit(rng);
    const auto p = prune(net, rho, 3);
    Eigen::VectorXd x(12);
    for (auto& e : x) e = g(rng);
    x.normalize();
    EXPECT_LE((forward(net, x, 3) - forward(p, x, 3)).squaredNorm(), lemma2_bound(net, p, 3));
  }
}

TEST(TailFrobenius, Cases) {
  NetworkModel net({LayerSpec::fully_connected(1, 1), LayerSpec::fully_connected(1, 1), LayerSpec::fully_connected(1, 1)},
                   1);
  net.set_weights(1, Eigen::MatrixXd::Constant(1, 1, 5.0));
  net.set_weights(2, Eigen::MatrixXd::Constant(1, 1, 2.0));
  net.set_weights(3, Eigen::MatrixXd::Constant(1, 1, -3.0));
  EXPECT_EQ(tail_frobenius(net, 3), 1.0);
  EXPECT_DOUBLE_EQ(tail_frobenius(net, 2), 3.0);
  EXPECT_DOUBLE_EQ(tail_frobenius(net, 1), 6.0);
}

TEST(TailFrobenius, Recurrence) {
  auto net = lenet_template();
  fill_laplace_weights(net, std::vector<double>{3.0, 5.0, 7.0, 9.0, 11.0}, 4);
  for (std::size_t l = 1; l <= net.depth(); ++l) {
    const double factor = net.layer(l).weighted() ? net.weights(l).norm() : 1.0;
    EXPECT_NEAR(tail_frobenius(net, l) * factor, tail_frobenius(net, l - 1), 1e-12 * tail_frobenius(net, l - 1));
  }
}

TEST(PruneCoeff, SingleLayer) {
  const auto net = fc_net({10, 6});
  const double rate = laplace_rate(net.weights(1));
  EXPECT_DOUBLE_EQ(prune_coeff(net, 1), 60.0 / (rate * rate));
}

TEST(PruneCoeff, ConstantMagnitudeLayer) {
  NetworkModel net({LayerSpec::fully_connected(2, 3)}, 3);
  Eigen::MatrixXd w(2, 3);
  w << 0.5, -0.5, 0.5, -0.5, 0.5, 0.5;
  net.set_weights(1, w);
  EXPECT_DOUBLE_EQ(laplace_rate(w), 2.0);
  EXPECT_DOUBLE_EQ(prune_coeff(net, 1), 6.0 * 0.25);
}

TEST(PruneCoeff, TwoLayerRecomputation) {
  const auto net = fc_net({7, 6, 4}, 21);
  auto stats = [](const Eigen::MatrixXd& w) {
    double abs_sum = 0.0, sq = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      abs_sum += std::abs(w.data()[i]);
      sq += w.data()[i] * w.data()[i];
    }
    const double m = static_cast<double>(w.size());
    const double rate = m / abs_sum;
    return std::pair{m / (rate * rate), sq};
  };
  const auto [s1, n1] = stats(net.weights(1));
  const auto [s2, n2] = stats(net.weights(2));
  EXPECT_NEAR(prune_coeff(net, 2), s1 * n2 + s2 * n1, 1e-12 * (s1 * n2 + s2 * n1));
}
