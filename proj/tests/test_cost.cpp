#include <cmath>

#include <gtest/gtest.h>

#include "iscc/accuracy.hpp"
#include "iscc/cost.hpp"
#include "iscc/netmodel.hpp"

using namespace iscc;

namespace {

NetworkModel fc_chain() {
  NetworkModel net({LayerSpec::fully_connected(120, 400), LayerSpec::fully_connected(60, 120),
                    LayerSpec::fully_connected(5, 60)},
                   400);
  fill_laplace_weights(net, std::vector<double>{20.0, 10.0, 5.0}, 2);
  return net;
}

Allocation some_alloc() {
  Allocation a;
  a.split = 1;
  a.bits = 4;
  a.rho = 0.7;
  a.sensing_power = 0.02;
  a.comm_power = 0.1;
  a.edge_freq = 4e6;
  return a;
}

}  // namespace

TEST(CommCost, DefaultScenarioExample) {
  const auto net = fc_chain();
  const Scenario sc;
  const auto c = comm_cost(1, 4, 0.1, net, sc);
  EXPECT_NEAR(sc.rate(0.1), 345943.0, 1.0);
  EXPECT_NEAR(c.latency, 1.3875e-3, 1e-7);
  EXPECT_NEAR(c.energy, 1.3875e-4, 1e-8);
}

TEST(CommCost, OnDeviceIsFree) {
  const auto net = fc_chain();
  const auto c = comm_cost(net.depth(), 4, 0.1, net, Scenario{});
  EXPECT_EQ(c.latency, 0.0);
  EXPECT_EQ(c.energy, 0.0);
}

TEST(CommCost, LinearInBits) {
  const auto net = fc_chain();
  const Scenario sc;
  const auto a = comm_cost(2, 3, 0.2, net, sc);
  const auto b = comm_cost(2, 6, 0.2, net, sc);
  EXPECT_DOUBLE_EQ(b.latency, 2.0 * a.latency);
  EXPECT_DOUBLE_EQ(b.energy, 2.0 * a.energy);
}

TEST(CommCost, PowerShape) {
  const auto net = fc_chain();
  const Scenario sc;
  EXPECT_GT(comm_cost(1, 4, 1e-9, net, sc).energy, 1e3 * comm_cost(1, 4, 1.0, net, sc).energy * 1e-6);
  // Small power: energy approaches payload ln2 / (B snr) from above.
  const double floor = 480.0 * std::log(2.0) / (sc.bandwidth * sc.snr);
  EXPECT_GT(comm_cost(1, 4, 1e-6, net, sc).energy, floor);
  // Large power: energy grows roughly linearly.
  const double e1 = comm_cost(1, 4, 1e6, net, sc).energy, e2 = comm_cost(1, 4, 2e6, net, sc).energy;
  EXPECT_NEAR(e2 / e1, 2.0, 0.15);
  double prev = INFINITY;
  for (double p = 0.01; p < 1.0; p += 0.05) {
    const double t = comm_cost(1, 4, p, net, sc).latency;
    EXPECT_LT(t, prev);
    prev = t;
  }
}

TEST(CompCost, RawUploadHasNoEdgeCost) {
  const auto net = fc_chain();
  const auto c = comp_cost(0, 0.5, 4e6, net, Scenario{});
  EXPECT_EQ(c.energy, 0.0);
  EXPECT_EQ(c.edge_latency, 0.0);
  EXPECT_GT(c.server_latency, 0.0);
}

TEST(CompCost, KnownEnergy) {
  // Single FC layer of exactly 1e7 FLOPs at rho = 1: (2 * 5e6 * 1 - 1) * 1 + 1.
  NetworkModel net({LayerSpec::fully_connected(2, 2500001)}, 2500001);
  const double f = cum_flops(net, 1, 1, 1.0);
  const auto c = comp_cost(1, 1.0, 8e6, net, Scenario{});
  EXPECT_NEAR(c.energy, 1e-21 * f * 6.4e13, 1e-15);
  EXPECT_NEAR(1e-21 * 1e7 * 8e6 * 8e6, 0.64, 1e-12);
}

TEST(CompCost, QuadraticInFrequency) {
  const auto net = fc_chain();
  const Scenario sc;
  const double e1 = comp_cost(2, 0.6, 1e6, net, sc).energy;
  const double e2 = comp_cost(2, 0.6, 2e6, net, sc).energy;
  const double e3 = comp_cost(2, 0.6, 3e6, net, sc).energy;
  EXPECT_NEAR(e2, 4.0 * e1, 1e-15);
  EXPECT_NEAR(e3, 9.0 * e1, 1e-15);
}

TEST(TotalCost, SumsComponents) {
  const auto net = fc_chain();
  const Scenario sc;
  const auto a = some_alloc();
  const auto c = total_cost(a, net, sc);
  const auto comm = comm_cost(a.split, a.bits, a.comm_power, net, sc);
  const auto comp = comp_cost(a.split, a.rho, a.edge_freq, net, sc);
  EXPECT_EQ(c.e_comm, comm.energy);
  EXPECT_EQ(c.e_comp, comp.energy);
  EXPECT_NEAR(c.e_total, c.e_sen + c.e_comp + c.e_comm, 1e-15 * c.e_total);
  EXPECT_NEAR(c.t_total, c.t_sen + c.t_comp_e + c.t_comp_s + c.t_comm, 1e-15 * c.t_total);
}

TEST(TotalCost, SensingEnergy) {
  const auto net = fc_chain();
  auto a = some_alloc();
  a.sensing_power = 0.0189;
  EXPECT_NEAR(total_cost(a, net, Scenario{}).e_sen, 9.45e-3, 1e-15);
}

TEST(TotalCost, ZeroFlopNetwork) {
  NetworkModel net({LayerSpec::fully_connected(1, 1)}, 1);
  auto a = some_alloc();
  a.rho = 0.2;  // (2 * 0.2 - 1) * 1 < 0, clamped
  EXPECT_EQ(total_cost(a, net, Scenario{}).e_comp, 0.0);
}

TEST(TotalCost, Monotonicity) {
  const auto net = fc_chain();
  const Scenario sc;
  const auto a = some_alloc();
  auto with = [&](auto mutate) {
    Allocation b = a;
    mutate(b);
    return total_cost(b, net, sc);
  };
  EXPECT_LT(with([](Allocation& b) { b.edge_freq = 5e6; }).t_total, total_cost(a, net, sc).t_total);
  EXPECT_LT(with([](Allocation& b) { b.comm_power = 0.2; }).t_total, total_cost(a, net, sc).t_total);
  EXPECT_GT(with([](Allocation& b) { b.sensing_power = 0.03; }).e_total, total_cost(a, net, sc).e_total);
  EXPECT_GT(with([](Allocation& b) { b.edge_freq = 5e6; }).e_total, total_cost(a, net, sc).e_total);
}

TEST(CheckFeasible, FlagsLatencyOvershoot) {
  const auto net = fc_chain();
  Scenario sc;
  AccuracyParams ap;
  const auto a = some_alloc();
  const auto terms = penalty_terms(net, a.split, ap);
  sc.r_t = 0.0;
  const double total = total_cost(a, net, sc).t_total;
  sc.t_max = total - 0.01;
  const auto r = check_feasible(a, net, sc, terms, ap);
  EXPECT_FALSE(r.at("C2").pass);
  EXPECT_NEAR(r.at("C2").slack, -0.01, 1e-12);
  for (const auto& c : r.checks) {
    if (c.name != "C2") EXPECT_TRUE(c.pass) << c.name;
  }
}

TEST(CheckFeasible, OneBitRejected) {
  const auto net = fc_chain();
  auto a = some_alloc();
  a.bits = 1;
  const auto r = check_feasible(a, net, Scenario{}, penalty_terms(net, 1, AccuracyParams{}), AccuracyParams{});
  EXPECT_FALSE(r.at("C7").pass);
  EXPECT_FALSE(r.feasible());
}

TEST(Scenario, Validation) {
  Scenario sc;
  sc.r_t = 1.0;
  EXPECT_THROW(sc.validate(), std::invalid_argument);
  sc = Scenario{};
  sc.q_max = 1;
  EXPECT_THROW(sc.validate(), std::invalid_argument);
  EXPECT_DOUBLE_EQ(Scenario{}.sensing_time(), 0.5);
}
