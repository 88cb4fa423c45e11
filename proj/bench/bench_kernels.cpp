#include <vector>

#include <benchmark/benchmark.h>

#include "iscc/kernels.hpp"

using namespace iscc;
using kernels::Exec;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_OrderStat(benchmark::State& st) {
  const std::vector<double> rhos{0.1, 0.3, 0.5, 0.7, 0.9};
  for (auto _ : st) benchmark::DoNotOptimize(kernels::order_stat_trials(100000, 1.0, rhos, 16, 1, exec_of(st)));
}

void BM_Lemma2(benchmark::State& st) {
  const std::vector<std::size_t> widths{32, 24, 16, 8};
  for (auto _ : st) benchmark::DoNotOptimize(kernels::lemma2_trials(widths, 2000, 1, exec_of(st)));
}

void BM_Quant(benchmark::State& st) {
  const QuantSpec spec(4, 0.0, 1.0);
  std::vector<double> f(100);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = (i % 2 ? 1.0 : -1.0) * static_cast<double>(i) / 100.0;
  for (auto _ : st) benchmark::DoNotOptimize(kernels::quant_trials(f, spec, 20000, 1, exec_of(st)));
}

void BM_GridPcNue(benchmark::State& st) {
  const Scenario sc;
  SubproblemContext ctx;
  ctx.a1 = 4.8e-3;
  ctx.a2 = 1e5;
  ctx.t2 = 0.05;
  for (auto _ : st) benchmark::DoNotOptimize(kernels::grid_pc_nue(ctx, sc, 400, exec_of(st)));
}

}  // namespace

// Arg 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_OrderStat)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lemma2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Quant)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridPcNue)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
