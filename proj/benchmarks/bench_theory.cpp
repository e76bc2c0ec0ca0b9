#include <benchmark/benchmark.h>

#include "coalgene/infer.hpp"
#include "coalgene/theory.hpp"

using namespace coalgene;

static void BM_VarianceRecursion(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    // Fresh memo table per evaluation; measures the full recursion cost.
    theory::UnlostLengthProduct g(2.03);
    benchmark::DoNotOptimize(g(n, 0, 0));
  }
}
BENCHMARK(BM_VarianceRecursion)->Arg(10)->Arg(50)->Arg(200);

static void BM_SpectrumMeanRow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double total = 0.0;
    for (int k = 1; k <= n; ++k) total += theory::spectrum_mean(n, k, 1.0, 2.03);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_SpectrumMeanRow)->Arg(9)->Arg(100);

static void BM_FitParams(benchmark::State& state) {
  const std::vector<double> observed = predicted_spectrum(
      9, ModelParams{.theta = 1142.17, .rho = 2.03, .core_size = 1270});
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_params(observed));
  }
}
BENCHMARK(BM_FitParams);

BENCHMARK_MAIN();
