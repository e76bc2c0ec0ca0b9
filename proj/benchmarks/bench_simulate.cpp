#include <benchmark/benchmark.h>

#include "coalgene/gene_process.hpp"
#include "coalgene/stats.hpp"

using namespace coalgene;

static void BM_SampleKingman(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_kingman(n, rng));
  }
}
BENCHMARK(BM_SampleKingman)->Arg(10)->Arg(100)->Arg(1000);

static void BM_SimulateGenes(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double theta = static_cast<double>(state.range(1));
  const ModelParams params{.theta = theta, .rho = 2.03};
  Rng tree_rng(2);
  const Genealogy tree = sample_kingman(n, tree_rng);
  Rng rng(3);
  PresenceMatrix matrix(n);
  for (auto _ : state) {
    simulate_genes_into(tree, params, rng, matrix);
    benchmark::DoNotOptimize(matrix.gene_count());
  }
}
BENCHMARK(BM_SimulateGenes)->Args({9, 10})->Args({9, 1142})->Args({50, 100});

static void BM_HoppeUrnSpectrum(benchmark::State& state) {
  const ModelParams params{.theta = static_cast<double>(state.range(0)), .rho = 2.03};
  Rng rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hoppe_urn_spectrum(9, params, rng));
  }
}
BENCHMARK(BM_HoppeUrnSpectrum)->Arg(10)->Arg(1142);

static void BM_IncongruenceStatistic(benchmark::State& state) {
  const auto genes = static_cast<std::uint64_t>(state.range(0));
  Rng rng(5);
  PresenceMatrix m(9);
  std::vector<std::uint64_t> mask(1);
  for (std::uint64_t g = 0; g < genes; ++g) {
    mask[0] = 0;
    for (int i = 0; i < 9; ++i) {
      if (rng.bernoulli(0.5)) mask[0] |= std::uint64_t{1} << i;
    }
    if (mask[0] == 0) mask[0] = 1;
    m.add_gene(g, GeneOrigin::kExternal, mask);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(incongruence_statistic(m));
  }
}
BENCHMARK(BM_IncongruenceStatistic)->Arg(50)->Arg(500);
