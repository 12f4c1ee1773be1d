#include <benchmark/benchmark.h>

#include <cstdint>

#include "lacunary/asymptotics.hpp"
#include "lacunary/gauss.hpp"
#include "lacunary/series.hpp"

namespace {

using namespace lacunary;

DD block_shift(std::uint64_t N, std::int64_t q) {
  return DD(0.25 / (static_cast<double>(N) * static_cast<double>(q)));
}

void BM_DyadicBlock(benchmark::State& state) {
  const auto N = static_cast<std::uint64_t>(state.range(0));
  const std::int64_t q = state.range(1);
  const PointDecomposition d = make_decomposition(1, q, block_shift(N, q));
  for (auto _ : state) benchmark::DoNotOptimize(dyadic_block(0.75, N, d));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * N));
}

void BM_FastBlock(benchmark::State& state) {
  const auto N = static_cast<std::uint64_t>(state.range(0));
  const std::int64_t q = state.range(1);
  const DD h = block_shift(N, q);
  cached_gauss_theta(1, q);
  for (auto _ : state) benchmark::DoNotOptimize(fast_block(0.75, N, 1, q, h));
}

void BM_GaussFamily(benchmark::State& state) {
  const std::int64_t q = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(gauss_theta_family(q));
}

void block_args(benchmark::internal::Benchmark* b) {
  for (std::int64_t N : {1 << 14, 1 << 17, 1 << 20}) {
    for (std::int64_t q : {3, 257, 1021}) b->Args({N, q});
  }
}

}  // namespace

BENCHMARK(BM_DyadicBlock)->Apply(block_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FastBlock)->Apply(block_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GaussFamily)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
