// Null-table simulation: OpenMP kernel against the serial reference.

#include <benchmark/benchmark.h>

#include <vector>

#include "cvxdiv/nulldist.hpp"

namespace {

using namespace cvxdiv;

StatisticSpec spec_for(int kind) {
  StatisticSpec spec;
  if (kind == 1) {
    spec.kind = StatisticKind::k_sample;
  } else if (kind == 2) {
    spec.kind = StatisticKind::tau;
    spec.generator = exp_sq_generator(1.0);
  }
  return spec;
}

std::vector<std::size_t> sizes_for(int kind, std::size_t n) {
  if (kind == 1) return {n, n, n};
  return {n, n};
}

void BM_Parallel(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  const auto sizes = sizes_for(static_cast<int>(state.range(0)), state.range(1));
  for (auto _ : state) {
    auto table = simulate_null(spec, sizes, 2000, 7);
    benchmark::DoNotOptimize(table.replicates.data());
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}

void BM_Serial(benchmark::State& state) {
  const auto spec = spec_for(static_cast<int>(state.range(0)));
  const auto sizes = sizes_for(static_cast<int>(state.range(0)), state.range(1));
  for (auto _ : state) {
    auto table = reference::simulate_null(spec, sizes, 2000, 7);
    benchmark::DoNotOptimize(table.replicates.data());
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}

// Args: {kind (0 two-sample, 1 three-sample, 2 tau), per-sample size}.
BENCHMARK(BM_Parallel)->ArgsProduct({{0, 1, 2}, {20, 200}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Serial)->ArgsProduct({{0, 1, 2}, {20, 200}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
