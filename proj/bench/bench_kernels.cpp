// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "mfspec/partition.hpp"
#include "mfspec/presets.hpp"
#include "mfspec/verify.hpp"

namespace {

const mfspec::WeightSystem& sec63() {
  static const mfspec::WeightSystem ws = mfspec::preset("sec63").ws;
  return ws;
}

void BM_PartitionSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfspec::serial::partition_log_sum(sec63(), n, -2.0, mfspec::Target::Mu));
  }
}

void BM_PartitionParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mfspec::parallel::partition_log_sum(sec63(), n, -2.0, mfspec::Target::Mu));
  }
}

void BM_WqbSerial(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mfspec::serial::check_wqb(sec63(), d));
}

void BM_WqbParallel(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mfspec::parallel::check_wqb(sec63(), d));
}

}  // namespace

BENCHMARK(BM_PartitionSerial)->DenseRange(6, 9)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PartitionParallel)->DenseRange(6, 9)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WqbSerial)->DenseRange(3, 5)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WqbParallel)->DenseRange(3, 5)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
