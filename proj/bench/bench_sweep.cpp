#include <benchmark/benchmark.h>

#include <vector>

#include "streamscore/fluidsim.hpp"

using namespace streamscore::fluidsim;

namespace {

std::vector<double> grid(int n) {
  std::vector<double> out;
  for (int i = 1; i <= n; ++i) out.push_back(0.5 * i);
  return out;
}

Scenario base() {
  Scenario s;
  s.duration = 30;
  return s;
}

void BM_sweep_serial(benchmark::State& state) {
  const auto c = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(base(), c, {1, 2, 4, 8}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.size()) * 4);
}

void BM_sweep_openmp(benchmark::State& state) {
  const auto c = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(base(), c, {1, 2, 4, 8}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.size()) * 4);
}

}  // namespace

BENCHMARK(BM_sweep_serial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_openmp)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
