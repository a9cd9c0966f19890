#include <benchmark/benchmark.h>

#include "graspguard/batch.hpp"

using namespace graspguard;

namespace {

// A grid of cube scenarios with varied model scales, four filters each.
std::vector<RunJob> grid(int scenarios) {
  std::vector<RunJob> jobs;
  for (int i = 0; i < scenarios; ++i) {
    Scenario sc;
    sc.name = "grid" + std::to_string(i);
    sc.duration = 2.0;
    sc.stiffness_scale = 0.55 + 0.05 * (i % 4);
    sc.damping_scale = sc.stiffness_scale;
    sc.disturbance = DisturbanceSpec{DisturbanceShape::ramp, 3.0, 10.0, 1.0, 3.0, 1.0, 0.0};
    sc.seed = static_cast<unsigned long long>(i + 1);
    for (auto v : all_filter_variants()) jobs.push_back({sc, v});
  }
  return jobs;
}

void BM_Serial(benchmark::State& state) {
  const auto jobs = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_jobs_serial(jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(jobs.size()));
}

void BM_Parallel(benchmark::State& state) {
  const auto jobs = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_jobs_parallel(jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(jobs.size()));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
