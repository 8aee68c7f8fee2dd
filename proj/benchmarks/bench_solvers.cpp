#include <benchmark/benchmark.h>

#include "spectrum/best_response.hpp"
#include "spectrum/equilibrium.hpp"
#include "spectrum/oracle.hpp"
#include "spectrum/presets.hpp"
#include "spectrum/sweep.hpp"

using namespace spectrum;

static void BM_AllocateTwoClass(benchmark::State& state) {
  const MarketConfig m = two_class_box_market({}, 0.3);
  const PriceProfile p = uniform_profile(m, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(allocate(m, p));
}
BENCHMARK(BM_AllocateTwoClass);

static void BM_AllocateConvex(benchmark::State& state) {
  MarketConfig m = homogeneous_box_market({}, 0.8);
  m.unlicensed.latency.exponent = 2.0;
  const PriceProfile p = uniform_profile(m, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(allocate(m, p));
}
BENCHMARK(BM_AllocateConvex);

static void BM_DiscretizedWardrop(benchmark::State& state) {
  const MarketConfig m = two_class_box_market({}, 0.3);
  const PriceProfile p = uniform_profile(m, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(discretized_wardrop(m, p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DiscretizedWardrop)->Arg(100)->Arg(1000);

static void BM_BestResponseClosedForm(benchmark::State& state) {
  const MarketConfig m = homogeneous_box_market({}, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(best_response_homogeneous(m, 0.6));
}
BENCHMARK(BM_BestResponseClosedForm);

static void BM_BestResponsePiecewise(benchmark::State& state) {
  const MarketConfig m = two_class_box_market({}, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(best_response_heterogeneous(m, 0.3));
}
BENCHMARK(BM_BestResponsePiecewise)->Unit(benchmark::kMillisecond);

static void BM_BestResponseGeneric(benchmark::State& state) {
  MarketConfig m = homogeneous_box_market({}, 0.6);
  m.providers[0].licensed->exponent = 2.0;
  const PriceProfile rivals = uniform_profile(m, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(best_response_generic(m, 0.6, rivals));
}
BENCHMARK(BM_BestResponseGeneric)->Unit(benchmark::kMicrosecond);

static void BM_SolveSymmetric(benchmark::State& state) {
  const MarketConfig m = symmetric_linear_market(static_cast<int>(state.range(0)), 4.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_symmetric_N(m));
}
BENCHMARK(BM_SolveSymmetric)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_SweepHomogeneous(benchmark::State& state) {
  const MarketConfig m = homogeneous_box_market({}, 0.0);
  const auto grid = default_capacity_grid(400);
  SweepOptions o;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sweep_capacity(m, grid, o));
}
BENCHMARK(BM_SweepHomogeneous)->Unit(benchmark::kMillisecond);

static void BM_SweepTwoClass(benchmark::State& state) {
  const MarketConfig m = two_class_box_market({}, 0.0);
  const auto grid = default_capacity_grid(static_cast<int>(state.range(0)));
  SweepOptions o;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sweep_capacity(m, grid, o));
}
BENCHMARK(BM_SweepTwoClass)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_GridBestResponse(benchmark::State& state) {
  const MarketConfig m = homogeneous_box_market({}, 1.0);
  const PriceProfile rivals = uniform_profile(m, 0.0);
  const GridSpec grid{0.0, 1.0, 10001, 0};
  for (auto _ : state) benchmark::DoNotOptimize(grid_best_response(m, 1.0, rivals, grid));
}
BENCHMARK(BM_GridBestResponse)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
