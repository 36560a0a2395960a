// Serial vs OpenMP versions of the grid oracle, the subset enumeration and the seed loop.

#include "uasn/harness.hpp"
#include "uasn/kernels.hpp"
#include "uasn/orns.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace uasn;

namespace {

PlacementProblem bench_problem() {
  const Config cfg;
  const Instance inst = generate_instance(40, cfg, 7, 0.25);
  const EnergyModel model = cfg.model();
  const int c = find_critical_node(inst.rates, inst.deployment, model);
  return make_placement_problem(c, upper_neighbors(c, inst.rates), inst.rates, inst.deployment, model);
}

void BM_GridSerial(benchmark::State& state) {
  const auto prob = bench_problem();
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_search_serial(prob, k, {}));
}

void BM_GridParallel(benchmark::State& state) {
  const auto prob = bench_problem();
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_search_parallel(prob, k, {}));
}

SubsetScore toy_eval(std::uint64_t mask) {
  SubsetScore s;
  s.mask = mask;
  s.kept = std::popcount(mask);
  double acc = 0.0;
  for (int i = 0; i < 16; ++i) acc += ((mask >> i) & 1u) ? std::sin(i + 1.0) : std::cos(i + 1.0);
  s.objective = acc;
  s.feasible = s.kept >= 4;
  return s;
}

void BM_SubsetSerial(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(best_subset_serial(m, toy_eval));
}

void BM_SubsetParallel(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(best_subset_parallel(m, toy_eval));
}

void BM_Experiment(benchmark::State& state) {
  const Config cfg;
  const Scenario sc{case_spec("A"), 20, seed_range(1, 8), Method::ORNS, false};
  const auto policy = state.range(0) == 0 ? ExecPolicy::Serial : ExecPolicy::Parallel;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(sc, cfg, policy));
}

}  // namespace

BENCHMARK(BM_GridSerial)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsetSerial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsetParallel)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Experiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
