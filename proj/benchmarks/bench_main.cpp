#include <benchmark/benchmark.h>

#include "slowbond/measures.hpp"
#include "slowbond/oracle.hpp"
#include "slowbond/pde.hpp"
#include "slowbond/simulator.hpp"

using namespace slowbond;

namespace {

// Event throughput of the exact simulator, event by event.
void BM_Step(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LatticeSpec spec(n, n, 1.0, 1.5);
  const EdgeSampler sampler(spec);
  Rng init(1);
  SimState s = make_state(sample_initial(spec, sine_profile(0.5, 0.25), init), 2);
  for (auto _ : state) benchmark::DoNotOptimize(step(s, sampler));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step)->Arg(8)->Arg(32)->Arg(128);

// run_until skips holding times; items are clock rings.
void BM_RunUntil(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LatticeSpec spec(n, 4, 1.0, 1.5);
  Rng init(1);
  const Configuration start = sample_initial(spec, sine_profile(0.5, 0.25), init);
  std::uint64_t events = 0;
  for (auto _ : state) {
    SimState s = make_state(start, 3);
    run_until(s, spec, Critical{}, 0.001);
    events += s.events;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_RunUntil)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_IntegratedStatistic(benchmark::State& state) {
  const LatticeSpec spec(32, 2, 1.0, 1.5);
  const auto weights = mixing_weights(spec, make_test_function("sin(2pi u)"));
  Rng init(1);
  const Configuration start = sample_initial(spec, sine_profile(0.5, 0.25), init);
  for (auto _ : state) {
    SimState s = make_state(start, 4);
    benchmark::DoNotOptimize(
        integrated_statistic(spec, make_subcritical(0.5), weights, s, 0.01, kDefaultEventBudget));
  }
}
BENCHMARK(BM_IntegratedStatistic)->Unit(benchmark::kMillisecond);

void BM_EvolveMaster(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const LatticeSpec spec(n, 2, 1.0, 1.5);
  const auto q = build_generator_matrix(spec);
  const auto mu0 = initial_product_measure(spec, sine_profile(0.5, 0.25)).to_distribution();
  const double speedup = speedup_factor(spec, Critical{});
  for (auto _ : state) benchmark::DoNotOptimize(evolve_master(q, speedup, mu0, 0.05));
}
BENCHMARK(BM_EvolveMaster)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_DiscreteHeat(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto rho0 = box_average_profile(sine_profile(0.5, 0.25), k);
  for (auto _ : state) benchmark::DoNotOptimize(solve_discrete_heat(rho0, 1.0, 0.05));
}
BENCHMARK(BM_DiscreteHeat)->Arg(4)->Arg(64)->Arg(512);

void BM_ContinuousHeat(benchmark::State& state) {
  const Profile gamma = bump_profile(0.25, 0.5, 0.3, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_continuous_heat(gamma, 1.0, 0.05));
}
BENCHMARK(BM_ContinuousHeat);

}  // namespace

BENCHMARK_MAIN();
