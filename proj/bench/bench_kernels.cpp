// Parallel kernels against their serial references, and the O(m^2) meter
// path against the dense conditioning pipeline.

#include <benchmark/benchmark.h>

#include "cvretro/chain.hpp"
#include "cvretro/fock.hpp"
#include "cvretro/joint_measurement.hpp"
#include "cvretro/meter_kernels.hpp"

using namespace cvretro;

namespace {

Scenario scenario_for(const benchmark::State& state) {
  return Scenario::equidistant(static_cast<int>(state.range(0)), 1.0, 2.0, -2.0);
}

void BM_MeterMoments(benchmark::State& state) {
  const Scenario sc = scenario_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::meter_system_moments(sc));
}

void BM_MeterMomentsSerial(benchmark::State& state) {
  const Scenario sc = scenario_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::meter_system_moments_serial(sc));
}

void BM_RetrodictStructured(benchmark::State& state) {
  const Scenario sc = scenario_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(retrodict_meter_stats(sc));
}

void BM_RetrodictDense(benchmark::State& state) {
  const Scenario sc = scenario_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(retrodict_meter_stats_reference(sc));
}

void chain_bench(benchmark::State& state, bool parallel) {
  const Scenario sc = Scenario::equidistant(4, 1.0, 0.0, 0.0);
  const oracle::ChainModel model(sc);
  const oracle::TrialSampler sampler = [&](oracle::SplitMix64& rng, Vector& out) { model.sample(rng, out); };
  const long long trials = state.range(0);
  for (auto _ : state) {
    auto acc = parallel ? oracle::accumulate_trials(model.dimension(), trials, 7, sampler)
                        : oracle::accumulate_trials_serial(model.dimension(), trials, 7, sampler);
    benchmark::DoNotOptimize(acc.mean);
  }
  state.SetItemsProcessed(state.iterations() * trials);
}

void BM_ChainParallel(benchmark::State& state) { chain_bench(state, true); }
void BM_ChainSerial(benchmark::State& state) { chain_bench(state, false); }

void fock_bench(benchmark::State& state, bool parallel) {
  const auto rho = oracle::build_tmss_fock(1.5, static_cast<int>(state.range(0)));
  const auto grid = oracle::uniform_grid(-8, 8, 401);
  for (auto _ : state) {
    auto d = parallel ? oracle::quadrature_marginal_fock(rho, {0, 0.4}, grid)
                      : oracle::quadrature_marginal_fock_serial(rho, {0, 0.4}, grid);
    benchmark::DoNotOptimize(d.data());
  }
}

void BM_FockMarginalParallel(benchmark::State& state) { fock_bench(state, true); }
void BM_FockMarginalSerial(benchmark::State& state) { fock_bench(state, false); }

}  // namespace

BENCHMARK(BM_MeterMoments)->RangeMultiplier(4)->Range(16, 4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MeterMomentsSerial)->RangeMultiplier(4)->Range(16, 4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RetrodictStructured)->RangeMultiplier(4)->Range(4, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RetrodictDense)->RangeMultiplier(4)->Range(4, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ChainParallel)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainSerial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FockMarginalParallel)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FockMarginalSerial)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
