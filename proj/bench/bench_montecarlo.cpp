// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP kernels. Speedup depends on the core count;
// on a single core the two paths should cost about the same.
#include <benchmark/benchmark.h>

#include "jdcc/montecarlo.hpp"
#include "jdcc/outage.hpp"
#include "jdcc/scenario.hpp"

namespace {

void BM_Outages(benchmark::State& state, jdcc::Execution exec) {
  const jdcc::Scenario s = jdcc::default_scenario();
  const jdcc::OutageSpec spec{1e-2, 3.0 * s.system.plant.sigma_w2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(jdcc::estimate_outages(spec, s.system, state.range(0), s.seed, exec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ClosedLoop(benchmark::State& state, jdcc::Execution exec) {
  const jdcc::Scenario s = jdcc::default_scenario();
  const jdcc::LinkQuality q{10.0, 10.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(jdcc::simulate_closed_loop(s.system.plant, q, 30, state.range(0), s.seed, 1.0, exec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 30);
}

void BM_JointOutageAnalytic(benchmark::State& state) {
  const jdcc::Scenario s = jdcc::default_scenario();
  const jdcc::OutageSpec spec{1e-2, 3.0 * s.system.plant.sigma_w2};
  for (auto _ : state) benchmark::DoNotOptimize(jdcc::joint_outage_mrt(spec, s.system));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Outages, serial, jdcc::Execution::serial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Outages, parallel, jdcc::Execution::parallel)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ClosedLoop, serial, jdcc::Execution::serial)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ClosedLoop, parallel, jdcc::Execution::parallel)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JointOutageAnalytic)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
