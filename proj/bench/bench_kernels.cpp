// Copyright 2026 The mdisteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "mdisteer/steering.hpp"
#include "mdisteer/sweep.hpp"

namespace {

using namespace mdisteer;

protocol::CountsTable counts(int trials) {
  const auto mubs = scenario::two_mubs(3);
  const auto table = protocol::correlations(scenario::isotropic(3, 0.987).matrix, mubs, mubs);
  return protocol::synthetic_counts(table, 3e4, trials, 1);
}

template <bool Parallel>
void BM_PoissonMcSteering(benchmark::State& state) {
  const auto c = counts(static_cast<int>(state.range(0)));
  const auto f = scenario::steering_functional_two_mubs(3);
  const auto stat = [&](const protocol::CorrelationTable& t) { return protocol::steering_parameter(t, f).S; };
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? protocol::poisson_mc(c, stat) : protocol::poisson_mc_serial(c, stat));
}

template <bool Parallel>
void BM_PoissonMcMinEntropy(benchmark::State& state) {
  const auto c = counts(static_cast<int>(state.range(0)));
  const auto mubs = scenario::two_mubs(3);
  const auto stat = [&](const protocol::CorrelationTable& t) {
    return steering::guessing_probability(t, mubs, steering::RandomnessMode::FullTable).h_min;
  };
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? protocol::poisson_mc(c, stat) : protocol::poisson_mc_serial(c, stat));
}

template <bool Parallel>
void BM_ScanLhsModels(benchmark::State& state) {
  const auto f = scenario::steering_functional_two_mubs(3);
  const auto bob = scenario::two_mubs(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(Parallel ? protocol::scan_lhs_models(f, bob, state.range(0), 7)
                                      : protocol::scan_lhs_models_serial(f, bob, state.range(0), 7));
}

template <bool Parallel>
void BM_Sweep(benchmark::State& state) {
  sweep::SweepConfig c;
  c.grid = sweep::SweepConfig::linspace(0.6, 1.0, static_cast<int>(state.range(0)));
  c.trials = 10;
  for (auto _ : state) benchmark::DoNotOptimize(Parallel ? sweep::run_sweep(c) : sweep::run_sweep_serial(c));
}

BENCHMARK(BM_PoissonMcSteering<false>)->Arg(100)->Arg(1000);
BENCHMARK(BM_PoissonMcSteering<true>)->Arg(100)->Arg(1000);
BENCHMARK(BM_PoissonMcMinEntropy<false>)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PoissonMcMinEntropy<true>)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanLhsModels<false>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanLhsModels<true>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<false>)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<true>)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
