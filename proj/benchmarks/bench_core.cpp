/*
 Copyright 2026 The COP Planner Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Microbenchmarks for the hot paths of one mission evaluation at desk scale.

#include <benchmark/benchmark.h>

#include "cop/config.hpp"
#include "cop/mission.hpp"
#include "cop/observability.hpp"
#include "cop/scalarization.hpp"
#include "cop/sensitivity.hpp"

namespace {

cop::Mission desk_mission() {
  const cop::RunConfig cfg = cop::RunConfig::desk();
  return cop::Mission(cfg.mission, cfg.evaluation);
}

void BM_SimulateNominal(benchmark::State& state) {
  const cop::Mission mission = desk_mission();
  const cop::VecX a = mission.layout().straight_line();
  for (auto _ : state) benchmark::DoNotOptimize(mission.simulate_nominal(a));
}
BENCHMARK(BM_SimulateNominal)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
  const cop::Mission mission = desk_mission();
  const cop::VecX a = mission.layout().straight_line();
  for (auto _ : state) benchmark::DoNotOptimize(mission.propagate(a));
}
BENCHMARK(BM_Propagate)->Unit(benchmark::kMillisecond);

void BM_Gramian(benchmark::State& state) {
  const cop::Mission mission = desk_mission();
  const cop::SimTrace trace = mission.simulate_nominal(mission.layout().straight_line());
  for (auto _ : state) benchmark::DoNotOptimize(mission.gramian(trace));
}
BENCHMARK(BM_Gramian)->Unit(benchmark::kMillisecond);

void BM_EvaluateAll(benchmark::State& state) {
  const cop::Mission mission = desk_mission();
  const cop::VecX a = mission.layout().straight_line();
  for (auto _ : state) benchmark::DoNotOptimize(mission.evaluate(a));
}
BENCHMARK(BM_EvaluateAll)->Unit(benchmark::kMillisecond);

void BM_Tchebycheff(benchmark::State& state) {
  cop::MatX costs(3, 3);
  costs << 7.8e3, 9.2e7, -0.039, 8.0e3, 9.1e7, -0.040, 8.1e3, 9.3e7, -0.041;
  const cop::ParetoAnchors anchors = cop::compute_anchors(costs);
  const cop::VecX w = cop::VecX::Constant(3, 1.0 / 3.0);
  cop::ObjectiveVector f(3);
  f << 7.9e3, 9.15e7, -0.0405;
  const auto mode = static_cast<cop::Augmentation>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cop::tchebycheff(f, anchors, w, 1e-4, mode));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_Tchebycheff)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
