// Copyright 2026 The spioc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <memory>

#include <benchmark/benchmark.h>

#include "spioc/candidates.h"
#include "spioc/cost.h"
#include "spioc/forward_solver.h"
#include "spioc/learner.h"

namespace spioc {
namespace {

// saturating pendulum trajectory (Q = 10 I, unit u^2 weight, |u| <= 5)
const Trajectory& SaturatedPendulum() {
  static const Trajectory data = [] {
    CandidateSet box;
    box.rows.push_back({{{SignalKind::kInput, 0}}, VectorXd::Ones(1), 5.0,
                        "u1 <= 5"});
    box.rows.push_back({{{SignalKind::kInput, 0}}, -VectorXd::Ones(1), 5.0,
                        "-u1 <= 5"});
    ForwardProblem problem;
    problem.model = std::make_shared<PendulumModel>();
    problem.cost =
        ParametricCost::Pendulum(10.0 * MatrixXd::Identity(2, 2), 1.0);
    problem.constraints = box;
    problem.x0 = Eigen::Vector2d(2.0, 0.0);
    problem.horizon = 2000;
    return SolveLongHorizon(problem).trajectory;
  }();
  return data;
}

void BM_SolveRelaxedPendulum(benchmark::State& state) {
  const double t_e = static_cast<double>(state.range(0)) / 100.0;
  const Trajectory segment = SaturatedPendulum().SegmentByTime(0.0, t_e);
  LearnProblem problem;
  problem.model = std::make_shared<PendulumModel>();
  problem.cost = ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
  problem.segments = {segment};
  problem.candidates = BuildBoxCandidates(segment, {{SignalKind::kInput, 0}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveRelaxed(problem));
  }
}
// segment lengths in hundredths of a second
BENCHMARK(BM_SolveRelaxedPendulum)
    ->Arg(50)
    ->Arg(200)
    ->Arg(500)
    ->Unit(benchmark::kMillisecond);

void BM_AssembleStationarity(benchmark::State& state) {
  const Trajectory segment = SaturatedPendulum().SegmentByTime(0.0, 2.0);
  LearnProblem problem;
  problem.model = std::make_shared<PendulumModel>();
  problem.cost = ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
  problem.segments = {segment};
  problem.candidates = BuildBoxCandidates(segment, {{SignalKind::kInput, 0}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(AssembleStationarity(problem));
  }
}
BENCHMARK(BM_AssembleStationarity)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace spioc

BENCHMARK_MAIN();
