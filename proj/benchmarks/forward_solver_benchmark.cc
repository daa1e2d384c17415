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

namespace spioc {
namespace {

ForwardProblem PendulumProblem(int horizon, InnerMethod method) {
  ForwardProblem problem;
  problem.model = std::make_shared<PendulumModel>();
  problem.cost = ParametricCost::Pendulum(10.0 * MatrixXd::Identity(2, 2), 1.0);
  problem.constraints.rows.push_back(
      {{{SignalKind::kInput, 0}}, VectorXd::Ones(1), 5.0, "u1 <= 5"});
  problem.constraints.rows.push_back(
      {{{SignalKind::kInput, 0}}, -VectorXd::Ones(1), 5.0, "-u1 <= 5"});
  problem.x0 = Eigen::Vector2d(2.0, 0.0);
  problem.endpoint = Eigen::Vector2d::Zero();
  problem.horizon = horizon;
  problem.settings.inner_method = method;
  return problem;
}

void BM_ShortestPathNewton(benchmark::State& state) {
  const ForwardProblem problem = PendulumProblem(
      static_cast<int>(state.range(0)), InnerMethod::kProjectedNewton);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveShortestPath(problem));
  }
}
BENCHMARK(BM_ShortestPathNewton)
    ->Arg(200)
    ->Arg(400)
    ->Unit(benchmark::kMillisecond);

void BM_ShortestPathProximalGradient(benchmark::State& state) {
  const ForwardProblem problem = PendulumProblem(
      static_cast<int>(state.range(0)), InnerMethod::kProximalGradient);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveShortestPath(problem));
  }
}
BENCHMARK(BM_ShortestPathProximalGradient)
    ->Arg(200)
    ->Unit(benchmark::kMillisecond);

void BM_LongHorizonSaturating(benchmark::State& state) {
  ForwardProblem problem =
      PendulumProblem(2000, InnerMethod::kProjectedNewton);
  problem.endpoint.reset();
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveLongHorizon(problem));
  }
}
BENCHMARK(BM_LongHorizonSaturating)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
}  // namespace spioc

BENCHMARK_MAIN();
