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

#include <random>

#include <benchmark/benchmark.h>

#include "spioc/dynamics.h"
#include "spioc/rollout.h"

namespace spioc {
namespace {

VectorXd RandomInputs(int size, double scale) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-scale, scale);
  VectorXd u(size);
  for (int k = 0; k < size; ++k) u(k) = dist(rng);
  return u;
}

void BM_PendulumSensitivities(benchmark::State& state) {
  const PendulumModel model;
  const int steps = static_cast<int>(state.range(0));
  const VectorXd U = RandomInputs(steps, 2.0);
  const VectorXd x0 = Eigen::Vector2d(1.0, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeRolloutSensitivities(model, x0, U));
  }
  state.SetComplexityN(steps);
}
BENCHMARK(BM_PendulumSensitivities)->Arg(50)->Arg(100)->Arg(200)->Complexity();

void BM_ArmSensitivities(benchmark::State& state) {
  PlanarArmParams p;
  p.object_base = ClosingObjectBase(p, Eigen::Vector3d(0.2, 0.5, 0.3),
                                    Eigen::Vector3d(0.4, 1.0, 0.2));
  const PlanarArmModel model(p);
  const int steps = static_cast<int>(state.range(0));
  const VectorXd U = RandomInputs(steps * model.input_dim(), 0.3);
  VectorXd x0(6);
  x0 << 0.2, 0.5, 0.3, 0.4, 1.0, 0.2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeRolloutSensitivities(model, x0, U));
  }
  state.SetComplexityN(steps);
}
BENCHMARK(BM_ArmSensitivities)->Arg(20)->Arg(65)->Complexity();

void BM_PendulumAdjointGradient(benchmark::State& state) {
  const PendulumModel model;
  const int steps = static_cast<int>(state.range(0));
  const VectorXd U = RandomInputs(steps, 2.0);
  const Trajectory traj = Rollout(model, Eigen::Vector2d(1.0, 0.0), U);
  const std::vector<Jacobians> jacobians = StepJacobians(model, traj);
  std::vector<VectorXd> state_grads(steps + 1, VectorXd::Ones(2));
  std::vector<VectorXd> input_grads(steps, VectorXd::Ones(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        AdjointGradient(jacobians, state_grads, input_grads));
  }
}
BENCHMARK(BM_PendulumAdjointGradient)->Arg(200)->Arg(2000);

}  // namespace
}  // namespace spioc

BENCHMARK_MAIN();
