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

#ifndef SPIOC_ROLLOUT_H_
#define SPIOC_ROLLOUT_H_

#include <vector>

#include "spioc/common.h"
#include "spioc/dynamics.h"

namespace spioc {

// Sampled state/input sequence over one segment: states x_0..x_e and inputs
// u_0..u_{e-1}. `start_index` is the global step index of x_0.
struct Trajectory {
  double sampling_period = 1.0;
  std::vector<VectorXd> states;
  std::vector<VectorXd> inputs;
  int start_index = 0;
  bool simulated = false;

  int horizon() const { return static_cast<int>(inputs.size()); }
  int state_dim() const {
    return states.empty() ? 0 : static_cast<int>(states.front().size());
  }
  int input_dim() const {
    return inputs.empty() ? 0 : static_cast<int>(inputs.front().size());
  }
  double time(int i) const { return (start_index + i) * sampling_period; }

  VectorXd StackedInputs() const;

  // steps [begin, end] as a new trajectory with start_index shifted
  Trajectory Segment(int begin, int end) const;

  // segment covering times [t_begin, t_end] (nearest sample indices)
  Trajectory SegmentByTime(double t_begin, double t_end) const;

  // throws if lengths or dimensions are inconsistent
  void Validate() const;
};

// F_i(U, x0) for i = 0..e; U holds e blocks of size m
Trajectory Rollout(const DynamicsModel& model, const VectorXd& x0,
                   const VectorXd& stacked_inputs);

// largest |x_i - F_i(U^m, x_0)| over the trajectory
double RolloutMismatch(const DynamicsModel& model, const Trajectory& traj);

// Jacobians dF_i/dU stored as causal blocks dF_i/du_j (j < i).
class RolloutSensitivities {
 public:
  RolloutSensitivities() = default;
  RolloutSensitivities(Trajectory trajectory,
                       std::vector<Jacobians> step_jacobians);

  const Trajectory& trajectory() const { return trajectory_; }
  const std::vector<Jacobians>& step_jacobians() const { return jacobians_; }
  int horizon() const { return trajectory_.horizon(); }

  // n x m block dF_i/du_j; zero for j >= i
  MatrixXd Block(int i, int j) const;
  // n x (m e) Jacobian dF_i/dU
  MatrixXd Full(int i) const;

 private:
  static std::size_t Offset(int i, int j) {
    return static_cast<std::size_t>(i) * (i - 1) / 2 + j;
  }

  Trajectory trajectory_;
  std::vector<Jacobians> jacobians_;
  std::vector<MatrixXd> blocks_;  // row-major over (i, j < i)
};

RolloutSensitivities ComputeRolloutSensitivities(const DynamicsModel& model,
                                                 const VectorXd& x0,
                                                 const VectorXd& stacked_inputs);

// Per-step Jacobians along an existing trajectory (states are not
// recomputed).
std::vector<Jacobians> StepJacobians(const DynamicsModel& model,
                                     const Trajectory& traj);

// Reverse-mode gradient of sum_i g_x(i).x_i + sum_i g_u(i).u_i with respect
// to U, where x_i = F_i(U, x_0). `state_weights` has e+1 entries (index 0 is
// ignored since x_0 does not depend on U), `input_weights` has e entries.
VectorXd AdjointGradient(const std::vector<Jacobians>& jacobians,
                         const std::vector<VectorXd>& state_weights,
                         const std::vector<VectorXd>& input_weights);

}  // namespace spioc

#endif  // SPIOC_ROLLOUT_H_
