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

#include "spioc/rollout.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace spioc {

VectorXd Trajectory::StackedInputs() const {
  const int m = input_dim();
  VectorXd stacked(m * horizon());
  for (int i = 0; i < horizon(); ++i) stacked.segment(i * m, m) = inputs[i];
  return stacked;
}

Trajectory Trajectory::Segment(int begin, int end) const {
  if (begin < 0 || end > horizon() || begin > end) {
    std::ostringstream msg;
    msg << "segment [" << begin << ", " << end << "] outside trajectory of "
        << horizon() << " steps";
    Fail(ErrorCode::kInvalidArgument, msg.str());
  }
  Trajectory out;
  out.sampling_period = sampling_period;
  out.start_index = start_index + begin;
  out.simulated = simulated;
  out.states.assign(states.begin() + begin, states.begin() + end + 1);
  out.inputs.assign(inputs.begin() + begin, inputs.begin() + end);
  return out;
}

Trajectory Trajectory::SegmentByTime(double t_begin, double t_end) const {
  const int begin = static_cast<int>(
      std::lround(t_begin / sampling_period) - start_index);
  const int end =
      static_cast<int>(std::lround(t_end / sampling_period) - start_index);
  return Segment(begin, end);
}

void Trajectory::Validate() const {
  if (states.size() != inputs.size() + 1) {
    Fail(ErrorCode::kDimensionMismatch,
         "trajectory: states length must equal inputs length + 1");
  }
  if (!(sampling_period > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "trajectory: T_s must be positive");
  }
  const int n = state_dim();
  const int m = input_dim();
  for (const auto& x : states) {
    CheckDimension(x.size() == n, "trajectory: ragged state dimension");
  }
  for (const auto& u : inputs) {
    CheckDimension(u.size() == m, "trajectory: ragged input dimension");
  }
}

Trajectory Rollout(const DynamicsModel& model, const VectorXd& x0,
                   const VectorXd& stacked_inputs) {
  const int n = model.state_dim();
  const int m = model.input_dim();
  CheckDimension(x0.size() == n, "rollout: x0 has wrong dimension");
  CheckDimension(stacked_inputs.size() % m == 0,
                 "rollout: input vector length not divisible by m");
  const int e = static_cast<int>(stacked_inputs.size() / m);
  Trajectory traj;
  traj.sampling_period = model.sampling_period();
  traj.simulated = true;
  traj.states.reserve(e + 1);
  traj.inputs.reserve(e);
  traj.states.push_back(x0);
  for (int i = 0; i < e; ++i) {
    traj.inputs.push_back(stacked_inputs.segment(i * m, m));
    traj.states.push_back(model.Step(traj.states.back(), traj.inputs.back()));
  }
  return traj;
}

double RolloutMismatch(const DynamicsModel& model, const Trajectory& traj) {
  if (traj.states.empty()) return 0.0;
  VectorXd x = traj.states.front();
  double worst = 0.0;
  for (int i = 0; i < traj.horizon(); ++i) {
    x = model.Step(x, traj.inputs[i]);
    worst = std::max(worst, (x - traj.states[i + 1]).cwiseAbs().maxCoeff());
  }
  return worst;
}

RolloutSensitivities::RolloutSensitivities(Trajectory trajectory,
                                           std::vector<Jacobians> jacobians)
    : trajectory_(std::move(trajectory)), jacobians_(std::move(jacobians)) {
  const int e = trajectory_.horizon();
  blocks_.resize(static_cast<std::size_t>(e + 1) * e / 2);
  // dF_{i+1}/du_j = A_i dF_i/du_j for j < i, and B_i for j = i
  for (int i = 0; i < e; ++i) {
    for (int j = 0; j < i; ++j) {
      blocks_[Offset(i + 1, j)] = jacobians_[i].A * blocks_[Offset(i, j)];
    }
    blocks_[Offset(i + 1, i)] = jacobians_[i].B;
  }
}

MatrixXd RolloutSensitivities::Block(int i, int j) const {
  const int n = trajectory_.state_dim();
  const int m = jacobians_.empty() ? trajectory_.input_dim()
                                   : static_cast<int>(jacobians_[0].B.cols());
  if (j >= i) return MatrixXd::Zero(n, m);
  return blocks_[Offset(i, j)];
}

MatrixXd RolloutSensitivities::Full(int i) const {
  const int n = trajectory_.state_dim();
  const int m = trajectory_.input_dim();
  const int e = horizon();
  MatrixXd full = MatrixXd::Zero(n, m * e);
  for (int j = 0; j < i; ++j) full.middleCols(j * m, m) = blocks_[Offset(i, j)];
  return full;
}

std::vector<Jacobians> StepJacobians(const DynamicsModel& model,
                                     const Trajectory& traj) {
  std::vector<Jacobians> jac;
  jac.reserve(traj.horizon());
  for (int i = 0; i < traj.horizon(); ++i) {
    jac.push_back(ModelJacobians(model, traj.states[i], traj.inputs[i]));
  }
  return jac;
}

RolloutSensitivities ComputeRolloutSensitivities(
    const DynamicsModel& model, const VectorXd& x0,
    const VectorXd& stacked_inputs) {
  Trajectory traj = Rollout(model, x0, stacked_inputs);
  std::vector<Jacobians> jac = StepJacobians(model, traj);
  return RolloutSensitivities(std::move(traj), std::move(jac));
}

VectorXd AdjointGradient(const std::vector<Jacobians>& jacobians,
                         const std::vector<VectorXd>& state_weights,
                         const std::vector<VectorXd>& input_weights) {
  const int e = static_cast<int>(jacobians.size());
  if (e == 0) return VectorXd(0);
  const int m = static_cast<int>(jacobians[0].B.cols());
  VectorXd grad(m * e);
  VectorXd costate = state_weights[e];
  for (int j = e - 1; j >= 0; --j) {
    grad.segment(j * m, m) =
        input_weights[j] + jacobians[j].B.transpose() * costate;
    costate = state_weights[j] + jacobians[j].A.transpose() * costate;
  }
  return grad;
}

}  // namespace spioc
