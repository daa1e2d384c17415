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

#ifndef SPIOC_TESTS_TEST_UTIL_H_
#define SPIOC_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "spioc/candidates.h"
#include "spioc/cost.h"
#include "spioc/dynamics.h"
#include "spioc/forward_solver.h"
#include "spioc/rollout.h"

namespace spioc::testing {

inline double RelativeError(const MatrixXd& actual, const MatrixXd& expected) {
  return (actual - expected).norm() / std::max(expected.norm(), 1e-300);
}

// max-norm error relative to the larger of |expected| entries and `floor`
inline double ScaledMaxError(const MatrixXd& actual, const MatrixXd& expected,
                             double floor = 1e-8) {
  return (actual - expected).cwiseAbs().maxCoeff() /
         std::max(expected.cwiseAbs().maxCoeff(), floor);
}

inline VectorXd RandomVector(std::mt19937_64& rng, int size, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  VectorXd v(size);
  for (int i = 0; i < size; ++i) v(i) = dist(rng);
  return v;
}

// stabilizing solution of the discrete algebraic Riccati equation by value
// iteration (independent of the library's LQ machinery)
inline MatrixXd SolveDare(const MatrixXd& A, const MatrixXd& B,
                          const MatrixXd& Q, const MatrixXd& R) {
  MatrixXd P = Q;
  for (int it = 0; it < 100000; ++it) {
    const MatrixXd K =
        (R + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A);
    const MatrixXd next = Q + A.transpose() * P * (A - B * K);
    const double change = (next - P).norm();
    P = 0.5 * (next + next.transpose());
    if (change <= 1e-15 * (1.0 + P.norm())) break;
  }
  return P;
}

inline MatrixXd RiccatiGain(const MatrixXd& A, const MatrixXd& B,
                            const MatrixXd& Q, const MatrixXd& R) {
  const MatrixXd P = SolveDare(A, B, Q, R);
  return (R + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A);
}

// closed loop u = -K x simulated for `steps` steps
inline Trajectory RiccatiClosedLoop(const MatrixXd& A, const MatrixXd& B,
                                    const MatrixXd& K, const VectorXd& x0,
                                    int steps) {
  Trajectory traj;
  traj.states.push_back(x0);
  for (int i = 0; i < steps; ++i) {
    const VectorXd u = -K * traj.states.back();
    traj.inputs.push_back(u);
    traj.states.push_back(A * traj.states.back() + B * u);
  }
  traj.simulated = true;
  return traj;
}

inline CandidateSet PendulumTorqueBox(double bound) {
  CandidateSet set;
  set.rows.push_back({{{SignalKind::kInput, 0}}, VectorXd::Constant(1, 1.0),
                      bound, "u1 <= bound"});
  set.rows.push_back({{{SignalKind::kInput, 0}}, VectorXd::Constant(1, -1.0),
                      bound, "-u1 <= bound"});
  return set;
}

// long-horizon pendulum data with the torque box enforced
inline ForwardSolution PendulumData(const MatrixXd& Q, double r,
                                    const VectorXd& x0, int horizon = 2000) {
  ForwardProblem problem;
  problem.model = std::make_shared<PendulumModel>();
  problem.cost = ParametricCost::Pendulum(Q, r);
  problem.constraints = PendulumTorqueBox(5.0);
  problem.x0 = x0;
  problem.horizon = horizon;
  problem.settings.inner_tolerance = 1e-10;
  problem.settings.feasibility_tolerance = 1e-10;
  return SolveLongHorizon(problem);
}

}  // namespace spioc::testing

#endif  // SPIOC_TESTS_TEST_UTIL_H_
