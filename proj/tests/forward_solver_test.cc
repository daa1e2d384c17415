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

#include "spioc/forward_solver.h"

#include <cmath>
#include <limits>
#include <memory>

#include <gtest/gtest.h>

#include "spioc/learner.h"
#include "test_util.h"

namespace spioc {
namespace {

using testing::PendulumTorqueBox;

std::shared_ptr<const DynamicsModel> Pendulum() {
  return std::make_shared<PendulumModel>();
}

ForwardSettings Tight() {
  ForwardSettings settings;
  settings.inner_tolerance = 1e-10;
  settings.feasibility_tolerance = 1e-10;
  return settings;
}

double MaxAbs(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

const Trajectory& SaturatingData() {
  static const Trajectory data =
      testing::PendulumData(10.0 * MatrixXd::Identity(2, 2), 1.0,
                            Eigen::Vector2d(2.0, 0.0))
          .trajectory;
  return data;
}

// pendulum shortest path between two states of the saturating instance
ForwardProblem SaturatingShortestPath(int horizon) {
  const Trajectory& data = SaturatingData();
  ForwardProblem problem;
  problem.model = Pendulum();
  problem.cost = ParametricCost::Pendulum(10.0 * MatrixXd::Identity(2, 2), 1.0);
  problem.constraints = PendulumTorqueBox(5.0);
  problem.x0 = data.states[0];
  problem.endpoint = data.states[horizon];
  problem.horizon = horizon;
  problem.settings = Tight();
  return problem;
}

TEST(ShortestPath, EquilibriumGivesZeroInputs) {
  ForwardProblem problem;
  problem.model = Pendulum();
  problem.cost = ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.5);
  problem.x0 = VectorXd::Zero(2);
  problem.endpoint = VectorXd::Zero(2);
  problem.horizon = 20;
  const ForwardSolution solution = SolveShortestPath(problem);
  EXPECT_TRUE(solution.converged);
  EXPECT_EQ(MaxAbs(solution.inputs), 0.0);
  EXPECT_EQ(solution.objective, 0.0);
}

struct LqCase {
  MatrixXd A, B, Q, R;
  VectorXd x0;
};

std::vector<LqCase> LqCases() {
  LqCase scalar{MatrixXd::Constant(1, 1, 0.9), MatrixXd::Constant(1, 1, 0.1),
                MatrixXd::Constant(1, 1, 2.0), MatrixXd::Constant(1, 1, 1.0),
                VectorXd::Ones(1)};
  LqCase two;
  two.A.resize(2, 2);
  two.A << 1.0, 0.1, -0.2, 0.95;
  two.B.resize(2, 1);
  two.B << 0.0, 0.1;
  two.Q.resize(2, 2);
  two.Q << 2.0, 0.3, 0.3, 0.5;
  two.R = MatrixXd::Constant(1, 1, 1.0);
  two.x0 = Eigen::Vector2d(1.0, -0.5);
  return {scalar, two};
}

TEST(ShortestPath, MatchesRiccatiFeedback) {
  for (const LqCase& lq : LqCases()) {
    const MatrixXd K = testing::RiccatiGain(lq.A, lq.B, lq.Q, lq.R);
    const Trajectory closed_loop =
        testing::RiccatiClosedLoop(lq.A, lq.B, K, lq.x0, 25);
    ForwardProblem problem;
    problem.model = std::make_shared<LinearModel>(lq.A, lq.B);
    problem.cost = ParametricCost::Quadratic(lq.Q, lq.R);
    problem.x0 = lq.x0;
    problem.endpoint = closed_loop.states.back();
    problem.horizon = 25;
    problem.settings = Tight();
    const ForwardSolution solution = SolveShortestPath(problem);
    ASSERT_TRUE(solution.converged);
    EXPECT_LE(MaxAbs(solution.inputs - closed_loop.StackedInputs()), 1e-6);
  }
}

TEST(LongHorizon, UnconstrainedLinearMatchesRiccatiClosedLoop) {
  for (const LqCase& lq : LqCases()) {
    const MatrixXd K = testing::RiccatiGain(lq.A, lq.B, lq.Q, lq.R);
    const Trajectory closed_loop =
        testing::RiccatiClosedLoop(lq.A, lq.B, K, lq.x0, 400);
    ForwardProblem problem;
    problem.model = std::make_shared<LinearModel>(lq.A, lq.B);
    problem.cost = ParametricCost::Quadratic(lq.Q, lq.R);
    problem.x0 = lq.x0;
    problem.horizon = 400;
    problem.settings = Tight();
    const ForwardSolution solution = SolveLongHorizon(problem);
    ASSERT_TRUE(solution.converged);
    EXPECT_TRUE(solution.trajectory.simulated);
    EXPECT_LE(MaxAbs(solution.inputs - closed_loop.StackedInputs()), 1e-6);
  }
}

TEST(LongHorizon, SettlingSettles) {
  const ForwardSolution solution = testing::PendulumData(
      MatrixXd::Identity(2, 2), 0.0, Eigen::Vector2d(1.0, 0.0));
  ASSERT_TRUE(solution.converged);
  const Trajectory& traj = solution.trajectory;
  EXPECT_LE(traj.states.back().norm(), 1e-6);
  // lightly damped: the angle envelope over successive 2 s windows shrinks
  double previous = std::numeric_limits<double>::infinity();
  for (int begin = 0; begin + 200 <= traj.horizon(); begin += 200) {
    double envelope = 0.0;
    for (int i = begin; i < begin + 200; ++i) {
      envelope = std::max(envelope, std::abs(traj.states[i](0)));
    }
    EXPECT_LT(envelope, previous) << "window starting at step " << begin;
    previous = envelope;
  }
  EXPECT_LE(MaxAbs(solution.inputs), 5.0 + 1e-9);
}

TEST(LongHorizon, SaturatingSaturatesThenDecays) {
  const Trajectory& traj = SaturatingData();
  std::vector<int> saturated;
  for (int i = 0; i < traj.horizon(); ++i) {
    EXPECT_LE(traj.inputs[i](0), 5.0 + 1e-9);
    if (traj.inputs[i](0) >= 5.0 - 1e-7) saturated.push_back(i);
  }
  // one contiguous plateau at the upper bound early on, interior afterwards
  ASSERT_GE(saturated.size(), 50u);
  EXPECT_EQ(saturated.back() - saturated.front() + 1,
            static_cast<int>(saturated.size()));
  EXPECT_LE(saturated.front(), 50);
  EXPECT_LE(saturated.back(), 200);
  EXPECT_LE(traj.states.back().norm(), 1e-6);
}

TEST(ForwardSolution, ReportsConsistentTrajectoryAndObjective) {
  const ForwardProblem problem = SaturatingShortestPath(120);
  const ForwardSolution solution = SolveShortestPath(problem);
  ASSERT_TRUE(solution.converged);
  const Trajectory rolled = Rollout(*problem.model, problem.x0, solution.inputs);
  ASSERT_EQ(rolled.states.size(), solution.trajectory.states.size());
  for (std::size_t i = 0; i < rolled.states.size(); ++i) {
    EXPECT_EQ(rolled.states[i], solution.trajectory.states[i]);
  }
  double objective = 0.0;
  for (int i = 0; i < problem.horizon; ++i) {
    objective += problem.cost.Value(rolled.states[i], rolled.inputs[i]);
  }
  EXPECT_DOUBLE_EQ(solution.objective, objective);
  EXPECT_LE(solution.kkt.endpoint_violation, 1e-10);
  EXPECT_LE(solution.kkt.inequality_violation, 1e-10);
}

TEST(ForwardSolution, MeritIsMonotone) {
  for (int horizon : {60, 120, 200}) {
    const ForwardSolution solution = SolveShortestPath(SaturatingShortestPath(horizon));
    ASSERT_GE(solution.merit_history.size(), 1u);
    for (std::size_t k = 1; k < solution.merit_history.size(); ++k) {
      const double prev = solution.merit_history[k - 1];
      EXPECT_GE(solution.merit_history[k], prev - 1e-12 * (1.0 + std::abs(prev)))
          << "horizon " << horizon << " iteration " << k;
    }
  }
}

TEST(ForwardSolution, KktResidualMatchesLearnerRecomputation) {
  for (int horizon : {60, 150}) {
    const ForwardProblem problem = SaturatingShortestPath(horizon);
    const ForwardSolution solution = SolveShortestPath(problem);
    ASSERT_TRUE(solution.converged);
    const double recomputed = KnownCostStationarityResidual(
        problem.model, problem.cost, problem.constraints, solution.trajectory);
    EXPECT_NEAR(solution.kkt.stationarity, recomputed, 1e-6);
    EXPECT_LE(recomputed, 1e-6);
  }
}

TEST(ForwardSolution, NewtonAndProximalGradientAgree) {
  ForwardProblem problem = SaturatingShortestPath(80);
  const ForwardSolution newton = SolveShortestPath(problem);
  problem.settings.inner_method = InnerMethod::kProximalGradient;
  problem.settings.inner_tolerance = 1e-9;
  problem.settings.feasibility_tolerance = 1e-9;
  const ForwardSolution fista = SolveShortestPath(problem);
  ASSERT_TRUE(newton.converged);
  ASSERT_TRUE(fista.converged);
  EXPECT_LE(MaxAbs(newton.inputs - fista.inputs), 1e-4);
}

TEST(ForwardSolution, SmoothAndProximalAbsAgree) {
  // a segment that crosses u = 0 so the |u| kink matters
  const Trajectory& data = SaturatingData();
  int cross = 0;
  while (cross + 1 < data.horizon() &&
         data.inputs[cross](0) * data.inputs[cross + 1](0) > 0.0) {
    ++cross;
  }
  ASSERT_LT(cross + 1, data.horizon());
  const int begin = std::max(0, cross - 60);
  const Trajectory seg = data.Segment(begin, cross + 60);
  ForwardProblem problem;
  problem.model = Pendulum();
  problem.cost = ParametricCost::Pendulum(10.0 * MatrixXd::Identity(2, 2), 1.0);
  problem.constraints = PendulumTorqueBox(5.0);
  problem.x0 = seg.states.front();
  problem.endpoint = seg.states.back();
  problem.horizon = seg.horizon();
  problem.settings = Tight();
  const ForwardSolution prox = SolveShortestPath(problem);
  problem.settings.abs_mode = AbsMode::kSmooth;
  const ForwardSolution smooth = SolveShortestPath(problem);
  ASSERT_TRUE(prox.converged);
  ASSERT_TRUE(smooth.converged);
  EXPECT_LE(MaxAbs(prox.inputs - smooth.inputs), 1e-4);
}

TEST(ForwardSolution, DeterministicIncludingRestarts) {
  ForwardProblem problem = SaturatingShortestPath(150);
  // starve the inner loop so the solve leans on perturbed restarts
  problem.settings.max_inner_iterations = 3;
  problem.settings.max_outer_iterations = 4;
  problem.settings.seed = 17;
  const ForwardSolution a = SolveShortestPath(problem);
  const ForwardSolution b = SolveShortestPath(problem);
  EXPECT_GT(a.restarts, 0);
  EXPECT_EQ(a.restarts, b.restarts);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(ForwardSolution, InvalidProblemsThrow) {
  ForwardProblem problem = SaturatingShortestPath(50);
  problem.horizon = 0;
  EXPECT_THROW(SolveShortestPath(problem), Error);
  problem = SaturatingShortestPath(50);
  problem.endpoint = VectorXd::Zero(3);
  EXPECT_THROW(SolveShortestPath(problem), Error);
}

TEST(RmsError, IdenticalIsZeroAndOffsetIsDelta) {
  const Trajectory& data = SaturatingData();
  const Trajectory seg = data.Segment(0, 40);
  EXPECT_EQ(RmsError(seg, seg), 0.0);
  Trajectory shifted = seg;
  for (VectorXd& x : shifted.states) x.array() += 0.3;
  EXPECT_NEAR(RmsError(shifted, seg), 0.3, 1e-15);
}

TEST(PredictAndRms, SaturatingRoundTripReproducesInputs) {
  const Trajectory seg = SaturatingData().SegmentByTime(0.0, 2.0);
  LearnProblem learn;
  learn.model = Pendulum();
  learn.cost = ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
  learn.candidates = BuildBoxCandidates(seg, {{SignalKind::kInput, 0}});
  learn.segments = {seg};
  const LearnResult result = SolveRelaxed(learn);
  const Prediction p =
      PredictAndRms(Pendulum(), result.cost,
                    learn.candidates.Subset(result.identified), seg, Tight());
  ASSERT_TRUE(p.solution.converged);
  EXPECT_LE(MaxAbs(p.solution.inputs - seg.StackedInputs()), 1e-3);
  EXPECT_LE(p.rms, 1e-4);
}

}  // namespace
}  // namespace spioc
