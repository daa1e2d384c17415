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

#include "spioc/learner.h"

#include <cmath>
#include <map>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "spioc/forward_solver.h"
#include "test_util.h"

namespace spioc {
namespace {

using testing::PendulumData;
using testing::PendulumTorqueBox;

std::shared_ptr<const DynamicsModel> Pendulum() {
  return std::make_shared<PendulumModel>();
}

// long-horizon pendulum solutions shared across tests (each costs ~1 s)
const Trajectory& SettlingData() {
  static const Trajectory data =
      PendulumData(MatrixXd::Identity(2, 2), 0.0, Eigen::Vector2d(1.0, 0.0))
          .trajectory;
  return data;
}

const Trajectory& SaturatingData() {
  static const Trajectory data =
      PendulumData(10.0 * MatrixXd::Identity(2, 2), 1.0,
                   Eigen::Vector2d(2.0, 0.0))
          .trajectory;
  return data;
}

LearnProblem PendulumProblem(const Trajectory& segment, bool candidates) {
  LearnProblem problem;
  problem.model = Pendulum();
  problem.cost = ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
  problem.segments = {segment};
  if (candidates) {
    problem.candidates = BuildBoxCandidates(segment, {{SignalKind::kInput, 0}});
  }
  return problem;
}

// ---------------------------------------------------------------------------
// linear-quadratic oracles

struct LqInstance {
  MatrixXd A, B, Q, R;
};

LqInstance ScalarLq() {
  return {MatrixXd::Constant(1, 1, 0.9), MatrixXd::Constant(1, 1, 0.1),
          MatrixXd::Constant(1, 1, 2.0), MatrixXd::Constant(1, 1, 1.0)};
}

LqInstance TwoStateLq() {
  LqInstance lq;
  lq.A.resize(2, 2);
  lq.A << 1.0, 0.1, -0.2, 0.95;
  // two inputs: a single-input gain has fewer entries than Q, so Q would
  // only be determined up to a one-parameter family
  lq.B.resize(2, 2);
  lq.B << 0.1, 0.0, 0.02, 0.1;
  lq.Q.resize(2, 2);
  lq.Q << 2.0, 0.3, 0.3, 0.5;
  lq.R.resize(2, 2);
  lq.R << 1.0, 0.2, 0.2, 0.5;
  return lq;
}

LearnResult LearnLq(const LqInstance& lq, const VectorXd& x0, int begin,
                    int end) {
  const MatrixXd K = testing::RiccatiGain(lq.A, lq.B, lq.Q, lq.R);
  const Trajectory data =
      testing::RiccatiClosedLoop(lq.A, lq.B, K, x0, 200);
  LearnProblem problem;
  problem.model = std::make_shared<LinearModel>(lq.A, lq.B);
  problem.cost = ParametricCost::Quadratic(
      MatrixXd::Identity(lq.A.rows(), lq.A.rows()), lq.R);
  problem.segments = {data.Segment(begin, end)};
  return SolveRelaxed(problem);
}

TEST(SolveRelaxed, ScalarRiccatiOracle) {
  const LqInstance lq = ScalarLq();
  const LearnResult result = LearnLq(lq, VectorXd::Ones(1), 0, 30);
  EXPECT_LE(RelativeStateWeightError(result.cost, lq.Q), 1e-4);
}

TEST(SolveRelaxed, TwoStateRiccatiOracle) {
  const LqInstance lq = TwoStateLq();
  const LearnResult result = LearnLq(lq, Eigen::Vector2d(1.0, -0.5), 5, 40);
  EXPECT_LE(RelativeStateWeightError(result.cost, lq.Q), 1e-4);
}

TEST(SolveRelaxed, SingleInputTwoStateIsRankDeficient) {
  LqInstance lq = TwoStateLq();
  lq.B = lq.B.col(1).eval();
  lq.R = MatrixXd::Constant(1, 1, 1.0);
  const LearnResult result = LearnLq(lq, Eigen::Vector2d(1.0, -0.5), 5, 40);
  // three Q weights plus two endpoint multipliers, one direction lost
  EXPECT_EQ(result.diagnostics.columns, 5);
  EXPECT_EQ(result.diagnostics.rank, 4);
  EXPECT_LE(result.residual, 1e-16);
}

TEST(AssembleStationarity, HandAssembledScalarTwoStep) {
  // x' = a x + b u, l = q x^2 + u^2, e = 2: row j of the Q column is
  // sum_{0<i<e, i>j} dF_i/du_j * 2 x_i and the nu column is dF_e/du_j
  const double a = 0.9, b = 0.1;
  Trajectory seg;
  seg.states = {VectorXd::Constant(1, 1.0)};
  seg.inputs = {VectorXd::Constant(1, -0.4), VectorXd::Constant(1, 0.7)};
  for (const VectorXd& u : seg.inputs) {
    seg.states.push_back(a * seg.states.back() + b * u);
  }
  LearnProblem problem;
  problem.model = std::make_shared<LinearModel>(MatrixXd::Constant(1, 1, a),
                                                MatrixXd::Constant(1, 1, b));
  problem.cost = ParametricCost::Quadratic(MatrixXd::Ones(1, 1),
                                           MatrixXd::Ones(1, 1));
  problem.segments = {seg};
  const StationaritySystem sys = AssembleStationarity(problem);
  ASSERT_EQ(sys.M.rows(), 2);
  ASSERT_EQ(sys.M.cols(), 2);  // q and nu
  const double x1 = seg.states[1](0);
  EXPECT_NEAR(sys.M(0, 0), b * 2.0 * x1, 1e-15);
  EXPECT_NEAR(sys.M(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(sys.M(0, 1), a * b, 1e-15);
  EXPECT_NEAR(sys.M(1, 1), b, 1e-15);
  EXPECT_NEAR(sys.c(0), 2.0 * -0.4, 1e-15);
  EXPECT_NEAR(sys.c(1), 2.0 * 0.7, 1e-15);
}

TEST(AssembleStationarity, ColumnCount) {
  const Trajectory seg = SaturatingData().SegmentByTime(0.0, 2.0);
  LearnProblem problem = PendulumProblem(seg, true);
  const StationaritySystem sys = AssembleStationarity(problem);
  const ActivityReport activity = EvaluateActivity(problem.candidates, seg);
  const int active = static_cast<int>(activity.active.count());
  EXPECT_EQ(sys.num_lambda_columns(), active);
  EXPECT_EQ(sys.M.cols(), 4 + active + 2);
  problem.options.finite_horizon = true;
  EXPECT_EQ(AssembleStationarity(problem).M.cols(), 4 + active);
}

TEST(AssembleStationarity, ShortSegmentIsUnderdetermined) {
  LearnProblem problem = PendulumProblem(SettlingData().Segment(0, 1), false);
  try {
    AssembleStationarity(problem);
    FAIL() << "expected an underdetermined error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnderdetermined);
  }
}

TEST(AssembleStationarity, KnownInteriorOptimumHasZeroOffset) {
  // free-terminal LQ optimum: with every weight known and no endpoint
  // multiplier, the stationarity offset is the cost gradient itself
  const LqInstance lq = TwoStateLq();
  ForwardProblem forward;
  forward.model = std::make_shared<LinearModel>(lq.A, lq.B);
  forward.cost = ParametricCost::Quadratic(lq.Q, lq.R);
  forward.x0 = Eigen::Vector2d(1.0, 0.5);
  forward.horizon = 30;
  forward.settings.inner_tolerance = 1e-12;
  const ForwardSolution solution = SolveFreeTerminal(forward);
  ASSERT_TRUE(solution.converged);
  LearnProblem problem;
  problem.model = forward.model;
  problem.cost = forward.cost;
  problem.segments = {solution.trajectory};
  problem.options.cost_known = true;
  problem.options.finite_horizon = true;
  EXPECT_LE(AssembleStationarity(problem).c.norm(), 1e-6);
}

TEST(SolveRelaxed, SettlingShortSegmentRecovery) {
  const LearnResult result =
      SolveRelaxed(PendulumProblem(SettlingData().SegmentByTime(0.0, 0.5), true));
  EXPECT_LE(RelativeStateWeightError(result.cost, MatrixXd::Identity(2, 2)),
            0.05);
  EXPECT_GE(result.diagnostics.min_eigenvalue, -1e-8);
}

TEST(SolveRelaxed, NoiseFreeResidualIsTiny) {
  for (const auto& [t_i, t_e] :
       std::vector<std::pair<double, double>>{{0.0, 0.5}, {0.0, 2.0}}) {
    const LearnResult result =
        SolveRelaxed(PendulumProblem(SettlingData().SegmentByTime(t_i, t_e), true));
    EXPECT_LE(result.residual,
              1e-8 * (1.0 + result.offset_norm * result.offset_norm));
  }
  const LearnResult fig2 =
      SolveRelaxed(PendulumProblem(SaturatingData().SegmentByTime(0.0, 2.0), true));
  EXPECT_LE(fig2.residual, 1e-8 * (1.0 + fig2.offset_norm * fig2.offset_norm));
}

TEST(SolveRelaxed, SegmentInvariance) {
  const LearnResult a =
      SolveRelaxed(PendulumProblem(SettlingData().SegmentByTime(0.0, 1.0), true));
  const LearnResult b =
      SolveRelaxed(PendulumProblem(SettlingData().SegmentByTime(0.5, 2.0), true));
  EXPECT_LE((a.cost.params() - b.cost.params()).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(SolveRelaxed, HomogeneousInNormalizationTarget) {
  const Trajectory seg = SaturatingData().SegmentByTime(0.0, 2.0);
  LearnProblem problem = PendulumProblem(seg, true);
  const LearnResult unit = SolveRelaxed(problem);
  problem.options.normalization_target = 2.0;
  problem.options.threshold = 2.0 * problem.options.threshold;
  const LearnResult doubled = SolveRelaxed(problem);
  EXPECT_LE((doubled.cost.params() - 2.0 * unit.cost.params()).norm(),
            1e-8 * (1.0 + unit.cost.params().norm()));
  EXPECT_LE((doubled.multiplier_sums - 2.0 * unit.multiplier_sums).norm(),
            1e-6 * (1.0 + unit.multiplier_sums.norm()));
  EXPECT_LE((doubled.nu[0] - 2.0 * unit.nu[0]).norm(),
            1e-6 * (1.0 + unit.nu[0].norm()));
  EXPECT_EQ(doubled.identified, unit.identified);

  // positive cost scaling leaves the forward argmin unchanged
  ForwardSettings settings;
  settings.inner_tolerance = 1e-10;
  settings.feasibility_tolerance = 1e-10;
  const CandidateSet enforced = problem.candidates.Subset(unit.identified);
  const Prediction p1 = PredictAndRms(Pendulum(), unit.cost, enforced, seg, settings);
  const Prediction p2 = PredictAndRms(Pendulum(), doubled.cost, enforced, seg, settings);
  ASSERT_TRUE(p1.solution.converged);
  ASSERT_TRUE(p2.solution.converged);
  EXPECT_LE((p1.solution.inputs - p2.solution.inputs).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(SolveRelaxed, LambdaSupportWithinActivity) {
  const Trajectory seg = SaturatingData().SegmentByTime(0.0, 2.0);
  const LearnProblem problem = PendulumProblem(seg, true);
  const LearnResult result = SolveRelaxed(problem);
  const ActivityReport activity = EvaluateActivity(problem.candidates, seg);
  const MatrixXd& lambda = result.lambda[0];
  EXPECT_GE(lambda.minCoeff(), 0.0);
  for (int i = 0; i < lambda.rows(); ++i) {
    for (int j = 0; j < lambda.cols(); ++j) {
      if (!activity.active(i, j)) EXPECT_EQ(lambda(i, j), 0.0);
    }
  }
  EXPECT_LE((lambda.colwise().sum().transpose() - result.multiplier_sums).norm(),
            0.0);
}

TEST(SolveRelaxed, SaturatingSaturatedSegment) {
  const LearnResult result =
      SolveRelaxed(PendulumProblem(SaturatingData().SegmentByTime(0.0, 2.0), true));
  const MatrixXd Q_gt = 10.0 * MatrixXd::Identity(2, 2);
  EXPECT_LE(RelativeStateWeightError(result.cost, Q_gt), 0.1);
  EXPECT_NEAR(result.cost.AbsWeights()(0), 1.0, 0.1);
  EXPECT_GT(result.multiplier_sums(0), 1e-3);  // upper bound u <= max
  EXPECT_EQ(result.multiplier_sums(1), 0.0);   // lower bound
  EXPECT_EQ(result.identified, std::vector<int>{0});
}

TEST(SolveRelaxed, SaturatingPostSaturationSegment) {
  const Trajectory seg = SaturatingData().SegmentByTime(1.5, 3.5);
  const LearnProblem problem = PendulumProblem(seg, true);
  // the upper row is active at its arg-max sample yet carries no multiplier
  EXPECT_TRUE(EvaluateActivity(problem.candidates, seg).active.col(0).any());
  const LearnResult result = SolveRelaxed(problem);
  EXPECT_LE(RelativeStateWeightError(result.cost, 10.0 * MatrixXd::Identity(2, 2)),
            0.1);
  EXPECT_NEAR(result.cost.AbsWeights()(0), 1.0, 0.1);
  EXPECT_EQ(result.multiplier_sums(0), 0.0);
  EXPECT_TRUE(result.identified.empty());
}

TEST(SolveRelaxed, SaturatingWithoutCandidatesDeviates) {
  const Trajectory seg = SaturatingData().SegmentByTime(0.0, 2.0);
  const MatrixXd Q_gt = 10.0 * MatrixXd::Identity(2, 2);
  const double with =
      RelativeStateWeightError(SolveRelaxed(PendulumProblem(seg, true)).cost, Q_gt);
  const double without =
      RelativeStateWeightError(SolveRelaxed(PendulumProblem(seg, false)).cost, Q_gt);
  EXPECT_GE(without, 3.0 * with);
  EXPECT_GE(without, 0.1);
}

TEST(SolveRelaxed, RemovingConstraintsMatchesIdentification) {
  const Trajectory seg = SaturatingData().SegmentByTime(0.0, 2.0);
  const LearnProblem problem = PendulumProblem(seg, true);
  const LearnResult result = SolveRelaxed(problem);
  ASSERT_EQ(result.identified, std::vector<int>{0});
  ForwardSettings settings;
  settings.inner_tolerance = 1e-10;
  settings.feasibility_tolerance = 1e-10;
  const Prediction full =
      PredictAndRms(Pendulum(), result.cost, problem.candidates, seg, settings);
  const Prediction without_identified = PredictAndRms(
      Pendulum(), result.cost, problem.candidates.Subset({1}), seg, settings);
  const Prediction without_other = PredictAndRms(
      Pendulum(), result.cost, problem.candidates.Subset({0}), seg, settings);
  ASSERT_TRUE(full.solution.converged);
  EXPECT_LE(full.rms, 1e-4);
  EXPECT_GE((without_identified.solution.inputs - full.solution.inputs)
                .cwiseAbs()
                .maxCoeff(),
            0.1);
  EXPECT_LE((without_other.solution.inputs - full.solution.inputs)
                .cwiseAbs()
                .maxCoeff(),
            1e-5);
}

TEST(IdentifyConstraints, TableExample) {
  LearnResult result;
  result.multiplier_sums.resize(6);
  result.multiplier_sums << 22.8, 0.0, 3.31e-2, 0.0, 1.38e-2, 8.66e-4;
  EXPECT_EQ(IdentifyConstraints(result, 1e-3), (std::vector<int>{0, 2, 4}));
}

TEST(IdentifyConstraints, AllZeroIsEmpty) {
  LearnResult result;
  result.multiplier_sums = VectorXd::Zero(4);
  EXPECT_TRUE(IdentifyConstraints(result, 1e-3).empty());
}

TEST(Baseline, SettlingShortSegmentsFail) {
  for (double t_e : {0.5, 0.6, 1.0, 2.0}) {
    LearnProblem problem =
        PendulumProblem(SettlingData().SegmentByTime(0.0, t_e), true);
    const double ours =
        RelativeStateWeightError(SolveRelaxed(problem).cost, MatrixXd::Identity(2, 2));
    const LearnResult baseline = LearnFiniteHorizonBaseline(problem);
    EXPECT_TRUE(baseline.nu.empty());
    EXPECT_TRUE(baseline.finite_horizon);
    const double theirs =
        RelativeStateWeightError(baseline.cost, MatrixXd::Identity(2, 2));
    EXPECT_GE(theirs, 5.0 * ours) << "t_e " << t_e;
    EXPECT_GE(theirs, 0.5) << "t_e " << t_e;
  }
}

TEST(Baseline, LongSegmentApproachesGroundTruth) {
  // the error shrinks as the segment end approaches stationarity
  double previous = std::numeric_limits<double>::infinity();
  for (double t_e : {1.0, 2.0, 5.0, 19.0}) {
    const LearnResult baseline = LearnFiniteHorizonBaseline(
        PendulumProblem(SettlingData().SegmentByTime(0.0, t_e), true));
    const double error =
        RelativeStateWeightError(baseline.cost, MatrixXd::Identity(2, 2));
    EXPECT_LT(error, previous) << "t_e " << t_e;
    previous = error;
  }
}

TEST(Baseline, SaturatingLearnsSaturationButMissesCost) {
  const LearnResult baseline = LearnFiniteHorizonBaseline(
      PendulumProblem(SaturatingData().SegmentByTime(0.0, 2.0), true));
  EXPECT_FALSE(baseline.identified.empty());
  EXPECT_EQ(baseline.identified.front(), 0);
  EXPECT_GE(RelativeStateWeightError(baseline.cost, 10.0 * MatrixXd::Identity(2, 2)),
            0.1);
  EXPECT_GE(std::abs(baseline.cost.AbsWeights()(0) - 1.0), 0.1);
}

TEST(Normalization, WithoutFrozenFeatureTheTrivialCostWins) {
  // a zero target removes the frozen u^2 weight; L = 0 then attains a zero
  // residual and carries no information
  LearnProblem problem = PendulumProblem(SettlingData().SegmentByTime(0.0, 1.0), true);
  problem.options.normalization_target = 0.0;
  const LearnResult result = SolveRelaxed(problem);
  EXPECT_LE(result.cost.params().norm(), 1e-9);
  EXPECT_LE(result.residual, 1e-20);
}

TEST(KnownCostResidual, SmallOnGroundTruth) {
  const Trajectory seg = SaturatingData().SegmentByTime(0.0, 2.0);
  const double residual = KnownCostStationarityResidual(
      Pendulum(), ParametricCost::Pendulum(10.0 * MatrixXd::Identity(2, 2), 1.0),
      PendulumTorqueBox(5.0), seg);
  EXPECT_LE(residual, 1e-8);
}

}  // namespace
}  // namespace spioc
