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

#include "spioc/cost.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "test_util.h"

namespace spioc {
namespace {

using testing::RandomVector;

MatrixXd RandomPsd(std::mt19937_64& rng, int dim, double scale) {
  MatrixXd G(dim, dim);
  for (int i = 0; i < dim; ++i) G.col(i) = RandomVector(rng, dim, scale);
  return G * G.transpose();
}

ParametricCost ArmLikeTracking(std::mt19937_64& rng, bool diagonal_r) {
  MatrixXd S = MatrixXd::Zero(2, 4);
  S(0, 1) = 1.0;
  S(1, 3) = 1.0;
  MatrixXd R = RandomPsd(rng, 3, 1.0) + MatrixXd::Identity(3, 3);
  if (diagonal_r) R = MatrixXd(R.diagonal().asDiagonal());
  R /= R.trace();
  return ParametricCost::Tracking(S, Eigen::Vector2d(0.5, -0.2),
                                  RandomPsd(rng, 2, 1.0), R, diagonal_r);
}

TEST(CostValue, PendulumIdentityWeights) {
  const ParametricCost cost =
      ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
  EXPECT_DOUBLE_EQ(cost.Value(Eigen::Vector2d(1.0, 2.0), VectorXd::Constant(1, 3.0)),
                   14.0);
}

TEST(CostValue, PendulumWithAbsoluteTerm) {
  const ParametricCost cost =
      ParametricCost::Pendulum(10.0 * MatrixXd::Identity(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(
      cost.Value(Eigen::Vector2d(1.0, 0.0), VectorXd::Constant(1, -2.0)), 16.0);
}

TEST(CostValue, TrackingAtReferenceIsZero) {
  std::mt19937_64 rng(1);
  const ParametricCost cost = ArmLikeTracking(rng, false);
  VectorXd x = RandomVector(rng, 4, 1.0);
  x(1) = 0.5;
  x(3) = -0.2;
  EXPECT_NEAR(cost.Value(x, VectorXd::Zero(3)), 0.0, 1e-15);
}

TEST(CostValue, TrackingMatchesDirectFormula) {
  std::mt19937_64 rng(2);
  const ParametricCost cost = ArmLikeTracking(rng, false);
  const VectorXd x = RandomVector(rng, 4, 1.0);
  const VectorXd u = RandomVector(rng, 3, 1.0);
  const VectorXd y = cost.selector() * x - cost.reference();
  const double expected = y.dot(cost.StateWeight() * y) +
                          u.dot(cost.InputWeight() * u);
  EXPECT_NEAR(cost.Value(x, u), expected, 1e-12 * (1.0 + expected));
}

TEST(CostValue, RejectsWrongDimensions) {
  const ParametricCost cost =
      ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
  EXPECT_THROW(cost.Value(VectorXd::Zero(3), VectorXd::Zero(1)), Error);
  EXPECT_THROW(cost.Value(VectorXd::Zero(2), VectorXd::Zero(2)), Error);
}

TEST(CostValue, LinearInParameters) {
  std::mt19937_64 rng(3);
  for (bool tracking : {false, true}) {
    const ParametricCost base =
        tracking ? ArmLikeTracking(rng, false)
                 : ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.5);
    const int n = base.state_dim();
    const int m = base.input_dim();
    for (int trial = 0; trial < 20; ++trial) {
      const VectorXd L1 = RandomVector(rng, base.num_params(), 2.0);
      const VectorXd L2 = RandomVector(rng, base.num_params(), 2.0);
      const double alpha = RandomVector(rng, 1, 3.0)(0);
      const double beta = RandomVector(rng, 1, 3.0)(0);
      const VectorXd x = RandomVector(rng, n, 1.0);
      const VectorXd u = RandomVector(rng, m, 1.0);
      const VectorXd mix = alpha * L1 + beta * L2;
      const double expected = alpha * base.WithParams(L1).Value(x, u) +
                              beta * base.WithParams(L2).Value(x, u);
      EXPECT_NEAR(base.WithParams(mix).Value(x, u), expected,
                  1e-10 * (1.0 + std::abs(expected)));
    }
  }
}

TEST(CostGradients, QuadraticFormGradient) {
  MatrixXd Q(2, 2);
  Q << 2.0, 0.5, 0.5, 1.0;
  const ParametricCost cost = ParametricCost::Quadratic(Q, MatrixXd::Identity(1, 1));
  const VectorXd x = Eigen::Vector2d(0.7, -1.3);
  const CostGradients g = cost.Gradients(x, VectorXd::Constant(1, 0.4));
  EXPECT_LE((g.dx - 2.0 * Q * x).norm(), 1e-14);
  EXPECT_NEAR(g.du(0), 0.8, 1e-15);
}

TEST(CostGradients, AbsoluteValueUsesSign) {
  const ParametricCost cost = ParametricCost::Pendulum(MatrixXd::Zero(2, 2), 1.0);
  const VectorXd x = VectorXd::Zero(2);
  const int abs_p = cost.FindBlock(BlockKind::kAbsWeight)->offset;
  EXPECT_DOUBLE_EQ(cost.Gradients(x, VectorXd::Constant(1, 3.0)).feature_du(0, abs_p), 1.0);
  EXPECT_DOUBLE_EQ(cost.Gradients(x, VectorXd::Constant(1, -3.0)).feature_du(0, abs_p), -1.0);
  EXPECT_DOUBLE_EQ(cost.Gradients(x, VectorXd::Zero(1)).feature_du(0, abs_p), 0.0);
  // total du at u = 3: 2u from the frozen square plus r
  EXPECT_DOUBLE_EQ(cost.Gradients(x, VectorXd::Constant(1, 3.0)).du(0), 7.0);
}

TEST(CostGradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const bool tracking = trial % 2 == 1;
    ParametricCost cost =
        tracking ? ArmLikeTracking(rng, trial % 4 == 1)
                 : ParametricCost::Pendulum(RandomPsd(rng, 2, 1.0), 0.7);
    const VectorXd x = RandomVector(rng, cost.state_dim(), 1.0);
    VectorXd u = RandomVector(rng, cost.input_dim(), 1.0);
    for (int j = 0; j < u.size(); ++j) {
      if (std::abs(u(j)) < 1e-4) u(j) = 0.5;
    }
    const CostGradients g = cost.Gradients(x, u);
    const double h = 1e-6;
    for (int k = 0; k < x.size(); ++k) {
      VectorXd xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const double fd = (cost.Value(xp, u) - cost.Value(xm, u)) / (2 * h);
      EXPECT_LE(std::abs(fd - g.dx(k)), 1e-6 * (1.0 + std::abs(g.dx(k))));
    }
    for (int k = 0; k < u.size(); ++k) {
      VectorXd up = u, um = u;
      up(k) += h;
      um(k) -= h;
      const double fd = (cost.Value(x, up) - cost.Value(x, um)) / (2 * h);
      EXPECT_LE(std::abs(fd - g.du(k)), 1e-6 * (1.0 + std::abs(g.du(k))));
    }
    // per-feature columns weighted by the parameters give the total
    const VectorXd dx = g.feature_dx * cost.params();
    const VectorXd du = g.feature_du * cost.params();
    EXPECT_LE((dx - g.dx).norm(), 1e-12 * (1.0 + g.dx.norm()));
    EXPECT_LE((du - g.du).norm(), 1e-12 * (1.0 + g.du.norm()));
  }
}

TEST(CostStructure, PendulumFreezesExactlyOneFeature) {
  const ParametricCost cost =
      ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
  int frozen = 0;
  for (int p = 0; p < cost.num_params(); ++p) frozen += cost.IsFrozen(p);
  EXPECT_EQ(frozen, 1);
  EXPECT_EQ(static_cast<int>(cost.FreeParams().size()), 4);  // Q11 Q12 Q22 r
}

TEST(ProjectParameters, FeasibleIsUnchanged) {
  std::mt19937_64 rng(5);
  const ParametricCost pendulum =
      ParametricCost::Pendulum(RandomPsd(rng, 2, 1.0), 0.4);
  EXPECT_LE((ProjectParameters(pendulum, pendulum.params()) -
             pendulum.params()).norm(),
            1e-13);
  const ParametricCost tracking = ArmLikeTracking(rng, false);
  EXPECT_LE((ProjectParameters(tracking, tracking.params()) -
             tracking.params()).norm(),
            1e-13);
}

TEST(ProjectParameters, EigenClipsIndefiniteQ) {
  MatrixXd Q(2, 2);
  Q << 1.0, 2.0, 2.0, 1.0;
  const ParametricCost cost = ParametricCost::Pendulum(Q, 0.0);
  const VectorXd projected = ProjectParameters(cost, cost.params());
  const MatrixXd clipped = cost.WithParams(projected).StateWeight();
  EXPECT_LE((clipped - MatrixXd::Constant(2, 2, 1.5)).norm(), 1e-12);
}

TEST(ProjectParameters, ClipsNegativeAbsWeight) {
  const ParametricCost cost =
      ParametricCost::Pendulum(MatrixXd::Identity(2, 2), -0.3);
  const VectorXd projected = ProjectParameters(cost, cost.params());
  EXPECT_EQ(cost.WithParams(projected).AbsWeights()(0), 0.0);
}

TEST(ProjectParameters, TraceRuleRescales) {
  std::mt19937_64 rng(6);
  const ParametricCost cost = ArmLikeTracking(rng, false);
  const VectorXd projected = ProjectParameters(cost, 3.0 * cost.params());
  EXPECT_LE((projected - cost.params()).norm(), 1e-12);
  EXPECT_NEAR(cost.WithParams(projected).InputWeight().trace(), 1.0, 1e-14);
}

TEST(ProjectParameters, DegenerateTraceThrows) {
  std::mt19937_64 rng(7);
  const ParametricCost cost = ArmLikeTracking(rng, false);
  VectorXd raw = cost.params();
  const ParamBlock* r_block = cost.FindBlock(BlockKind::kInputWeight);
  raw.segment(r_block->offset, r_block->count).setZero();
  try {
    ProjectParameters(cost, raw);
    FAIL() << "expected a degenerate-normalization error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateNormalization);
  }
}

TEST(ProjectParameters, IdempotentAndNonExpansiveTowardFeasiblePoints) {
  std::mt19937_64 rng(8);
  const ParametricCost cost =
      ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    const VectorXd raw = RandomVector(rng, cost.num_params(), 3.0);
    const VectorXd once = ProjectParameters(cost, raw);
    EXPECT_LE((ProjectParameters(cost, once) - once).norm(), 1e-12);
    EXPECT_GE(StructuralViolation(cost, once), -1e-12);
    // a sampled feasible point with the same frozen weight
    const ParametricCost feasible =
        ParametricCost::Pendulum(RandomPsd(rng, 2, 1.0),
                                 std::abs(RandomVector(rng, 1, 2.0)(0)));
    const VectorXd f = feasible.params();
    VectorXd raw_free = raw, once_free = once, f_free = f;
    for (int p = 0; p < cost.num_params(); ++p) {
      if (cost.IsFrozen(p)) raw_free(p) = once_free(p) = f_free(p) = 0.0;
    }
    // distances measured in the matrix (Frobenius) metric per block
    auto distance = [&](const VectorXd& a, const VectorXd& b) {
      double d2 = 0.0;
      for (const ParamBlock& block : cost.blocks()) {
        if (block.kind == BlockKind::kFrozen) continue;
        if (block.kind == BlockKind::kAbsWeight) {
          d2 += (a - b).segment(block.offset, block.count).squaredNorm();
        } else {
          d2 += (cost.BlockMatrix(a, block) - cost.BlockMatrix(b, block))
                    .squaredNorm();
        }
      }
      return std::sqrt(d2);
    };
    EXPECT_LE(distance(once_free, f_free), distance(raw_free, f_free) + 1e-12);
  }
}

TEST(ProjectParameters, ProducesPsdBlocksForTracking) {
  std::mt19937_64 rng(9);
  const ParametricCost cost = ArmLikeTracking(rng, false);
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd raw =
        cost.params() + RandomVector(rng, cost.num_params(), 1.0);
    VectorXd projected;
    try {
      projected = ProjectParameters(cost, raw);
    } catch (const Error&) {
      continue;  // clipped R with zero trace
    }
    const ParametricCost out = cost.WithParams(projected);
    EXPECT_GE(StructuralViolation(cost, projected), -1e-8);
    EXPECT_NEAR(out.InputWeight().trace(), 1.0, 1e-12);
    EXPECT_LE((out.StateWeight() - out.StateWeight().transpose()).norm(), 0.0);
  }
}

}  // namespace
}  // namespace spioc
