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

#include "spioc/nnls.h"

#include <limits>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "test_util.h"

namespace spioc {
namespace {

using testing::RandomVector;

// exhaustive oracle: best unconstrained least-squares fit over every support
// whose solution is nonnegative
double BruteForceNnlsResidual(const MatrixXd& A, const VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  double best = b.norm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) cols.push_back(j);
    }
    MatrixXd sub(A.rows(), cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = A.col(cols[k]);
    const VectorXd x = sub.completeOrthogonalDecomposition().solve(b);
    if (x.minCoeff() < 0.0) continue;
    best = std::min(best, (sub * x - b).norm());
  }
  return best;
}

TEST(Nnls, InteriorSolutionMatchesLeastSquares) {
  MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  const VectorXd x_true = Eigen::Vector2d(2.0, 3.0);
  const NnlsResult result = SolveNnls(A, A * x_true);
  EXPECT_TRUE(result.converged);
  EXPECT_LE((result.x - x_true).norm(), 1e-12);
  EXPECT_LE(result.residual_norm, 1e-12);
}

TEST(Nnls, ClipsNegativeDirection) {
  const MatrixXd A = MatrixXd::Identity(2, 2);
  const NnlsResult result = SolveNnls(A, Eigen::Vector2d(1.0, -2.0));
  EXPECT_DOUBLE_EQ(result.x(0), 1.0);
  EXPECT_DOUBLE_EQ(result.x(1), 0.0);
  EXPECT_NEAR(result.residual_norm, 2.0, 1e-14);
}

TEST(Nnls, ZeroColumnStaysZero) {
  MatrixXd A(2, 2);
  A << 1, 0, 1, 0;
  const NnlsResult result = SolveNnls(A, Eigen::Vector2d(1.0, 1.0));
  EXPECT_EQ(result.x(1), 0.0);
  EXPECT_NEAR(result.x(0), 1.0, 1e-14);
}

TEST(Nnls, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int rows = 4 + trial % 5;
    const int cols = 2 + trial % 5;
    MatrixXd A(rows, cols);
    for (int j = 0; j < cols; ++j) A.col(j) = RandomVector(rng, rows, 1.0);
    const VectorXd b = RandomVector(rng, rows, 1.0);
    const NnlsResult result = SolveNnls(A, b);
    EXPECT_GE(result.x.minCoeff(), 0.0);
    EXPECT_NEAR(result.residual_norm, (A * result.x - b).norm(), 1e-12);
    EXPECT_NEAR(result.residual_norm, BruteForceNnlsResidual(A, b), 1e-9)
        << "trial " << trial;
  }
}

TEST(MixedNnls, FreeBlockAbsorbsItsRange) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixXd F(8, 2), N(8, 3);
    for (int j = 0; j < 2; ++j) F.col(j) = RandomVector(rng, 8, 1.0);
    for (int j = 0; j < 3; ++j) N.col(j) = RandomVector(rng, 8, 1.0);
    const VectorXd b = RandomVector(rng, 8, 1.0);
    const MixedNnlsResult result = SolveMixedNnls(F, N, b);
    EXPECT_EQ(result.free_rank, 2);
    EXPECT_GE(result.nonneg.minCoeff(), 0.0);
    // oracle: brute force over nonnegative supports with [F, N_S]
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<int> cols;
      for (int j = 0; j < 3; ++j) {
        if (mask & (1 << j)) cols.push_back(j);
      }
      MatrixXd sub(8, 2 + cols.size());
      sub.leftCols(2) = F;
      for (std::size_t k = 0; k < cols.size(); ++k) sub.col(2 + k) = N.col(cols[k]);
      const VectorXd x = sub.colPivHouseholderQr().solve(b);
      if (x.tail(cols.size()).size() > 0 && x.tail(cols.size()).minCoeff() < 0) {
        continue;
      }
      best = std::min(best, (sub * x - b).norm());
    }
    const double residual = (F * result.free + N * result.nonneg - b).norm();
    EXPECT_NEAR(residual, result.residual_norm, 1e-12);
    EXPECT_NEAR(residual, best, 1e-9) << "trial " << trial;
  }
}

TEST(MixedNnls, RankDeficientFreeBlockGivesMinimumNorm) {
  MatrixXd F(3, 2);
  F << 1, 1, 0, 0, 0, 0;  // rank 1
  const MatrixXd N = MatrixXd::Zero(3, 0);
  const MixedNnlsResult result = SolveMixedNnls(F, N, Eigen::Vector3d(2, 0, 0));
  EXPECT_EQ(result.free_rank, 1);
  EXPECT_NEAR(result.free(0), 1.0, 1e-12);
  EXPECT_NEAR(result.free(1), 1.0, 1e-12);
}

}  // namespace
}  // namespace spioc
