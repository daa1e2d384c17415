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

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/QR>

namespace spioc {
namespace {

// minimum-norm least squares on the selected columns
VectorXd SubsetLeastSquares(const MatrixXd& A, const VectorXd& b,
                            const std::vector<int>& columns) {
  MatrixXd sub(A.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    sub.col(static_cast<Eigen::Index>(k)) = A.col(columns[k]);
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(sub);
  return cod.solve(b);
}

}  // namespace

NnlsResult SolveNnls(const MatrixXd& A, const VectorXd& b, double tolerance,
                     int max_iterations) {
  const int n = static_cast<int>(A.cols());
  CheckDimension(A.rows() == b.size(), "nnls: rows of A != size of b");
  NnlsResult result;
  result.x = VectorXd::Zero(n);
  if (n == 0) {
    result.residual_norm = b.norm();
    return result;
  }
  if (max_iterations < 0) max_iterations = 3 * n + 30;

  VectorXd scale(n);
  MatrixXd As = A;
  const double largest = A.colwise().norm().maxCoeff();
  for (int j = 0; j < n; ++j) {
    // columns that vanish relative to the largest one never enter
    const double norm = A.col(j).norm();
    scale(j) = norm > 1e-12 * largest ? 1.0 / norm : 0.0;
    As.col(j) *= scale(j);
  }
  const double threshold = tolerance * std::max(1.0, b.norm());

  std::vector<bool> passive(n, false);
  VectorXd x = VectorXd::Zero(n);
  VectorXd w = As.transpose() * b;
  int iterations = 0;
  while (true) {
    int enter = -1;
    double best = threshold;
    for (int j = 0; j < n; ++j) {
      if (!passive[j] && scale(j) > 0.0 && w(j) > best) {
        best = w(j);
        enter = j;
      }
    }
    if (enter < 0) break;
    if (++iterations > max_iterations) {
      result.converged = false;
      break;
    }
    passive[enter] = true;

    // inner loop: keep the passive solution feasible
    while (true) {
      std::vector<int> cols;
      for (int j = 0; j < n; ++j) {
        if (passive[j]) cols.push_back(j);
      }
      const VectorXd s_passive = SubsetLeastSquares(As, b, cols);
      VectorXd s = VectorXd::Zero(n);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        s(cols[k]) = s_passive(static_cast<Eigen::Index>(k));
      }
      bool feasible = true;
      for (int j : cols) {
        if (s(j) <= 0.0) feasible = false;
      }
      if (feasible) {
        x = s;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (int j : cols) {
        if (s(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - s(j)));
      }
      if (!std::isfinite(alpha)) alpha = 0.0;
      x += alpha * (s - x);
      for (int j : cols) {
        if (x(j) <= 1e-15 * (1.0 + std::abs(s(j)))) {
          passive[j] = false;
          x(j) = 0.0;
        }
      }
      if (++iterations > max_iterations) {
        result.converged = false;
        break;
      }
    }
    if (!result.converged) break;
    w = As.transpose() * (b - As * x);
  }
  result.iterations = iterations;
  result.x = x.cwiseProduct(scale);
  result.residual_norm = (A * result.x - b).norm();
  return result;
}

MixedNnlsResult SolveMixedNnls(const MatrixXd& F, const MatrixXd& N,
                               const VectorXd& b, double tolerance) {
  CheckDimension(F.rows() == b.size() && N.rows() == b.size(),
                 "mixed nnls: row mismatch");
  MixedNnlsResult result;
  MatrixXd projected_n = N;
  VectorXd projected_b = b;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
  VectorXd free_scale = VectorXd::Ones(F.cols());
  MatrixXd scaled_f = F;
  for (Eigen::Index j = 0; j < F.cols(); ++j) {
    const double norm = F.col(j).norm();
    free_scale(j) = norm > 0.0 ? 1.0 / norm : 1.0;
    scaled_f.col(j) *= free_scale(j);
  }
  if (F.cols() > 0) {
    cod.setThreshold(1e-12);
    cod.compute(scaled_f);
    result.free_rank = static_cast<int>(cod.rank());
    // orthonormal basis of range(F) from the leading Householder vectors
    const MatrixXd basis = cod.householderQ() *
                           MatrixXd::Identity(F.rows(), result.free_rank);
    projected_n -= basis * (basis.transpose() * N);
    projected_b -= basis * (basis.transpose() * b);
  }
  const NnlsResult nn = SolveNnls(projected_n, projected_b, tolerance);
  result.nonneg = nn.x;
  result.iterations = nn.iterations;
  result.converged = nn.converged;
  if (F.cols() > 0) {
    result.free = cod.solve(b - N * nn.x).cwiseProduct(free_scale);
  } else {
    result.free = VectorXd(0);
  }
  result.residual_norm = (F * result.free + N * result.nonneg - b).norm();
  return result;
}

}  // namespace spioc
