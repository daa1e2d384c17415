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

#include "spioc/linalg.h"

#include <algorithm>
#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace spioc {

MatrixXd PseudoInverse(const MatrixXd& matrix, double relative_cutoff,
                       bool* truncated) {
  Eigen::JacobiSVD<MatrixXd> svd(matrix,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double cutoff = relative_cutoff * sigma_max;
  VectorXd inverse = VectorXd::Zero(sigma.size());
  bool dropped = false;
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) {
      inverse(i) = 1.0 / sigma(i);
    } else {
      dropped = true;
    }
  }
  if (truncated) *truncated = dropped;
  return svd.matrixV() * inverse.asDiagonal() * svd.matrixU().transpose();
}

MatrixXd ProjectPsd(const MatrixXd& matrix) {
  const MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  const VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  MatrixXd out = eig.eigenvectors() * clipped.asDiagonal() *
                 eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

VectorXd ProjectSimplex(const VectorXd& v, double total) {
  // sort-based projection (Held, Wolfe, Crowder)
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - total) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  return (v.array() - shift).cwiseMax(0.0).matrix();
}

MatrixXd ProjectSpectraplex(const MatrixXd& matrix, double total) {
  const MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sym);
  const VectorXd projected = ProjectSimplex(eig.eigenvalues(), total);
  MatrixXd out = eig.eigenvectors() * projected.asDiagonal() *
                 eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

double MinEigenvalue(const MatrixXd& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(
      0.5 * (symmetric + symmetric.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace spioc
