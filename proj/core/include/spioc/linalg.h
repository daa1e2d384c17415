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

#ifndef SPIOC_LINALG_H_
#define SPIOC_LINALG_H_

#include "spioc/common.h"

namespace spioc {

// Moore-Penrose pseudo-inverse via SVD. Singular values below
// relative_cutoff * sigma_max are treated as zero; `truncated` reports
// whether that happened.
MatrixXd PseudoInverse(const MatrixXd& matrix, double relative_cutoff = 1e-8,
                       bool* truncated = nullptr);

// nearest (Frobenius) positive semidefinite matrix to the symmetric part of
// `matrix`
MatrixXd ProjectPsd(const MatrixXd& matrix);

// Euclidean projection onto {v : v >= 0, sum(v) = total}
VectorXd ProjectSimplex(const VectorXd& v, double total);

// nearest (Frobenius) matrix in {X = X^T, X >= 0, trace(X) = total}
MatrixXd ProjectSpectraplex(const MatrixXd& matrix, double total);

double MinEigenvalue(const MatrixXd& symmetric);

}  // namespace spioc

#endif  // SPIOC_LINALG_H_
