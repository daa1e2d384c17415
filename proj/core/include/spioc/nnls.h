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

#ifndef SPIOC_NNLS_H_
#define SPIOC_NNLS_H_

#include "spioc/common.h"

namespace spioc {

struct NnlsResult {
  VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = true;
};

// Lawson-Hanson active set: min ||A x - b|| subject to x >= 0. Columns are
// rescaled to unit norm internally; zero columns stay at zero.
NnlsResult SolveNnls(const MatrixXd& A, const VectorXd& b,
                     double tolerance = 1e-10, int max_iterations = -1);

struct MixedNnlsResult {
  VectorXd free;      // unconstrained block, minimum norm among minimizers
  VectorXd nonneg;    // x >= 0 block
  double residual_norm = 0.0;
  int iterations = 0;
  int free_rank = 0;
  bool converged = true;
};

// min ||F a + N z - b|| over a free and z >= 0. The free block is eliminated
// by projecting onto the orthogonal complement of range(F).
MixedNnlsResult SolveMixedNnls(const MatrixXd& F, const MatrixXd& N,
                               const VectorXd& b, double tolerance = 1e-10);

}  // namespace spioc

#endif  // SPIOC_NNLS_H_
