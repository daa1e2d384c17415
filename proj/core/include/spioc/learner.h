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

#ifndef SPIOC_LEARNER_H_
#define SPIOC_LEARNER_H_

#include <memory>
#include <string>
#include <vector>

#include "spioc/candidates.h"
#include "spioc/common.h"
#include "spioc/cost.h"
#include "spioc/dynamics.h"
#include "spioc/rollout.h"

namespace spioc {

struct LearnOptions {
  // identification threshold on Lambda_j
  double threshold = 1e-3;
  // drop the endpoint multiplier (finite-horizon baseline)
  bool finite_horizon = false;
  // treat every cost weight as known; only lambda and nu are fitted
  bool cost_known = false;
  // value of the frozen weights (fixed-feature rule) or of trace(R)
  double normalization_target = 1.0;
  // measured |u_a| at or below this counts as an exact zero; the matching
  // stationarity row is left out when |u| features are learned
  double zero_input_tolerance = 0.0;
  // projected-gradient settings
  double tolerance = 1e-9;
  int max_iterations = 50000;
  // skip the exact active-set relaxation and go straight to projected
  // gradient
  bool force_projected_gradient = false;
};

// Everything the relaxed KKT program needs. Several segments may share one
// cost; each gets its own multipliers.
struct LearnProblem {
  std::shared_ptr<const DynamicsModel> model;
  ParametricCost cost;  // structure, plus values of frozen weights
  CandidateSet candidates;
  std::vector<Trajectory> segments;
  LearnOptions options;

  void Validate() const;
};

struct ActivePair {
  int segment = 0;
  int step = 0;
  int candidate = 0;
};

// grad_U Lbar = M theta + c with theta = (free cost weights, active lambdas,
// nu per segment)
struct StationaritySystem {
  MatrixXd M;
  VectorXd c;
  std::vector<int> free_params;     // indices into the cost parameter vector
  std::vector<ActivePair> active;   // lambda columns in order
  int nu_per_segment = 0;           // n, or 0 for the finite-horizon baseline
  std::vector<int> segment_row_offset;
  std::vector<bool> row_used;       // false for rows left out (|u| at 0)
  double rollout_mismatch = 0.0;

  int num_cost_columns() const { return static_cast<int>(free_params.size()); }
  int num_lambda_columns() const { return static_cast<int>(active.size()); }
  int lambda_offset() const { return num_cost_columns(); }
  int nu_offset() const { return num_cost_columns() + num_lambda_columns(); }
  int num_used_rows() const;
};

StationaritySystem AssembleStationarity(const LearnProblem& problem);

struct LearnDiagnostics {
  std::string solver;        // "active-set" or "projected-gradient"
  int iterations = 0;
  bool converged = true;
  int rows = 0;
  int used_rows = 0;
  int columns = 0;
  int active_pairs = 0;
  int rank = 0;
  double rollout_mismatch = 0.0;
  double min_eigenvalue = 0.0;  // smallest eigenvalue over Q/R blocks
};

struct LearnResult {
  ParametricCost cost;                // learned weights
  std::vector<MatrixXd> lambda;       // per segment, e x J
  std::vector<VectorXd> nu;           // per segment; empty for the baseline
  VectorXd multiplier_sums;           // Lambda_j
  std::vector<int> identified;
  double residual = 0.0;              // ||grad_U Lbar||^2 over used rows
  double offset_norm = 0.0;           // ||c|| over used rows
  bool finite_horizon = false;
  LearnDiagnostics diagnostics;
};

LearnResult SolveRelaxed(const LearnProblem& problem);

// same program with nu removed
LearnResult LearnFiniteHorizonBaseline(LearnProblem problem);

std::vector<int> IdentifyConstraints(const LearnResult& result,
                                     double threshold);

// ||grad_U Lbar||^2 minimized over lambda >= 0 and nu with every cost weight
// fixed; used to cross-check forward solutions
double KnownCostStationarityResidual(
    std::shared_ptr<const DynamicsModel> model, const ParametricCost& cost,
    const CandidateSet& constraints, const Trajectory& segment);

// ||Q_learned - Q_ref||_F / ||Q_ref||_F
double RelativeStateWeightError(const ParametricCost& learned,
                                const MatrixXd& reference);

}  // namespace spioc

#endif  // SPIOC_LEARNER_H_
