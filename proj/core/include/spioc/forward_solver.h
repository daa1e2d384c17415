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

#ifndef SPIOC_FORWARD_SOLVER_H_
#define SPIOC_FORWARD_SOLVER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "spioc/candidates.h"
#include "spioc/common.h"
#include "spioc/cost.h"
#include "spioc/dynamics.h"
#include "spioc/rollout.h"

namespace spioc {

// how |u| features enter the inner loop
enum class AbsMode {
  kProximal,  // exact soft-thresholding
  kSmooth,    // sqrt(u^2 + smoothing)
};

enum class InnerMethod {
  kProjectedNewton,    // Riccati-structured projected Newton steps
  kProximalGradient,   // FISTA with backtracking
};

// curvature used by the projected Newton steps
enum class HessianMode {
  kAuto,         // exact when the model has analytic second derivatives
  kGaussNewton,  // drop the dynamics curvature
  kExact,        // dynamics curvature, by differences when not analytic
};

struct ForwardSettings {
  InnerMethod inner_method = InnerMethod::kProjectedNewton;
  HessianMode hessian = HessianMode::kAuto;
  int max_outer_iterations = 60;
  int max_inner_iterations = 20000;  // per outer iteration
  double inner_tolerance = 1e-7;        // gradient-mapping infinity norm
  double feasibility_tolerance = 1e-7;  // endpoint and inequality rows
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e12;
  AbsMode abs_mode = AbsMode::kProximal;
  double smoothing = 1e-8;
  // perturbed restarts from the best iterate when a solve does not converge
  int max_restarts = 2;
  double restart_scale = 0.05;
  std::uint64_t seed = 0;
  // SolveLongHorizon first solves horizons base, 2 base, ... and pads each
  // solution with zeros as the next starting point; 0 disables this
  int continuation_horizon = 250;
};

// min sum_{i<e} l(x_i, u_i) subject to the rollout, the enforced rows of
// `constraints` at every step and, when given, x_e = endpoint
struct ForwardProblem {
  std::shared_ptr<const DynamicsModel> model;
  ParametricCost cost;
  CandidateSet constraints;
  VectorXd x0;
  std::optional<VectorXd> endpoint;
  int horizon = 0;
  ForwardSettings settings;
  // starting inputs (stacked); zeros when empty
  VectorXd initial_inputs;

  void Validate() const;
};

struct KktReport {
  double stationarity = 0.0;          // squared norm of the reduced gradient
  double endpoint_violation = 0.0;    // infinity norm of x_e - endpoint
  double inequality_violation = 0.0;  // largest relative row violation
};

struct ForwardSolution {
  VectorXd inputs;  // stacked U*
  Trajectory trajectory;
  double objective = 0.0;  // sum of stage costs along the trajectory
  KktReport kkt;
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  int restarts = 0;
  double penalty = 0.0;
  // augmented dual value after each outer iteration
  std::vector<double> merit_history;
  VectorXd endpoint_multiplier;  // empty without an endpoint
  MatrixXd inequality_multipliers;  // e x J
};

ForwardSolution SolveShortestPath(const ForwardProblem& problem);

// long-horizon stand-in for the infinite-horizon problem: anchors x_N at
// `endpoint` (the origin when unset) and tags the trajectory as simulated
ForwardSolution SolveLongHorizon(ForwardProblem problem);

// same as SolveLongHorizon but leaves x_N free
ForwardSolution SolveFreeTerminal(ForwardProblem problem);

// sqrt(1/(n e) sum_{i=1..e} ||xhat_i - x_i||^2)
double RmsError(const Trajectory& prediction, const Trajectory& reference);

struct Prediction {
  ForwardSolution solution;
  double rms = 0.0;
};

// solves the shortest path between the reference's end states and scores it
Prediction PredictAndRms(std::shared_ptr<const DynamicsModel> model,
                         const ParametricCost& cost,
                         const CandidateSet& constraints,
                         const Trajectory& reference,
                         const ForwardSettings& settings = {});

}  // namespace spioc

#endif  // SPIOC_FORWARD_SOLVER_H_
