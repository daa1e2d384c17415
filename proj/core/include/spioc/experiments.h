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

#ifndef SPIOC_EXPERIMENTS_H_
#define SPIOC_EXPERIMENTS_H_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "spioc/candidates.h"
#include "spioc/config.h"
#include "spioc/forward_solver.h"
#include "spioc/learner.h"
#include "spioc/rollout.h"

namespace spioc {

struct GeneratedData {
  std::vector<Trajectory> trajectories;    // kept steps of each solve
  std::vector<ForwardSolution> solutions;  // full-horizon solves
};

// Solves the forward problems described by `config.generation` with the
// ground-truth cost and the enforced constraints. Throws
// Error(kNonConvergence) when a solve does not converge.
GeneratedData GenerateData(const ExperimentConfig& config);

// Adds zero-mean Gaussian noise to every input coordinate with standard
// deviation `fraction` times that coordinate's range over the trajectory.
// States are left as measured unless `resimulate` is set.
Trajectory AddInputNoise(const Trajectory& traj, double fraction,
                         std::mt19937_64& rng, bool resimulate = false,
                         const DynamicsModel* model = nullptr);

// Adds a ramp of slope `slope` (input units per second) to every input from
// step `start` on and re-simulates the states.
Trajectory AddTailPerturbation(const DynamicsModel& model,
                               const Trajectory& traj, int start,
                               double slope);

// candidate rows of `spec` over the union of the segments, plus the
// user-supplied rows
CandidateSet BuildCandidates(const CandidateConfig& spec,
                             const std::vector<Trajectory>& segments);

struct CostErrors {
  double state = 0.0;  // ||Q - Q_gt||_F / ||Q_gt||_F
  // tracking: ||R - R_gt||_F / ||R_gt||_F; pendulum: |r - r_gt|
  double input = 0.0;
};

CostErrors CompareToGroundTruth(const ExperimentConfig& config,
                                const ParametricCost& learned);

struct LearnRequest {
  bool use_candidates = true;
  bool finite_horizon = false;
  // overrides the candidate activity tolerance when positive
  double activity_tolerance = 0.0;
};

struct LearnOutcome {
  CandidateSet candidates;
  LearnResult result;
  CostErrors errors;
};

LearnOutcome LearnFromSegments(const ExperimentConfig& config,
                               const std::vector<Trajectory>& segments,
                               const LearnRequest& request = {});

struct SweepOptions {
  bool use_candidates = true;
  bool include_baseline = true;        // nu = 0 learner on the same segment
  bool include_unconstrained = false;  // learner without candidates
  int threads = 1;
};

struct SweepRow {
  double t_i = 0.0;
  double t_e = 0.0;
  LearnOutcome learned;
  bool has_baseline = false;
  LearnOutcome baseline;
  bool has_unconstrained = false;
  LearnOutcome unconstrained;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // one per segment, sorted by (t_i, t_e)
};

// (t_i, t_e) pairs from the sweep settings, or the explicit segments when
// the sweep lists no values
std::vector<std::pair<double, double>> SweepSegments(
    const ExperimentConfig& config);

SweepReport RunSweep(const ExperimentConfig& config, const Trajectory& data,
                     const std::vector<std::pair<double, double>>& segments,
                     const SweepOptions& options = {});

struct LeaveOneOutRow {
  int held_out = 0;
  CostErrors errors;
  std::vector<std::string> identified;
  double rms_constrained = 0.0;
  double rms_unconstrained = 0.0;  // NaN when not computed
  bool converged = true;           // every prediction converged
};

struct LeaveOneOutReport {
  std::vector<LeaveOneOutRow> rows;
  double mean_constrained = 0.0;
  double mean_unconstrained = 0.0;
};

// learns from all trajectories but one (first `steps` steps of each, all
// steps when 0) and predicts the held-out one with the identified
// constraints and, when asked, with a cost learned without candidates
LeaveOneOutReport RunLeaveOneOut(const ExperimentConfig& config,
                                 const std::vector<Trajectory>& data,
                                 int steps = 0,
                                 bool include_unconstrained = true);

struct HorizonRow {
  int steps = 0;
  double mean_rms = 0.0;  // constrained predictions
  int converged = 0;      // predictions that converged
};

// leave-one-out error as a function of the segment length on data whose
// tails carry the configured perturbation
std::vector<HorizonRow> RunHorizonStudy(const ExperimentConfig& config,
                                        const std::vector<Trajectory>& data);

struct NoiseRow {
  int seed = 0;
  double t_i = 0.0;
  double t_e = 0.0;
  CostErrors errors;
  std::vector<std::string> identified;
};

// learns every configured segment from `config.noise.seeds` noisy copies
std::vector<NoiseRow> RunNoiseStudy(const ExperimentConfig& config,
                                    const Trajectory& data);

std::vector<std::string> IdentifiedLabels(const LearnOutcome& outcome);

}  // namespace spioc

#endif  // SPIOC_EXPERIMENTS_H_
