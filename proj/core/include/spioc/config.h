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

#ifndef SPIOC_CONFIG_H_
#define SPIOC_CONFIG_H_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "spioc/candidates.h"
#include "spioc/common.h"
#include "spioc/cost.h"
#include "spioc/dynamics.h"
#include "spioc/forward_solver.h"
#include "spioc/learner.h"

namespace spioc {

enum class SystemKind { kPendulum, kPlanarArm, kLinear };

struct SystemConfig {
  SystemKind kind = SystemKind::kPendulum;
  PendulumParams pendulum;
  PlanarArmParams arm;
  // arm: posture that closes the loop; the object base is derived from it
  VectorXd nominal_human;
  VectorXd nominal_object;
  // linear model x' = A x + B u
  MatrixXd A;
  MatrixXd B;
  double sampling_period = 1.0;
};

enum class CostFamily { kPendulum, kTracking, kQuadratic };

struct CostConfig {
  CostFamily family = CostFamily::kPendulum;
  MatrixXd Q;
  MatrixXd R;  // learned R (tracking) or frozen R0 (quadratic)
  double r = 0.0;
  std::vector<int> selector;  // state rows picked by S (tracking)
  VectorXd reference;         // y_s (tracking)
  bool diagonal_r = false;
};

enum class TerminalKind {
  kOrigin,  // long horizon anchored at the origin
  kFree,    // free terminal state
};

struct GenerationConfig {
  VectorXd x0;
  int horizon = 2000;
  TerminalKind terminal = TerminalKind::kOrigin;
  ForwardSettings settings;
  // multi-trajectory studies (arm): starts come from a pre-roll with random
  // constant inputs away from `x0`
  int trajectories = 1;
  int keep_steps = 0;  // 0 keeps the whole horizon
  int preroll_steps = 0;
  double preroll_std = 0.0;
  // starts closer than this to an enforced state bound are redrawn
  double start_margin = 0.0;
};

struct CandidateConfig {
  std::vector<SignalSpec> boxes;
  std::vector<std::pair<SignalSpec, SignalSpec>> hulls;
  std::vector<CandidateRow> rows;  // user-supplied rows
  double activity_tolerance = 1e-6;
  double noisy_activity_tolerance = 1e-3;
};

enum class SweepMode {
  kEndTime,  // segments [t_begin, t] for t in values
  kWindow,   // segments [t, t + window] for t in values
};

struct SweepConfig {
  SweepMode mode = SweepMode::kEndTime;
  double t_begin = 0.0;
  double window = 2.0;
  std::vector<double> values;
};

struct NoiseConfig {
  double input_std_fraction = 0.01;  // of the input range of the data
  int seeds = 10;
};

struct EvalConfig {
  // horizon study: learning/prediction lengths and a perturbation added to
  // the inputs from `tail_start` on before re-simulating the states
  std::vector<int> horizons;
  int tail_start = 0;
  double tail_perturbation = 0.0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  SystemConfig system;
  CostConfig cost;
  CandidateSet constraints;  // enforced during generation
  GenerationConfig generation;
  CandidateConfig candidates;
  LearnOptions learner;
  std::vector<std::pair<double, double>> segments;  // (t_i, t_e) in seconds
  SweepConfig sweep;
  NoiseConfig noise;
  EvalConfig eval;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  // optional measured trajectory (CSV); must exist when set
  std::string data_path;
};

// parses the JSON config format documented in the README; throws
// Error(kConfig) on schema violations. A relative "data" path is resolved
// against `base_dir` when that is non-empty.
ExperimentConfig ParseConfig(const std::string& json_text,
                             const std::string& base_dir = "");
// reads the file (Error(kIo) when unreadable) and parses it
ExperimentConfig LoadConfig(const std::string& path);

// checks cross-field consistency (dimensions, segments inside the horizon,
// referenced files); throws Error(kConfig)
void ValidateConfig(const ExperimentConfig& config);

std::shared_ptr<const DynamicsModel> MakeModel(const SystemConfig& system);
ParametricCost MakeGroundTruthCost(const ExperimentConfig& config);
// same structure as the ground truth, weights at a neutral starting value
ParametricCost MakeLearningCost(const ExperimentConfig& config);

}  // namespace spioc

#endif  // SPIOC_CONFIG_H_
