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

#include "spioc/config.h"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json_util.h"

namespace spioc {
namespace {

using internal::Get;
using internal::Json;
using internal::Require;
using internal::ToMatrix;
using internal::ToSignal;
using internal::ToVector;

[[noreturn]] void Bad(const std::string& what) {
  Fail(ErrorCode::kConfig, "config: " + what);
}

void CheckKeys(const Json& j, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (!j.is_object()) Bad(where + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known |= item.key() == key;
    if (!known) Bad(where + ": unknown field '" + item.key() + "'");
  }
}

SystemConfig ParseSystem(const Json& j) {
  const std::string type = Get<std::string>(j, "type", "");
  SystemConfig system;
  if (type == "pendulum") {
    CheckKeys(j, {"type", "gravity", "length", "mass", "sampling_period",
                  "torque_bound"},
              "system");
    system.kind = SystemKind::kPendulum;
    PendulumParams& p = system.pendulum;
    p.gravity = Get<double>(j, "gravity", p.gravity);
    p.length = Get<double>(j, "length", p.length);
    p.mass = Get<double>(j, "mass", p.mass);
    p.sampling_period = Get<double>(j, "sampling_period", p.sampling_period);
    p.torque_bound = Get<double>(j, "torque_bound", p.torque_bound);
  } else if (type == "planar_arm") {
    CheckKeys(j, {"type", "human_links", "object_links", "sampling_period",
                  "nominal_human", "nominal_object", "object_base",
                  "singular_value_cutoff"},
              "system");
    system.kind = SystemKind::kPlanarArm;
    PlanarArmParams& p = system.arm;
    p.human_links = Get<std::vector<double>>(j, "human_links", p.human_links);
    p.object_links =
        Get<std::vector<double>>(j, "object_links", p.object_links);
    p.sampling_period = Get<double>(j, "sampling_period", p.sampling_period);
    p.singular_value_cutoff =
        Get<double>(j, "singular_value_cutoff", p.singular_value_cutoff);
    if (j.contains("nominal_human") != j.contains("nominal_object")) {
      Bad("system: nominal_human and nominal_object go together");
    }
    if (j.contains("nominal_human")) {
      system.nominal_human = ToVector(j["nominal_human"], "nominal_human");
      system.nominal_object = ToVector(j["nominal_object"], "nominal_object");
      if (system.nominal_human.size() != p.human_joints() ||
          system.nominal_object.size() != p.object_joints()) {
        Bad("system: nominal posture size does not match the link counts");
      }
      if (j.contains("object_base")) {
        Bad("system: give either object_base or a nominal posture");
      }
      p.object_base = ClosingObjectBase(p, system.nominal_human,
                                        system.nominal_object);
    } else if (j.contains("object_base")) {
      const VectorXd base = ToVector(j["object_base"], "object_base");
      if (base.size() != 3) Bad("system: object_base needs (x, y, heading)");
      p.object_base = base;
    }
  } else if (type == "linear") {
    CheckKeys(j, {"type", "A", "B", "sampling_period"}, "system");
    system.kind = SystemKind::kLinear;
    system.A = ToMatrix(Require(j, "A", "system"), "system.A");
    system.B = ToMatrix(Require(j, "B", "system"), "system.B");
    system.sampling_period = Get<double>(j, "sampling_period", 1.0);
  } else {
    Bad("system.type must be pendulum, planar_arm or linear");
  }
  return system;
}

CostConfig ParseCost(const Json& j) {
  const std::string family = Get<std::string>(j, "family", "");
  CostConfig cost;
  if (family == "pendulum") {
    CheckKeys(j, {"family", "Q", "r"}, "cost");
    cost.family = CostFamily::kPendulum;
    cost.Q = ToMatrix(Require(j, "Q", "cost"), "cost.Q");
    cost.r = Get<double>(j, "r", 0.0);
  } else if (family == "tracking") {
    CheckKeys(j, {"family", "selector", "reference", "Q", "R", "diagonal_R"},
              "cost");
    cost.family = CostFamily::kTracking;
    cost.selector = Get<std::vector<int>>(j, "selector", {});
    cost.reference = ToVector(Require(j, "reference", "cost"), "reference");
    cost.Q = ToMatrix(Require(j, "Q", "cost"), "cost.Q");
    cost.R = ToMatrix(Require(j, "R", "cost"), "cost.R");
    cost.diagonal_r = Get<bool>(j, "diagonal_R", false);
  } else if (family == "quadratic") {
    CheckKeys(j, {"family", "Q", "R0"}, "cost");
    cost.family = CostFamily::kQuadratic;
    cost.Q = ToMatrix(Require(j, "Q", "cost"), "cost.Q");
    cost.R = ToMatrix(Require(j, "R0", "cost"), "cost.R0");
  } else {
    Bad("cost.family must be pendulum, tracking or quadratic");
  }
  return cost;
}

ForwardSettings ParseSolver(const Json& j, ForwardSettings s) {
  CheckKeys(j, {"method", "hessian", "abs_mode", "max_outer_iterations",
                "max_inner_iterations", "inner_tolerance",
                "feasibility_tolerance", "initial_penalty", "penalty_growth",
                "max_penalty", "smoothing", "max_restarts", "restart_scale",
                "continuation_horizon"},
            "solver");
  const std::string method = Get<std::string>(j, "method", "newton");
  if (method == "newton") {
    s.inner_method = InnerMethod::kProjectedNewton;
  } else if (method == "proximal_gradient") {
    s.inner_method = InnerMethod::kProximalGradient;
  } else {
    Bad("solver.method must be newton or proximal_gradient");
  }
  const std::string hessian = Get<std::string>(j, "hessian", "auto");
  if (hessian == "auto") {
    s.hessian = HessianMode::kAuto;
  } else if (hessian == "gauss_newton") {
    s.hessian = HessianMode::kGaussNewton;
  } else if (hessian == "exact") {
    s.hessian = HessianMode::kExact;
  } else {
    Bad("solver.hessian must be auto, gauss_newton or exact");
  }
  const std::string abs = Get<std::string>(j, "abs_mode", "proximal");
  if (abs == "proximal") {
    s.abs_mode = AbsMode::kProximal;
  } else if (abs == "smooth") {
    s.abs_mode = AbsMode::kSmooth;
  } else {
    Bad("solver.abs_mode must be proximal or smooth");
  }
  s.max_outer_iterations =
      Get<int>(j, "max_outer_iterations", s.max_outer_iterations);
  s.max_inner_iterations =
      Get<int>(j, "max_inner_iterations", s.max_inner_iterations);
  s.inner_tolerance = Get<double>(j, "inner_tolerance", s.inner_tolerance);
  s.feasibility_tolerance =
      Get<double>(j, "feasibility_tolerance", s.feasibility_tolerance);
  s.initial_penalty = Get<double>(j, "initial_penalty", s.initial_penalty);
  s.penalty_growth = Get<double>(j, "penalty_growth", s.penalty_growth);
  s.max_penalty = Get<double>(j, "max_penalty", s.max_penalty);
  s.smoothing = Get<double>(j, "smoothing", s.smoothing);
  s.max_restarts = Get<int>(j, "max_restarts", s.max_restarts);
  s.restart_scale = Get<double>(j, "restart_scale", s.restart_scale);
  s.continuation_horizon =
      Get<int>(j, "continuation_horizon", s.continuation_horizon);
  return s;
}

GenerationConfig ParseGeneration(const Json& j) {
  CheckKeys(j, {"x0", "horizon", "terminal", "trajectories", "keep_steps",
                "preroll_steps", "preroll_std", "start_margin", "solver"},
            "generation");
  GenerationConfig g;
  g.x0 = ToVector(Require(j, "x0", "generation"), "generation.x0");
  g.horizon = Get<int>(j, "horizon", g.horizon);
  const std::string terminal = Get<std::string>(j, "terminal", "origin");
  if (terminal == "origin") {
    g.terminal = TerminalKind::kOrigin;
  } else if (terminal == "free") {
    g.terminal = TerminalKind::kFree;
  } else {
    Bad("generation.terminal must be origin or free");
  }
  g.trajectories = Get<int>(j, "trajectories", g.trajectories);
  g.keep_steps = Get<int>(j, "keep_steps", g.keep_steps);
  g.preroll_steps = Get<int>(j, "preroll_steps", g.preroll_steps);
  g.preroll_std = Get<double>(j, "preroll_std", g.preroll_std);
  g.start_margin = Get<double>(j, "start_margin", g.start_margin);
  if (j.contains("solver")) g.settings = ParseSolver(j["solver"], g.settings);
  return g;
}

CandidateConfig ParseCandidates(const Json& j) {
  CheckKeys(j, {"boxes", "hulls", "rows", "activity_tolerance",
                "noisy_activity_tolerance"},
            "candidates");
  CandidateConfig c;
  if (j.contains("boxes")) {
    if (!j["boxes"].is_array()) Bad("candidates.boxes must be an array");
    for (const Json& s : j["boxes"]) {
      c.boxes.push_back(ToSignal(s, "candidates.boxes"));
    }
  }
  if (j.contains("hulls")) {
    if (!j["hulls"].is_array()) Bad("candidates.hulls must be an array");
    for (const Json& pair : j["hulls"]) {
      if (!pair.is_array() || pair.size() != 2) {
        Bad("candidates.hulls entries must be signal pairs");
      }
      c.hulls.emplace_back(ToSignal(pair[0], "candidates.hulls"),
                           ToSignal(pair[1], "candidates.hulls"));
    }
  }
  if (j.contains("rows")) {
    c.rows = internal::ToCandidateSet(j["rows"], "candidates.rows").rows;
  }
  c.activity_tolerance =
      Get<double>(j, "activity_tolerance", c.activity_tolerance);
  c.noisy_activity_tolerance =
      Get<double>(j, "noisy_activity_tolerance", c.noisy_activity_tolerance);
  return c;
}

LearnOptions ParseLearner(const Json& j) {
  CheckKeys(j, {"threshold", "zero_input_tolerance", "tolerance",
                "max_iterations", "normalization_target",
                "force_projected_gradient"},
            "learner");
  LearnOptions o;
  o.threshold = Get<double>(j, "threshold", o.threshold);
  o.zero_input_tolerance =
      Get<double>(j, "zero_input_tolerance", o.zero_input_tolerance);
  o.tolerance = Get<double>(j, "tolerance", o.tolerance);
  o.max_iterations = Get<int>(j, "max_iterations", o.max_iterations);
  o.normalization_target =
      Get<double>(j, "normalization_target", o.normalization_target);
  o.force_projected_gradient =
      Get<bool>(j, "force_projected_gradient", o.force_projected_gradient);
  return o;
}

SweepConfig ParseSweep(const Json& j) {
  CheckKeys(j, {"mode", "t_begin", "window", "values"}, "sweep");
  SweepConfig s;
  const std::string mode = Get<std::string>(j, "mode", "end");
  if (mode == "end") {
    s.mode = SweepMode::kEndTime;
  } else if (mode == "window") {
    s.mode = SweepMode::kWindow;
  } else {
    Bad("sweep.mode must be end or window");
  }
  s.t_begin = Get<double>(j, "t_begin", s.t_begin);
  s.window = Get<double>(j, "window", s.window);
  s.values = Get<std::vector<double>>(j, "values", {});
  return s;
}

int StateDim(const SystemConfig& system) {
  switch (system.kind) {
    case SystemKind::kPendulum: return 2;
    case SystemKind::kPlanarArm:
      return system.arm.human_joints() + system.arm.object_joints();
    case SystemKind::kLinear: return static_cast<int>(system.A.rows());
  }
  return 0;
}

int InputDim(const SystemConfig& system) {
  switch (system.kind) {
    case SystemKind::kPendulum: return 1;
    case SystemKind::kPlanarArm: return system.arm.human_joints();
    case SystemKind::kLinear: return static_cast<int>(system.B.cols());
  }
  return 0;
}

double SamplingPeriod(const SystemConfig& system) {
  switch (system.kind) {
    case SystemKind::kPendulum: return system.pendulum.sampling_period;
    case SystemKind::kPlanarArm: return system.arm.sampling_period;
    case SystemKind::kLinear: return system.sampling_period;
  }
  return 0.0;
}

MatrixXd Selector(const CostConfig& cost, int n) {
  MatrixXd S = MatrixXd::Zero(static_cast<Eigen::Index>(cost.selector.size()),
                              n);
  for (std::size_t k = 0; k < cost.selector.size(); ++k) {
    S(static_cast<Eigen::Index>(k), cost.selector[k]) = 1.0;
  }
  return S;
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& json_text,
                             const std::string& base_dir) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    Bad(std::string("malformed JSON: ") + e.what());
  }
  CheckKeys(j, {"name", "seed", "output_dir", "data", "system", "cost",
                "constraints", "generation", "candidates", "learner",
                "segments", "sweep", "noise", "eval"},
            "top level");
  ExperimentConfig config;
  config.name = Get<std::string>(j, "name", config.name);
  config.seed = Get<std::uint64_t>(j, "seed", config.seed);
  config.output_dir = Get<std::string>(j, "output_dir", config.output_dir);
  config.data_path = Get<std::string>(j, "data", "");
  if (!config.data_path.empty() && !base_dir.empty() &&
      std::filesystem::path(config.data_path).is_relative()) {
    config.data_path =
        (std::filesystem::path(base_dir) / config.data_path).string();
  }
  config.system = ParseSystem(Require(j, "system", "top level"));
  config.cost = ParseCost(Require(j, "cost", "top level"));
  if (j.contains("constraints")) {
    config.constraints =
        internal::ToCandidateSet(j["constraints"], "constraints");
  }
  config.generation = ParseGeneration(Require(j, "generation", "top level"));
  config.generation.settings.seed = config.seed;
  if (j.contains("candidates")) {
    config.candidates = ParseCandidates(j["candidates"]);
  }
  if (j.contains("learner")) config.learner = ParseLearner(j["learner"]);
  if (j.contains("segments")) {
    const Json& segs = j["segments"];
    if (!segs.is_array()) Bad("segments must be an array of [t_i, t_e]");
    for (const Json& s : segs) {
      if (!s.is_array() || s.size() != 2 || !s[0].is_number() ||
          !s[1].is_number()) {
        Bad("segments must be an array of [t_i, t_e]");
      }
      config.segments.emplace_back(s[0].get<double>(), s[1].get<double>());
    }
  }
  if (j.contains("sweep")) config.sweep = ParseSweep(j["sweep"]);
  if (j.contains("noise")) {
    CheckKeys(j["noise"], {"input_std_fraction", "seeds"}, "noise");
    config.noise.input_std_fraction = Get<double>(
        j["noise"], "input_std_fraction", config.noise.input_std_fraction);
    config.noise.seeds = Get<int>(j["noise"], "seeds", config.noise.seeds);
  }
  if (j.contains("eval")) {
    CheckKeys(j["eval"], {"horizons", "tail_start", "tail_perturbation"},
              "eval");
    config.eval.horizons = Get<std::vector<int>>(j["eval"], "horizons", {});
    config.eval.tail_start = Get<int>(j["eval"], "tail_start", 0);
    config.eval.tail_perturbation =
        Get<double>(j["eval"], "tail_perturbation", 0.0);
  }
  ValidateConfig(config);
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read config file " + path);
  std::stringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str(),
                     std::filesystem::path(path).parent_path().string());
}

void ValidateConfig(const ExperimentConfig& config) {
  const SystemConfig& system = config.system;
  try {
    switch (system.kind) {
      case SystemKind::kPendulum: system.pendulum.Validate(); break;
      case SystemKind::kPlanarArm: system.arm.Validate(); break;
      case SystemKind::kLinear:
        if (system.A.rows() == 0 || system.A.rows() != system.A.cols() ||
            system.B.rows() != system.A.rows() || system.B.cols() == 0) {
          Bad("system: A must be n x n and B n x m");
        }
        break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Bad(std::string("system: ") + e.what());
  }
  const int n = StateDim(system);
  const int m = InputDim(system);
  const LearnOptions& learner = config.learner;
  if (!(learner.threshold >= 0.0)) Bad("learner.threshold must be >= 0");
  if (!(learner.zero_input_tolerance >= 0.0)) {
    Bad("learner.zero_input_tolerance must be >= 0");
  }
  if (!(learner.tolerance > 0.0) || learner.max_iterations < 1) {
    Bad("learner.tolerance must be > 0 and max_iterations >= 1");
  }
  if (!(learner.normalization_target > 0.0)) {
    Bad("learner.normalization_target must be > 0");
  }
  const CostConfig& cost = config.cost;
  switch (cost.family) {
    case CostFamily::kPendulum:
      if (system.kind != SystemKind::kPendulum) {
        Bad("cost.family pendulum needs the pendulum system");
      }
      if (cost.Q.rows() != 2 || cost.Q.cols() != 2) Bad("cost.Q must be 2x2");
      if (cost.r < 0.0) Bad("cost.r must be >= 0");
      break;
    case CostFamily::kTracking: {
      const int ny = static_cast<int>(cost.selector.size());
      if (ny == 0) Bad("cost.selector must list at least one state");
      for (int s : cost.selector) {
        if (s < 0 || s >= n) Bad("cost.selector index out of range");
      }
      if (cost.reference.size() != ny) Bad("cost.reference size != selector");
      if (cost.Q.rows() != ny || cost.Q.cols() != ny) {
        Bad("cost.Q must match the selector size");
      }
      if (cost.R.rows() != m || cost.R.cols() != m) {
        Bad("cost.R must be m x m");
      }
      break;
    }
    case CostFamily::kQuadratic:
      if (cost.Q.rows() != n || cost.Q.cols() != n) Bad("cost.Q must be n x n");
      if (cost.R.rows() != m || cost.R.cols() != m) {
        Bad("cost.R0 must be m x m");
      }
      break;
  }
  const GenerationConfig& g = config.generation;
  if (g.x0.size() != n) Bad("generation.x0 must have the state dimension");
  if (g.horizon <= 0) Bad("generation.horizon must be positive");
  if (g.trajectories <= 0) Bad("generation.trajectories must be positive");
  if (g.keep_steps < 0 || g.keep_steps > g.horizon) {
    Bad("generation.keep_steps must lie in [0, horizon]");
  }
  if (g.preroll_steps < 0 || g.preroll_std < 0.0 || g.start_margin < 0.0) {
    Bad("generation pre-roll settings must be nonnegative");
  }
  try {
    for (const CandidateRow& row : config.constraints.rows) {
      for (const SignalSpec& s : row.signals) ValidateSignal(s, n, m);
    }
    for (const SignalSpec& s : config.candidates.boxes) ValidateSignal(s, n, m);
    for (const auto& [a, b] : config.candidates.hulls) {
      ValidateSignal(a, n, m);
      ValidateSignal(b, n, m);
    }
    for (const CandidateRow& row : config.candidates.rows) {
      for (const SignalSpec& s : row.signals) ValidateSignal(s, n, m);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Bad(e.what());
  }
  // segments must fit in the generated data (the kept part of it)
  const double ts = SamplingPeriod(system);
  const int kept = g.keep_steps > 0 ? g.keep_steps : g.horizon;
  const double t_max = kept * ts + 0.5 * ts;
  for (const auto& [ti, te] : config.segments) {
    if (!(ti >= 0.0 && te > ti && te <= t_max)) {
      Bad("segment [" + std::to_string(ti) + ", " + std::to_string(te) +
          "] is not inside the generated data");
    }
  }
  for (double v : config.sweep.values) {
    const double t0 = config.sweep.mode == SweepMode::kEndTime
                          ? config.sweep.t_begin
                          : v;
    const double t1 = config.sweep.mode == SweepMode::kEndTime
                          ? v
                          : v + config.sweep.window;
    if (!(t0 >= 0.0 && t1 > t0 && t1 <= t_max)) {
      Bad("sweep value " + std::to_string(v) +
          " gives a segment outside the generated data");
    }
  }
  if (config.noise.input_std_fraction < 0.0 || config.noise.seeds < 0) {
    Bad("noise settings must be nonnegative");
  }
  for (int h : config.eval.horizons) {
    if (h <= 0 || h > kept) Bad("eval.horizons must lie in [1, kept steps]");
  }
  if (!config.data_path.empty() &&
      !std::filesystem::exists(config.data_path)) {
    Bad("data file " + config.data_path + " does not exist");
  }
}

std::shared_ptr<const DynamicsModel> MakeModel(const SystemConfig& system) {
  switch (system.kind) {
    case SystemKind::kPendulum:
      return std::make_shared<PendulumModel>(system.pendulum);
    case SystemKind::kPlanarArm:
      return std::make_shared<PlanarArmModel>(system.arm);
    case SystemKind::kLinear:
      return std::make_shared<LinearModel>(system.A, system.B,
                                           system.sampling_period);
  }
  Bad("unknown system");
}

ParametricCost MakeGroundTruthCost(const ExperimentConfig& config) {
  const CostConfig& cost = config.cost;
  switch (cost.family) {
    case CostFamily::kPendulum:
      return ParametricCost::Pendulum(cost.Q, cost.r);
    case CostFamily::kTracking:
      return ParametricCost::Tracking(
          Selector(cost, StateDim(config.system)), cost.reference, cost.Q,
          cost.R, cost.diagonal_r);
    case CostFamily::kQuadratic:
      return ParametricCost::Quadratic(cost.Q, cost.R);
  }
  Bad("unknown cost family");
}

ParametricCost MakeLearningCost(const ExperimentConfig& config) {
  const CostConfig& cost = config.cost;
  const Eigen::Index ny = cost.Q.rows();
  switch (cost.family) {
    case CostFamily::kPendulum:
      return ParametricCost::Pendulum(MatrixXd::Identity(2, 2), 0.0);
    case CostFamily::kTracking: {
      const Eigen::Index m = cost.R.rows();
      return ParametricCost::Tracking(
          Selector(cost, StateDim(config.system)), cost.reference,
          MatrixXd::Identity(ny, ny),
          MatrixXd::Identity(m, m) / static_cast<double>(m), cost.diagonal_r);
    }
    case CostFamily::kQuadratic:
      return ParametricCost::Quadratic(MatrixXd::Identity(ny, ny), cost.R);
  }
  Bad("unknown cost family");
}

}  // namespace spioc
