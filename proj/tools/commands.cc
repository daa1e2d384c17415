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

#include "commands.h"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spioc/config.h"
#include "spioc/experiments.h"
#include "spioc/serialization.h"
#include "spioc/trajectory_io.h"

namespace spioc::cli {
namespace {

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kUnderdetermined:
      return kExitConfig;
    case ErrorCode::kNonConvergence:
    case ErrorCode::kDegenerateNormalization:
      return kExitNonConvergence;
    case ErrorCode::kIo:
      return kExitIo;
  }
  return kExitConfig;
}

std::string OutPath(const ExperimentConfig& config, const std::string& file) {
  return (std::filesystem::path(config.output_dir) / file).string();
}

std::string ToCsv(const Trajectory& traj) {
  std::ostringstream out;
  WriteTrajectoryCsv(out, traj);
  return out.str();
}

// measured trajectories from --data, the config's data file, or a fresh
// (deterministic) generation run
std::vector<Trajectory> LoadData(const ExperimentConfig& config,
                                 const CommandOptions& options) {
  std::vector<std::string> paths = options.data_paths;
  if (paths.empty() && !config.data_path.empty()) {
    paths.push_back(config.data_path);
  }
  if (paths.empty()) return GenerateData(config).trajectories;
  std::vector<Trajectory> data;
  for (const std::string& path : paths) data.push_back(LoadTrajectoryCsv(path));
  const int n = MakeModel(config.system)->state_dim();
  for (const Trajectory& traj : data) {
    if (traj.state_dim() != n) {
      Fail(ErrorCode::kConfig, "data file does not match the system's state dimension");
    }
  }
  return data;
}

std::vector<std::pair<double, double>> SegmentsFor(
    const ExperimentConfig& config, const CommandOptions& options) {
  if (options.segment) return {*options.segment};
  return SweepSegments(config);
}

void RequireSingle(const std::vector<Trajectory>& data, const char* command) {
  if (data.size() != 1) {
    Fail(ErrorCode::kConfig,
         std::string(command) + " works on a single trajectory");
  }
}

int Generate(const ExperimentConfig& config, std::ostream& out) {
  const GeneratedData data = GenerateData(config);
  const std::size_t count = data.trajectories.size();
  for (std::size_t k = 0; k < count; ++k) {
    const std::string stem =
        count == 1 ? config.name : config.name + "_" + std::to_string(k);
    WriteTextFile(OutPath(config, stem + ".csv"), ToCsv(data.trajectories[k]));
    WriteTextFile(OutPath(config, stem + ".json"),
                  ForwardSidecarToJson(data.solutions[k],
                                       config.generation.settings));
    out << stem << ": objective " << FormatDouble(data.solutions[k].objective)
        << ", outer iterations " << data.solutions[k].outer_iterations
        << "\n";
  }
  return kExitOk;
}

int Learn(const ExperimentConfig& config, const CommandOptions& options,
          std::ostream& out) {
  const std::vector<Trajectory> data = LoadData(config, options);
  std::vector<Trajectory> segments;
  std::optional<std::pair<double, double>> window = options.segment;
  if (!window && !config.segments.empty()) window = config.segments.front();
  for (const Trajectory& traj : data) {
    segments.push_back(window ? traj.SegmentByTime(window->first, window->second)
                              : traj);
  }
  const LearnOutcome outcome = LearnFromSegments(
      config, segments, {!options.no_candidates, options.finite_horizon, 0.0});
  WriteTextFile(OutPath(config, "learn.json"), LearnOutcomeToJson(outcome));
  out << "error_Q " << FormatDouble(outcome.errors.state) << ", error_input "
      << FormatDouble(outcome.errors.input) << ", residual "
      << FormatDouble(outcome.result.residual) << ", identified "
      << outcome.result.identified.size() << "\n";
  return kExitOk;
}

int Sweep(const ExperimentConfig& config, const CommandOptions& options,
          std::ostream& out, bool baseline_only) {
  const std::vector<Trajectory> data = LoadData(config, options);
  RequireSingle(data, baseline_only ? "baseline" : "sweep");
  SweepOptions sweep;
  sweep.use_candidates = !options.no_candidates;
  sweep.include_baseline = true;
  sweep.include_unconstrained = !baseline_only && !options.no_candidates;
  sweep.threads = options.threads;
  const SweepReport report =
      RunSweep(config, data.front(), SegmentsFor(config, options), sweep);
  std::ostringstream csv;
  if (baseline_only) {
    WriteBaselineCsv(csv, report);
  } else {
    WriteSweepCsv(csv, report);
  }
  const std::string file = baseline_only ? "baseline.csv" : "sweep.csv";
  WriteTextFile(OutPath(config, file), csv.str());
  out << "wrote " << report.rows.size() << " rows to "
      << OutPath(config, file) << "\n";
  return kExitOk;
}

int Eval(const ExperimentConfig& config, const CommandOptions& options,
         std::ostream& out) {
  const std::vector<Trajectory> data = LoadData(config, options);
  if (data.size() > 1) {
    const LeaveOneOutReport loo = RunLeaveOneOut(config, data);
    std::ostringstream csv;
    WriteLeaveOneOutCsv(csv, loo);
    WriteTextFile(OutPath(config, "loo.csv"), csv.str());
    out << "leave-one-out mean rms: constrained "
        << FormatDouble(loo.mean_constrained) << ", unconstrained "
        << FormatDouble(loo.mean_unconstrained) << "\n";
    if (!config.eval.horizons.empty()) {
      std::ostringstream horizon_csv;
      WriteHorizonCsv(horizon_csv, RunHorizonStudy(config, data));
      WriteTextFile(OutPath(config, "horizon.csv"), horizon_csv.str());
    }
  } else {
    // learn each segment, then predict it back between its end states
    std::ostringstream csv;
    csv << "t_i,t_e,rms,converged\n";
    std::shared_ptr<const DynamicsModel> model = MakeModel(config.system);
    for (const auto& [t_i, t_e] : SegmentsFor(config, options)) {
      const Trajectory segment = data.front().SegmentByTime(t_i, t_e);
      const LearnOutcome outcome = LearnFromSegments(
          config, {segment},
          {!options.no_candidates, options.finite_horizon, 0.0});
      ForwardSettings settings;
      settings.seed = config.seed;
      const Prediction p = PredictAndRms(
          model, outcome.result.cost,
          outcome.candidates.Subset(outcome.result.identified), segment,
          settings);
      csv << FormatDouble(t_i) << "," << FormatDouble(t_e) << ","
          << FormatDouble(p.rms) << "," << (p.solution.converged ? 1 : 0)
          << "\n";
    }
    WriteTextFile(OutPath(config, "eval.csv"), csv.str());
    out << "wrote " << OutPath(config, "eval.csv") << "\n";
  }
  if (options.noise) {
    RequireSingle(data, "the noise study");
    std::ostringstream csv;
    WriteNoiseCsv(csv, RunNoiseStudy(config, data.front()));
    WriteTextFile(OutPath(config, "noise.csv"), csv.str());
    out << "wrote " << OutPath(config, "noise.csv") << "\n";
  }
  return kExitOk;
}

}  // namespace

int RunCommand(const CommandOptions& options, std::ostream& out,
               std::ostream& err) {
  try {
    ExperimentConfig config = LoadConfig(options.config_path);
    if (options.threshold) config.learner.threshold = *options.threshold;
    if (options.out_dir) config.output_dir = *options.out_dir;
    if (options.seed) {
      config.seed = *options.seed;
      config.generation.settings.seed = *options.seed;
    }
    if (options.segment) {
      config.segments = {*options.segment};
      ValidateConfig(config);
    }
    if (options.command == "generate") return Generate(config, out);
    if (options.command == "learn") return Learn(config, options, out);
    if (options.command == "sweep") return Sweep(config, options, out, false);
    if (options.command == "baseline") return Sweep(config, options, out, true);
    if (options.command == "eval") return Eval(config, options, out);
    err << "unknown command '" << options.command << "'\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"shortest-path inverse optimal control experiments"};
  app.require_subcommand(1, 1);
  CommandOptions options;
  std::vector<double> segment;
  double threshold = 0.0;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--segment", segment, "segment bounds t_i,t_e in seconds")
        ->delimiter(',')
        ->expected(2);
    sub->add_flag("--no-candidates", options.no_candidates,
                  "learn without candidate constraints");
    sub->add_flag("--finite-horizon", options.finite_horizon,
                  "drop the endpoint multiplier (baseline learner)");
    sub->add_option("--threshold", threshold, "identification threshold");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--data", options.data_paths,
                    "measured trajectory CSV (repeatable)");
    sub->add_option("--threads", options.threads, "sweep worker threads")
        ->check(CLI::PositiveNumber);
  };
  for (const char* name : {"generate", "learn", "sweep", "eval", "baseline"}) {
    add_common(app.add_subcommand(name, std::string(name) + " command"));
  }
  app.get_subcommand("eval")->add_flag("--noise", options.noise,
                                       "also run the input-noise study");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  options.command = sub->get_name();
  if (sub->count("--segment") > 0) options.segment = {segment[0], segment[1]};
  if (sub->count("--threshold") > 0) options.threshold = threshold;
  if (sub->count("--out") > 0) options.out_dir = out_dir;
  if (sub->count("--seed") > 0) options.seed = seed;
  return RunCommand(options, std::cout, std::cerr);
}

}  // namespace spioc::cli
