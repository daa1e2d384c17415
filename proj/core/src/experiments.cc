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

#include "spioc/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace spioc {
namespace {

constexpr int kMaxStartDraws = 10000;

// largest value of the enforced rows that only involve states at x
double StateRowMargin(const CandidateSet& constraints, const VectorXd& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const CandidateRow& row : constraints.rows) {
    bool states_only = true;
    VectorXd z(row.signals.size());
    for (std::size_t k = 0; k < row.signals.size(); ++k) {
      states_only &= row.signals[k].kind == SignalKind::kState;
      if (states_only) z(static_cast<int>(k)) = x(row.signals[k].index);
    }
    if (!states_only) continue;
    worst = std::max(worst, row.normal.dot(z) - row.offset);
  }
  return worst;
}

ForwardSolution SolveFrom(const ExperimentConfig& config,
                          std::shared_ptr<const DynamicsModel> model,
                          const VectorXd& x0) {
  ForwardProblem problem;
  problem.model = std::move(model);
  problem.cost = MakeGroundTruthCost(config);
  problem.constraints = config.constraints;
  problem.x0 = x0;
  problem.horizon = config.generation.horizon;
  problem.settings = config.generation.settings;
  ForwardSolution solution =
      config.generation.terminal == TerminalKind::kOrigin
          ? SolveLongHorizon(problem)
          : SolveFreeTerminal(problem);
  if (!solution.converged) {
    Fail(ErrorCode::kNonConvergence,
         "data generation: forward solve did not converge (stationarity " +
             std::to_string(solution.kkt.stationarity) + ", endpoint " +
             std::to_string(solution.kkt.endpoint_violation) + ")");
  }
  return solution;
}

// runs `task(k)` for k = 0..count-1 on up to `threads` workers; the first
// exception is rethrown after all workers finish
template <typename Task>
void ParallelFor(int count, int threads, Task task) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          task(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::string> LabelsOf(const CandidateSet& set,
                                  const std::vector<int>& indices) {
  std::vector<std::string> labels;
  for (int j : indices) labels.push_back(set.rows[j].label);
  return labels;
}

}  // namespace

GeneratedData GenerateData(const ExperimentConfig& config) {
  const GenerationConfig& g = config.generation;
  std::shared_ptr<const DynamicsModel> model = MakeModel(config.system);
  const int m = model->input_dim();
  const int keep = g.keep_steps > 0 ? g.keep_steps : g.horizon;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  GeneratedData data;
  for (int k = 0; k < g.trajectories; ++k) {
    VectorXd x0 = g.x0;
    if (g.preroll_steps > 0) {
      // hold a random constant input for the pre-roll; redraw starts that
      // come too close to an enforced state bound
      int draws = 0;
      while (true) {
        if (++draws > kMaxStartDraws) {
          Fail(ErrorCode::kConfig,
               "generation: no admissible start found; reduce start_margin "
               "or preroll_std");
        }
        VectorXd u(m);
        for (int a = 0; a < m; ++a) u(a) = g.preroll_std * normal(rng);
        VectorXd x = g.x0;
        for (int s = 0; s < g.preroll_steps; ++s) x = model->Step(x, u);
        if (StateRowMargin(config.constraints, x) <= -g.start_margin) {
          x0 = x;
          break;
        }
      }
    }
    ForwardSolution solution = SolveFrom(config, model, x0);
    data.trajectories.push_back(solution.trajectory.Segment(0, keep));
    data.solutions.push_back(std::move(solution));
  }
  return data;
}

Trajectory AddInputNoise(const Trajectory& traj, double fraction,
                         std::mt19937_64& rng, bool resimulate,
                         const DynamicsModel* model) {
  Trajectory noisy = traj;
  const int m = traj.input_dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int a = 0; a < m; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const VectorXd& u : traj.inputs) {
      lo = std::min(lo, u(a));
      hi = std::max(hi, u(a));
    }
    const double std_dev = fraction * (hi - lo);
    for (VectorXd& u : noisy.inputs) u(a) += std_dev * normal(rng);
  }
  if (resimulate) {
    if (model == nullptr) {
      Fail(ErrorCode::kInvalidArgument, "input noise: re-simulation needs a model");
    }
    noisy.states = Rollout(*model, traj.states[0], noisy.StackedInputs()).states;
  }
  noisy.simulated = false;
  return noisy;
}

Trajectory AddTailPerturbation(const DynamicsModel& model,
                               const Trajectory& traj, int start,
                               double slope) {
  Trajectory perturbed = traj;
  for (int i = std::max(start, 0); i < traj.horizon(); ++i) {
    const double offset = slope * (i - start + 1) * traj.sampling_period;
    perturbed.inputs[i].array() += offset;
  }
  perturbed.states =
      Rollout(model, traj.states[0], perturbed.StackedInputs()).states;
  perturbed.simulated = false;
  return perturbed;
}

CandidateSet BuildCandidates(const CandidateConfig& spec,
                             const std::vector<Trajectory>& segments) {
  CandidateSet set;
  if (!spec.boxes.empty()) set.Append(BuildBoxCandidates(segments, spec.boxes));
  for (const auto& [first, second] : spec.hulls) {
    set.Append(BuildHullCandidates2d(segments, first, second));
  }
  set.rows.insert(set.rows.end(), spec.rows.begin(), spec.rows.end());
  set.activity_tolerance = spec.activity_tolerance;
  return set;
}

CostErrors CompareToGroundTruth(const ExperimentConfig& config,
                                const ParametricCost& learned) {
  CostErrors errors;
  errors.state = RelativeStateWeightError(learned, config.cost.Q);
  switch (config.cost.family) {
    case CostFamily::kPendulum:
      errors.input = std::abs(learned.AbsWeights()(0) - config.cost.r);
      break;
    case CostFamily::kTracking:
      errors.input = (learned.InputWeight() - config.cost.R).norm() /
                     config.cost.R.norm();
      break;
    case CostFamily::kQuadratic:
      errors.input = 0.0;
      break;
  }
  return errors;
}

LearnOutcome LearnFromSegments(const ExperimentConfig& config,
                               const std::vector<Trajectory>& segments,
                               const LearnRequest& request) {
  LearnProblem problem;
  problem.model = MakeModel(config.system);
  problem.cost = MakeLearningCost(config);
  problem.segments = segments;
  problem.options = config.learner;
  LearnOutcome outcome;
  if (request.use_candidates) {
    outcome.candidates = BuildCandidates(config.candidates, segments);
    if (request.activity_tolerance > 0.0) {
      outcome.candidates.activity_tolerance = request.activity_tolerance;
    }
  }
  problem.candidates = outcome.candidates;
  outcome.result = request.finite_horizon
                       ? LearnFiniteHorizonBaseline(problem)
                       : SolveRelaxed(problem);
  outcome.errors = CompareToGroundTruth(config, outcome.result.cost);
  return outcome;
}

std::vector<std::pair<double, double>> SweepSegments(
    const ExperimentConfig& config) {
  const SweepConfig& sweep = config.sweep;
  if (sweep.values.empty()) return config.segments;
  std::vector<std::pair<double, double>> segments;
  for (double v : sweep.values) {
    if (sweep.mode == SweepMode::kEndTime) {
      segments.emplace_back(sweep.t_begin, v);
    } else {
      segments.emplace_back(v, v + sweep.window);
    }
  }
  return segments;
}

SweepReport RunSweep(const ExperimentConfig& config, const Trajectory& data,
                     const std::vector<std::pair<double, double>>& segments,
                     const SweepOptions& options) {
  SweepReport report;
  report.rows.resize(segments.size());
  ParallelFor(static_cast<int>(segments.size()), options.threads, [&](int k) {
    SweepRow& row = report.rows[k];
    row.t_i = segments[k].first;
    row.t_e = segments[k].second;
    const std::vector<Trajectory> segment = {
        data.SegmentByTime(row.t_i, row.t_e)};
    row.learned = LearnFromSegments(config, segment,
                                    {options.use_candidates, false, 0.0});
    if (options.include_baseline) {
      row.has_baseline = true;
      row.baseline = LearnFromSegments(config, segment,
                                       {options.use_candidates, true, 0.0});
    }
    if (options.include_unconstrained) {
      row.has_unconstrained = true;
      row.unconstrained = LearnFromSegments(config, segment, {false, false, 0.0});
    }
  });
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     return std::make_pair(a.t_i, a.t_e) <
                            std::make_pair(b.t_i, b.t_e);
                   });
  return report;
}

LeaveOneOutReport RunLeaveOneOut(const ExperimentConfig& config,
                                 const std::vector<Trajectory>& data,
                                 int steps, bool include_unconstrained) {
  if (data.size() < 2) {
    Fail(ErrorCode::kInvalidArgument, "leave-one-out needs two trajectories");
  }
  std::vector<Trajectory> segments;
  for (const Trajectory& traj : data) {
    segments.push_back(steps > 0 ? traj.Segment(0, std::min(steps, traj.horizon()))
                                 : traj);
  }
  std::shared_ptr<const DynamicsModel> model = MakeModel(config.system);
  ForwardSettings settings;
  settings.seed = config.seed;
  LeaveOneOutReport report;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    std::vector<Trajectory> training;
    for (std::size_t j = 0; j < segments.size(); ++j) {
      if (j != k) training.push_back(segments[j]);
    }
    LeaveOneOutRow row;
    row.held_out = static_cast<int>(k);
    const LearnOutcome constrained = LearnFromSegments(config, training);
    row.errors = constrained.errors;
    row.identified = IdentifiedLabels(constrained);
    const Prediction with = PredictAndRms(
        model, constrained.result.cost,
        constrained.candidates.Subset(constrained.result.identified),
        segments[k], settings);
    row.rms_constrained = with.rms;
    row.converged = with.solution.converged;
    report.mean_constrained += with.rms;
    if (include_unconstrained) {
      const LearnOutcome free = LearnFromSegments(config, training, {false});
      const Prediction without = PredictAndRms(model, free.result.cost,
                                               CandidateSet{}, segments[k],
                                               settings);
      row.rms_unconstrained = without.rms;
      row.converged = row.converged && without.solution.converged;
      report.mean_unconstrained += without.rms;
    } else {
      row.rms_unconstrained = std::numeric_limits<double>::quiet_NaN();
      report.mean_unconstrained = std::numeric_limits<double>::quiet_NaN();
    }
    report.rows.push_back(std::move(row));
  }
  report.mean_constrained /= static_cast<double>(segments.size());
  report.mean_unconstrained /= static_cast<double>(segments.size());
  return report;
}

std::vector<HorizonRow> RunHorizonStudy(const ExperimentConfig& config,
                                        const std::vector<Trajectory>& data) {
  std::shared_ptr<const DynamicsModel> model = MakeModel(config.system);
  std::vector<Trajectory> perturbed;
  for (const Trajectory& traj : data) {
    perturbed.push_back(AddTailPerturbation(*model, traj,
                                            config.eval.tail_start,
                                            config.eval.tail_perturbation));
  }
  std::vector<HorizonRow> rows;
  for (int steps : config.eval.horizons) {
    const LeaveOneOutReport loo =
        RunLeaveOneOut(config, perturbed, steps, false);
    int converged = 0;
    for (const LeaveOneOutRow& row : loo.rows) converged += row.converged;
    rows.push_back({steps, loo.mean_constrained, converged});
  }
  return rows;
}

std::vector<NoiseRow> RunNoiseStudy(const ExperimentConfig& config,
                                    const Trajectory& data) {
  std::vector<NoiseRow> rows;
  for (int seed = 0; seed < config.noise.seeds; ++seed) {
    for (std::size_t s = 0; s < config.segments.size(); ++s) {
      const auto [t_i, t_e] = config.segments[s];
      std::seed_seq seq{static_cast<std::uint64_t>(config.seed),
                        static_cast<std::uint64_t>(seed),
                        static_cast<std::uint64_t>(s)};
      std::mt19937_64 rng(seq);
      const Trajectory noisy = AddInputNoise(data.SegmentByTime(t_i, t_e),
                                             config.noise.input_std_fraction,
                                             rng);
      const LearnOutcome outcome = LearnFromSegments(
          config, {noisy},
          {true, false, config.candidates.noisy_activity_tolerance});
      rows.push_back({seed, t_i, t_e, outcome.errors,
                      IdentifiedLabels(outcome)});
    }
  }
  return rows;
}

std::vector<std::string> IdentifiedLabels(const LearnOutcome& outcome) {
  return LabelsOf(outcome.candidates, outcome.result.identified);
}

}  // namespace spioc
