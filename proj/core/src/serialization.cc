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

#include "spioc/serialization.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <utility>

#include "json_util.h"
#include "spioc/trajectory_io.h"

namespace spioc {
namespace {

using internal::FromMatrix;
using internal::FromVector;
using internal::Json;

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

std::string CsvCell(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string Join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k > 0) out += sep;
    out += items[k];
  }
  return out;
}

// named scalar views of the learned weights: upper triangles of Q and a
// learned R, then the |u| weights
std::vector<std::pair<std::string, double>> WeightColumns(
    const ParametricCost& cost) {
  std::vector<std::pair<std::string, double>> columns;
  auto add_matrix = [&](const std::string& name, const MatrixXd& w) {
    for (Eigen::Index a = 0; a < w.rows(); ++a) {
      for (Eigen::Index b = a; b < w.cols(); ++b) {
        columns.emplace_back(
            name + std::to_string(a + 1) + std::to_string(b + 1), w(a, b));
      }
    }
  };
  add_matrix("Q", cost.StateWeight());
  const ParamBlock* input = cost.FindBlock(BlockKind::kInputWeight);
  if (input != nullptr) add_matrix("R", cost.InputWeight());
  if (cost.has_abs_features()) {
    const VectorXd r = cost.AbsWeights();
    for (Eigen::Index a = 0; a < r.size(); ++a) {
      columns.emplace_back(r.size() == 1 ? "r" : "r" + std::to_string(a + 1),
                           r(a));
    }
  }
  return columns;
}

// candidate labels in order of first appearance over the rows
std::vector<std::string> LambdaLabels(const SweepReport& report) {
  std::vector<std::string> labels;
  for (const SweepRow& row : report.rows) {
    for (const CandidateRow& c : row.learned.candidates.rows) {
      if (std::find(labels.begin(), labels.end(), c.label) == labels.end()) {
        labels.push_back(c.label);
      }
    }
  }
  return labels;
}

std::string LambdaCell(const LearnOutcome& outcome, const std::string& label) {
  const std::vector<CandidateRow>& rows = outcome.candidates.rows;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].label == label) {
      return FormatDouble(
          outcome.result.multiplier_sums(static_cast<Eigen::Index>(j)));
    }
  }
  return "";
}

Json DiagnosticsJson(const LearnDiagnostics& d) {
  return Json{{"solver", d.solver},
              {"iterations", d.iterations},
              {"converged", d.converged},
              {"rows", d.rows},
              {"used_rows", d.used_rows},
              {"columns", d.columns},
              {"active_pairs", d.active_pairs},
              {"rank", d.rank},
              {"rollout_mismatch", d.rollout_mismatch},
              {"min_eigenvalue", d.min_eigenvalue}};
}

}  // namespace

std::string CandidateSetToJson(const CandidateSet& set) {
  return Dump(internal::FromCandidateSet(set));
}

CandidateSet CandidateSetFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("candidate json: ") + e.what());
  }
  return internal::ToCandidateSet(j, "candidates");
}

std::string LearnOutcomeToJson(const LearnOutcome& outcome) {
  const LearnResult& r = outcome.result;
  Json weights = Json::object();
  for (const auto& [name, value] : WeightColumns(r.cost)) weights[name] = value;
  Json candidates = Json::array();
  for (std::size_t j = 0; j < outcome.candidates.rows.size(); ++j) {
    Json row = internal::FromRow(outcome.candidates.rows[j]);
    row["Lambda"] = r.multiplier_sums(static_cast<Eigen::Index>(j));
    candidates.push_back(row);
  }
  Json identified = Json::array();
  for (int j : r.identified) identified.push_back(outcome.candidates.rows[j].label);
  Json lambda = Json::array();
  for (std::size_t s = 0; s < r.lambda.size(); ++s) {
    for (Eigen::Index i = 0; i < r.lambda[s].rows(); ++i) {
      for (Eigen::Index j = 0; j < r.lambda[s].cols(); ++j) {
        if (r.lambda[s](i, j) != 0.0) {
          lambda.push_back(Json::array({s, i, j, r.lambda[s](i, j)}));
        }
      }
    }
  }
  Json nu = Json::array();
  for (const VectorXd& v : r.nu) nu.push_back(FromVector(v));
  Json doc{{"finite_horizon", r.finite_horizon},
           {"weights", weights},
           {"Q", FromMatrix(r.cost.StateWeight())},
           {"R", FromMatrix(r.cost.InputWeight())},
           {"r", FromVector(r.cost.AbsWeights())},
           {"params", FromVector(r.cost.params())},
           {"candidates", candidates},
           {"identified", identified},
           {"lambda", lambda},
           {"nu", nu},
           {"residual", r.residual},
           {"offset_norm", r.offset_norm},
           {"errors",
            {{"state", outcome.errors.state}, {"input", outcome.errors.input}}},
           {"diagnostics", DiagnosticsJson(r.diagnostics)}};
  return Dump(doc);
}

std::string ForwardSidecarToJson(const ForwardSolution& solution,
                                 const ForwardSettings& settings) {
  const char* method = settings.inner_method == InnerMethod::kProjectedNewton
                           ? "newton"
                           : "proximal_gradient";
  const char* abs = settings.abs_mode == AbsMode::kProximal ? "proximal"
                                                            : "smooth";
  Json doc{
      {"objective", solution.objective},
      {"converged", solution.converged},
      {"horizon", solution.trajectory.horizon()},
      {"kkt",
       {{"stationarity", solution.kkt.stationarity},
        {"endpoint_violation", solution.kkt.endpoint_violation},
        {"inequality_violation", solution.kkt.inequality_violation}}},
      {"outer_iterations", solution.outer_iterations},
      {"inner_iterations", solution.inner_iterations},
      {"restarts", solution.restarts},
      {"penalty", solution.penalty},
      {"merit_history", solution.merit_history},
      {"endpoint_multiplier", FromVector(solution.endpoint_multiplier)},
      {"settings",
       {{"method", method},
        {"abs_mode", abs},
        {"max_outer_iterations", settings.max_outer_iterations},
        {"max_inner_iterations", settings.max_inner_iterations},
        {"inner_tolerance", settings.inner_tolerance},
        {"feasibility_tolerance", settings.feasibility_tolerance},
        {"initial_penalty", settings.initial_penalty},
        {"penalty_growth", settings.penalty_growth},
        {"max_penalty", settings.max_penalty},
        {"smoothing", settings.smoothing},
        {"max_restarts", settings.max_restarts},
        {"restart_scale", settings.restart_scale},
        {"continuation_horizon", settings.continuation_horizon},
        {"seed", settings.seed}}}};
  return Dump(doc);
}

void WriteSweepCsv(std::ostream& out, const SweepReport& report) {
  const std::vector<std::string> labels = LambdaLabels(report);
  std::vector<std::string> weight_names;
  if (!report.rows.empty()) {
    for (const auto& [name, value] :
         WeightColumns(report.rows.front().learned.result.cost)) {
      weight_names.push_back(name);
    }
  }
  const bool baseline = !report.rows.empty() && report.rows.front().has_baseline;
  const bool free = !report.rows.empty() && report.rows.front().has_unconstrained;
  std::vector<std::string> header = {"t_i", "t_e"};
  for (const std::string& w : weight_names) header.push_back(w);
  for (const std::string& l : labels) header.push_back(CsvCell("Lambda[" + l + "]"));
  header.insert(header.end(), {"residual", "error_Q", "error_input", "identified"});
  if (baseline) {
    for (const std::string& w : weight_names) header.push_back("baseline_" + w);
    header.insert(header.end(), {"baseline_error_Q", "baseline_error_input"});
  }
  if (free) {
    for (const std::string& w : weight_names) header.push_back("nocand_" + w);
    header.insert(header.end(), {"nocand_error_Q", "nocand_error_input"});
  }
  out << Join(header, ",") << "\n";
  for (const SweepRow& row : report.rows) {
    std::vector<std::string> cells = {FormatDouble(row.t_i),
                                      FormatDouble(row.t_e)};
    for (const auto& [name, value] : WeightColumns(row.learned.result.cost)) {
      cells.push_back(FormatDouble(value));
    }
    for (const std::string& l : labels) cells.push_back(LambdaCell(row.learned, l));
    cells.push_back(FormatDouble(row.learned.result.residual));
    cells.push_back(FormatDouble(row.learned.errors.state));
    cells.push_back(FormatDouble(row.learned.errors.input));
    cells.push_back(CsvCell(Join(IdentifiedLabels(row.learned), ";")));
    auto add = [&](const LearnOutcome& o) {
      for (const auto& [name, value] : WeightColumns(o.result.cost)) {
        cells.push_back(FormatDouble(value));
      }
      cells.push_back(FormatDouble(o.errors.state));
      cells.push_back(FormatDouble(o.errors.input));
    };
    if (baseline) add(row.baseline);
    if (free) add(row.unconstrained);
    out << Join(cells, ",") << "\n";
  }
}

void WriteBaselineCsv(std::ostream& out, const SweepReport& report) {
  out << "t_i,t_e,error_Q,baseline_error_Q,error_input,baseline_error_input,"
         "ratio_Q\n";
  for (const SweepRow& row : report.rows) {
    if (!row.has_baseline) {
      Fail(ErrorCode::kInvalidArgument, "baseline csv: sweep has no baseline");
    }
    const double ratio = row.baseline.errors.state /
                         std::max(row.learned.errors.state, 1e-300);
    out << FormatDouble(row.t_i) << "," << FormatDouble(row.t_e) << ","
        << FormatDouble(row.learned.errors.state) << ","
        << FormatDouble(row.baseline.errors.state) << ","
        << FormatDouble(row.learned.errors.input) << ","
        << FormatDouble(row.baseline.errors.input) << "," << FormatDouble(ratio)
        << "\n";
  }
}

void WriteLeaveOneOutCsv(std::ostream& out, const LeaveOneOutReport& report) {
  out << "held_out,error_Q,error_R,rms_constrained,rms_unconstrained,"
         "converged,identified\n";
  for (const LeaveOneOutRow& row : report.rows) {
    out << row.held_out << "," << FormatDouble(row.errors.state) << ","
        << FormatDouble(row.errors.input) << ","
        << FormatDouble(row.rms_constrained) << ","
        << FormatDouble(row.rms_unconstrained) << ","
        << (row.converged ? 1 : 0) << ","
        << CsvCell(Join(row.identified, ";")) << "\n";
  }
  out << "mean,,," << FormatDouble(report.mean_constrained) << ","
      << FormatDouble(report.mean_unconstrained) << ",,\n";
}

void WriteHorizonCsv(std::ostream& out, const std::vector<HorizonRow>& rows) {
  out << "e,rms,converged\n";
  for (const HorizonRow& row : rows) {
    out << row.steps << "," << FormatDouble(row.mean_rms) << ","
        << row.converged << "\n";
  }
}

void WriteNoiseCsv(std::ostream& out, const std::vector<NoiseRow>& rows) {
  out << "seed,t_i,t_e,error_Q,error_input,identified\n";
  for (const NoiseRow& row : rows) {
    out << row.seed << "," << FormatDouble(row.t_i) << ","
        << FormatDouble(row.t_e) << "," << FormatDouble(row.errors.state)
        << "," << FormatDouble(row.errors.input) << ","
        << CsvCell(Join(row.identified, ";")) << "\n";
  }
}

void WriteTextFile(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path(), ec);
    if (ec) Fail(ErrorCode::kIo, "cannot create directory for " + path);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "write to " + path + " failed");
}

}  // namespace spioc
