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

#ifndef SPIOC_CANDIDATES_H_
#define SPIOC_CANDIDATES_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "spioc/common.h"
#include "spioc/rollout.h"

namespace spioc {

enum class SignalKind {
  kState,      // x_i[index]
  kInput,      // u_i[index]
  kInputRate,  // (u_{i+1}[index] - u_i[index]) / T_s, defined for i <= e-2
};

struct SignalSpec {
  SignalKind kind = SignalKind::kInput;
  int index = 0;

  bool operator==(const SignalSpec&) const = default;
};

std::string SignalLabel(const SignalSpec& spec);

// one linear inequality normal . z <= offset over its own signal vector z
struct CandidateRow {
  std::vector<SignalSpec> signals;
  VectorXd normal;
  double offset = 0.0;
  std::string label;

  // single input coordinate with a +-1 normal (handled as a box by the
  // forward solver)
  bool IsInputBox() const;
};

// time-invariant candidate constraint set C(x_i, u_i, u_{i+1}) <= 0
struct CandidateSet {
  std::vector<CandidateRow> rows;
  double activity_tolerance = 1e-6;  // 1e-3 recommended for noisy data
  bool degenerate_hull_fallback = false;

  int size() const { return static_cast<int>(rows.size()); }
  bool empty() const { return rows.empty(); }
  void Append(const CandidateSet& other);
  // rows with the given indices, same tolerance
  CandidateSet Subset(const std::vector<int>& indices) const;
};

// true when every signal of `row` can be evaluated at step i
bool RowDefinedAt(const CandidateRow& row, const Trajectory& traj, int i);
double SignalValue(const SignalSpec& spec, const Trajectory& traj, int i);
VectorXd RowSignals(const CandidateRow& row, const Trajectory& traj, int i);
// normal . z_i - offset
double RowValue(const CandidateRow& row, const Trajectory& traj, int i);
void ValidateSignal(const SignalSpec& spec, int state_dim, int input_dim);

// two rows per spec: z <= max_i z_i and -z <= -min_i z_i
CandidateSet BuildBoxCandidates(const Trajectory& traj,
                                const std::vector<SignalSpec>& specs);
// same rows with bounds taken over all trajectories
CandidateSet BuildBoxCandidates(const std::vector<Trajectory>& trajs,
                                const std::vector<SignalSpec>& specs);

// half-space description of the convex hull of (z1_i, z2_i) with unit
// normals, built from counterclockwise hull vertices; falls back to box rows
// (and sets degenerate_hull_fallback) when the points are collinear
CandidateSet BuildHullCandidates2d(const Trajectory& traj,
                                   const SignalSpec& first,
                                   const SignalSpec& second);
// hull of the points of all trajectories
CandidateSet BuildHullCandidates2d(const std::vector<Trajectory>& trajs,
                                   const SignalSpec& first,
                                   const SignalSpec& second);

// counterclockwise convex hull (Andrew's monotone chain) without collinear
// points
std::vector<Eigen::Vector2d> ConvexHull2d(std::vector<Eigen::Vector2d> points);

struct ActivityReport {
  // e x J; false where the row is undefined
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active;
  MatrixXd values;  // e x J row values (NaN where undefined)
};

// active(i, j) <=> |P_j z_i - p_j| <= tol * (1 + |p_j|)
ActivityReport EvaluateActivity(const CandidateSet& set,
                                const Trajectory& traj);

// largest violation max(0, P_j z_i - p_j) / (1 + |p_j|)
double MaxRelativeViolation(const CandidateSet& set, const Trajectory& traj);

}  // namespace spioc

#endif  // SPIOC_CANDIDATES_H_
