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

#include "spioc/candidates.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spioc {

std::string SignalLabel(const SignalSpec& spec) {
  const std::string index = std::to_string(spec.index + 1);
  switch (spec.kind) {
    case SignalKind::kState: return "x" + index;
    case SignalKind::kInput: return "u" + index;
    case SignalKind::kInputRate: return "du" + index;
  }
  return "?";
}

bool CandidateRow::IsInputBox() const {
  return signals.size() == 1 && signals[0].kind == SignalKind::kInput &&
         normal.size() == 1 && std::abs(normal(0)) > 0.0;
}

void CandidateSet::Append(const CandidateSet& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  degenerate_hull_fallback |= other.degenerate_hull_fallback;
}

CandidateSet CandidateSet::Subset(const std::vector<int>& indices) const {
  CandidateSet out;
  out.activity_tolerance = activity_tolerance;
  for (int j : indices) {
    if (j < 0 || j >= size()) {
      Fail(ErrorCode::kInvalidArgument, "candidate subset: index out of range");
    }
    out.rows.push_back(rows[j]);
  }
  return out;
}

void ValidateSignal(const SignalSpec& spec, int state_dim, int input_dim) {
  const int bound = spec.kind == SignalKind::kState ? state_dim : input_dim;
  if (spec.index < 0 || spec.index >= bound) {
    Fail(ErrorCode::kInvalidArgument,
         "signal " + SignalLabel(spec) + " out of range");
  }
}

double SignalValue(const SignalSpec& spec, const Trajectory& traj, int i) {
  switch (spec.kind) {
    case SignalKind::kState:
      return traj.states[i](spec.index);
    case SignalKind::kInput:
      return traj.inputs[i](spec.index);
    case SignalKind::kInputRate:
      return (traj.inputs[i + 1](spec.index) - traj.inputs[i](spec.index)) /
             traj.sampling_period;
  }
  return 0.0;
}

bool RowDefinedAt(const CandidateRow& row, const Trajectory& traj, int i) {
  if (i < 0 || i >= traj.horizon()) return false;
  for (const SignalSpec& s : row.signals) {
    if (s.kind == SignalKind::kInputRate && i > traj.horizon() - 2) return false;
  }
  return true;
}

VectorXd RowSignals(const CandidateRow& row, const Trajectory& traj, int i) {
  VectorXd z(row.signals.size());
  for (std::size_t k = 0; k < row.signals.size(); ++k) {
    z(static_cast<int>(k)) = SignalValue(row.signals[k], traj, i);
  }
  return z;
}

double RowValue(const CandidateRow& row, const Trajectory& traj, int i) {
  return row.normal.dot(RowSignals(row, traj, i)) - row.offset;
}

namespace {

int SignalSteps(const SignalSpec& spec, const Trajectory& traj) {
  return spec.kind == SignalKind::kInputRate ? traj.horizon() - 1
                                             : traj.horizon();
}

}  // namespace

CandidateSet BuildBoxCandidates(const Trajectory& traj,
                                const std::vector<SignalSpec>& specs) {
  return BuildBoxCandidates(std::vector<Trajectory>{traj}, specs);
}

CandidateSet BuildBoxCandidates(const std::vector<Trajectory>& trajs,
                                const std::vector<SignalSpec>& specs) {
  if (trajs.empty()) {
    Fail(ErrorCode::kInvalidArgument, "box candidates: no trajectories");
  }
  CandidateSet set;
  for (const SignalSpec& spec : specs) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Trajectory& traj : trajs) {
      if (traj.horizon() < 1) {
        Fail(ErrorCode::kInvalidArgument, "box candidates: empty trajectory");
      }
      ValidateSignal(spec, traj.state_dim(), traj.input_dim());
      const int steps = SignalSteps(spec, traj);
      if (steps < 1) {
        Fail(ErrorCode::kInvalidArgument,
             "box candidates: segment too short for " + SignalLabel(spec));
      }
      for (int i = 0; i < steps; ++i) {
        const double z = SignalValue(spec, traj, i);
        lo = std::min(lo, z);
        hi = std::max(hi, z);
      }
    }
    const std::string name = SignalLabel(spec);
    set.rows.push_back({{spec}, VectorXd::Constant(1, 1.0), hi, name + " <= max"});
    set.rows.push_back({{spec}, VectorXd::Constant(1, -1.0), -lo, "-" + name + " <= -min"});
  }
  return set;
}

std::vector<Eigen::Vector2d> ConvexHull2d(std::vector<Eigen::Vector2d> points) {
  std::sort(points.begin(), points.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * points.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i > 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i - 1]) <= 0.0) {
      --k;
    }
    hull[k++] = points[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

CandidateSet BuildHullCandidates2d(const Trajectory& traj,
                                   const SignalSpec& first,
                                   const SignalSpec& second) {
  return BuildHullCandidates2d(std::vector<Trajectory>{traj}, first, second);
}

CandidateSet BuildHullCandidates2d(const std::vector<Trajectory>& trajs,
                                   const SignalSpec& first,
                                   const SignalSpec& second) {
  std::vector<Eigen::Vector2d> points;
  for (const Trajectory& traj : trajs) {
    ValidateSignal(first, traj.state_dim(), traj.input_dim());
    ValidateSignal(second, traj.state_dim(), traj.input_dim());
    const int steps =
        std::min(SignalSteps(first, traj), SignalSteps(second, traj));
    for (int i = 0; i < steps; ++i) {
      points.emplace_back(SignalValue(first, traj, i),
                          SignalValue(second, traj, i));
    }
  }
  if (points.empty()) {
    Fail(ErrorCode::kInvalidArgument, "hull candidates: no points");
  }
  const std::vector<Eigen::Vector2d> hull = ConvexHull2d(points);
  if (hull.size() < 3) {
    CandidateSet fallback = BuildBoxCandidates(trajs, {first, second});
    fallback.degenerate_hull_fallback = true;
    return fallback;
  }
  CandidateSet set;
  const std::string pair = SignalLabel(first) + "," + SignalLabel(second);
  for (std::size_t k = 0; k < hull.size(); ++k) {
    const Eigen::Vector2d& a = hull[k];
    const Eigen::Vector2d& b = hull[(k + 1) % hull.size()];
    const Eigen::Vector2d edge = b - a;
    // counterclockwise order: the outward normal points right of the edge
    const Eigen::Vector2d normal = Eigen::Vector2d(edge.y(), -edge.x()).normalized();
    // tightest offset over both edge endpoints
    const double offset = std::max(normal.dot(a), normal.dot(b));
    set.rows.push_back({{first, second}, normal, offset,
                        "hull(" + pair + ")#" + std::to_string(k)});
  }
  return set;
}

ActivityReport EvaluateActivity(const CandidateSet& set,
                                const Trajectory& traj) {
  const int e = traj.horizon();
  const int J = set.size();
  ActivityReport report;
  report.active.setConstant(e, J, false);
  report.values.setConstant(e, J, std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < J; ++j) {
    const CandidateRow& row = set.rows[j];
    const double tol = set.activity_tolerance * (1.0 + std::abs(row.offset));
    for (int i = 0; i < e; ++i) {
      if (!RowDefinedAt(row, traj, i)) continue;
      const double value = RowValue(row, traj, i);
      report.values(i, j) = value;
      report.active(i, j) = std::abs(value) <= tol;
    }
  }
  return report;
}

double MaxRelativeViolation(const CandidateSet& set, const Trajectory& traj) {
  double worst = 0.0;
  for (const CandidateRow& row : set.rows) {
    for (int i = 0; i < traj.horizon(); ++i) {
      if (!RowDefinedAt(row, traj, i)) continue;
      worst = std::max(worst,
                       RowValue(row, traj, i) / (1.0 + std::abs(row.offset)));
    }
  }
  return worst;
}

}  // namespace spioc
