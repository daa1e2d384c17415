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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace spioc {
namespace {

using testing::RandomVector;

// trajectory whose input sequence is `u` (scalar) and whose states are the
// points `x` (2-D); only the signals matter here
Trajectory Signals(const std::vector<double>& u,
                   const std::vector<Eigen::Vector2d>& x = {}) {
  Trajectory traj;
  traj.sampling_period = 0.1;
  const std::size_t steps = std::max(u.size(), x.empty() ? 0 : x.size() - 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    traj.states.push_back(i < x.size() ? VectorXd(x[i]) : VectorXd::Zero(2));
  }
  for (std::size_t i = 0; i < steps; ++i) {
    traj.inputs.push_back(VectorXd::Constant(1, i < u.size() ? u[i] : 0.0));
  }
  return traj;
}

Trajectory Points(const std::vector<Eigen::Vector2d>& points) {
  std::vector<Eigen::Vector2d> x = points;
  x.push_back(points.back());  // states have one more sample than inputs
  return Signals(std::vector<double>(points.size(), 0.0), x);
}

const SignalSpec kInput0{SignalKind::kInput, 0};
const SignalSpec kState0{SignalKind::kState, 0};
const SignalSpec kState1{SignalKind::kState, 1};

TEST(BoxCandidates, BoundsFromData) {
  const CandidateSet set =
      BuildBoxCandidates(Signals({-1.0, 0.3, 5.0, 5.0, 2.0}), {kInput0});
  ASSERT_EQ(set.size(), 2);
  EXPECT_EQ(set.rows[0].normal(0), 1.0);
  EXPECT_EQ(set.rows[0].offset, 5.0);
  EXPECT_EQ(set.rows[1].normal(0), -1.0);
  EXPECT_EQ(set.rows[1].offset, 1.0);
  EXPECT_TRUE(set.rows[0].IsInputBox());
}

TEST(BoxCandidates, ConstantSignalIsActiveEverywhere) {
  const Trajectory traj = Signals({2.5, 2.5, 2.5});
  const CandidateSet set = BuildBoxCandidates(traj, {kInput0});
  EXPECT_EQ(set.rows[0].offset, 2.5);
  EXPECT_EQ(set.rows[1].offset, -2.5);
  const ActivityReport report = EvaluateActivity(set, traj);
  EXPECT_TRUE(report.active.all());
}

TEST(BoxCandidates, ActiveAtArgMaxAndArgMin) {
  const Trajectory traj = Signals({-1.0, 0.3, 5.0, 5.0, 2.0});
  const CandidateSet set = BuildBoxCandidates(traj, {kInput0});
  const ActivityReport report = EvaluateActivity(set, traj);
  ASSERT_EQ(report.active.rows(), 5);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(report.active(i, 0), i == 2 || i == 3) << i;
    EXPECT_EQ(report.active(i, 1), i == 0) << i;
  }
  EXPECT_DOUBLE_EQ(report.values(1, 0), 0.3 - 5.0);
}

TEST(BoxCandidates, EmptyTrajectoryThrows) {
  Trajectory traj;
  traj.states.push_back(VectorXd::Zero(2));
  EXPECT_THROW(BuildBoxCandidates(traj, {kInput0}), Error);
}

TEST(BoxCandidates, InputRateSignal) {
  // rates (u_{i+1} - u_i) / 0.1 for i <= e - 2: 10, -20, 5
  const Trajectory traj = Signals({0.0, 1.0, -1.0, -0.5});
  const SignalSpec rate{SignalKind::kInputRate, 0};
  const CandidateSet set = BuildBoxCandidates(traj, {rate});
  EXPECT_NEAR(set.rows[0].offset, 10.0, 1e-12);
  EXPECT_NEAR(set.rows[1].offset, 20.0, 1e-12);
  EXPECT_FALSE(RowDefinedAt(set.rows[0], traj, 3));
  EXPECT_TRUE(RowDefinedAt(set.rows[0], traj, 2));
}

TEST(BoxCandidates, UnionOverTrajectories) {
  const CandidateSet set = BuildBoxCandidates(
      std::vector<Trajectory>{Signals({0.0, 1.0}), Signals({-3.0, 0.5})},
      {kInput0});
  EXPECT_EQ(set.rows[0].offset, 1.0);
  EXPECT_EQ(set.rows[1].offset, 3.0);
}

TEST(BoxCandidates, ValidateSignalRejectsBadIndex) {
  EXPECT_THROW(ValidateSignal({SignalKind::kState, 2}, 2, 1), Error);
  EXPECT_THROW(ValidateSignal({SignalKind::kInput, -1}, 2, 1), Error);
  EXPECT_NO_THROW(ValidateSignal({SignalKind::kInputRate, 0}, 2, 1));
}

TEST(HullCandidates, UnitSquare) {
  const Trajectory traj =
      Points({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.5, 0.5}});
  const CandidateSet set = BuildHullCandidates2d(traj, kState0, kState1);
  ASSERT_EQ(set.size(), 4);
  EXPECT_FALSE(set.degenerate_hull_fallback);
  int matched = 0;
  const std::vector<std::pair<Eigen::Vector2d, double>> expected = {
      {{1, 0}, 1.0}, {{-1, 0}, 0.0}, {{0, 1}, 1.0}, {{0, -1}, 0.0}};
  for (const auto& [normal, offset] : expected) {
    for (const CandidateRow& row : set.rows) {
      if ((row.normal - normal).norm() < 1e-12 &&
          std::abs(row.offset - offset) < 1e-12) {
        ++matched;
      }
    }
  }
  EXPECT_EQ(matched, 4);
}

TEST(HullCandidates, CollinearFallsBackToBox) {
  const Trajectory traj = Points({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}});
  const CandidateSet set = BuildHullCandidates2d(traj, kState0, kState1);
  EXPECT_TRUE(set.degenerate_hull_fallback);
  EXPECT_EQ(set.size(), 4);
  EXPECT_LE(MaxRelativeViolation(set, traj), 1e-12);
}

TEST(HullCandidates, RandomPointsContainedAndMinimal) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::Vector2d> points;
    for (int k = 0; k < 100; ++k) points.push_back(RandomVector(rng, 2, 1.0));
    const Trajectory traj = Points(points);
    const CandidateSet set = BuildHullCandidates2d(traj, kState0, kState1);
    ASSERT_GE(set.size(), 3);
    // containment of every building point, brute force
    for (const Eigen::Vector2d& p : points) {
      for (const CandidateRow& row : set.rows) {
        EXPECT_LE(row.normal.dot(p) - row.offset, 1e-9 * (1.0 + std::abs(row.offset)));
      }
    }
    const std::vector<Eigen::Vector2d> hull = ConvexHull2d(points);
    // each hull vertex lies on at least two half-spaces
    for (const Eigen::Vector2d& v : hull) {
      int on = 0;
      for (const CandidateRow& row : set.rows) {
        on += std::abs(row.normal.dot(v) - row.offset) <= 1e-12;
      }
      EXPECT_GE(on, 2);
    }
    // counterclockwise order
    for (std::size_t k = 0; k < hull.size(); ++k) {
      const Eigen::Vector2d a = hull[(k + 1) % hull.size()] - hull[k];
      const Eigen::Vector2d b = hull[(k + 2) % hull.size()] - hull[k];
      EXPECT_GT(a.x() * b.y() - a.y() * b.x(), 0.0);
    }
    // unit normals
    for (const CandidateRow& row : set.rows) {
      EXPECT_NEAR(row.normal.norm(), 1.0, 1e-14);
    }
    // minimality: dropping any half-space admits a bounding-box corner or an
    // exterior probe just beyond that face
    const Eigen::Vector2d lo(-1.0, -1.0), hi(1.0, 1.0);
    for (int drop = 0; drop < set.size(); ++drop) {
      std::vector<Eigen::Vector2d> probes = {
          lo, hi, {lo.x(), hi.y()}, {hi.x(), lo.y()}};
      // midpoint of the dropped face pushed outward slightly
      const CandidateRow& face = set.rows[drop];
      for (std::size_t k = 0; k < hull.size(); ++k) {
        const Eigen::Vector2d mid = 0.5 * (hull[k] + hull[(k + 1) % hull.size()]);
        if (std::abs(face.normal.dot(mid) - face.offset) < 1e-12) {
          probes.push_back(mid + 1e-6 * face.normal);
        }
      }
      bool admitted = false;
      for (const Eigen::Vector2d& probe : probes) {
        bool inside_others = true;
        for (int j = 0; j < set.size(); ++j) {
          if (j == drop) continue;
          if (set.rows[j].normal.dot(probe) > set.rows[j].offset) {
            inside_others = false;
          }
        }
        const bool outside_hull = face.normal.dot(probe) > face.offset;
        admitted = admitted || (inside_others && outside_hull);
      }
      EXPECT_TRUE(admitted) << "face " << drop << " is redundant";
    }
  }
}

TEST(HullCandidates, OneDimensionalBoxEqualsHullOfSameSignal) {
  // a 2-D hull over (z, z) reduces to the same interval as a box on z
  const std::vector<double> u = {0.4, -1.2, 3.0, 0.0};
  const Trajectory traj = Signals(u);
  const CandidateSet box = BuildBoxCandidates(traj, {kInput0});
  const CandidateSet hull = BuildHullCandidates2d(traj, kInput0, kInput0);
  EXPECT_TRUE(hull.degenerate_hull_fallback);
  ASSERT_GE(hull.size(), 2);
  EXPECT_EQ(hull.rows[0].offset, box.rows[0].offset);
  EXPECT_EQ(hull.rows[1].offset, box.rows[1].offset);
}

TEST(HullCandidates, UnionOverTrajectories) {
  const CandidateSet set = BuildHullCandidates2d(
      std::vector<Trajectory>{Points({{0, 0}, {1, 0}, {0, 1}}),
                              Points({{1, 1}, {0.5, 0.5}})},
      kState0, kState1);
  EXPECT_EQ(set.size(), 4);
}

TEST(Activity, InteriorPointIsInactive) {
  const Trajectory hull_data =
      Points({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
  const CandidateSet set = BuildHullCandidates2d(hull_data, kState0, kState1);
  const Trajectory inside = Points({{0.5, 0.5}, {0.2, 0.7}});
  const ActivityReport report = EvaluateActivity(set, inside);
  EXPECT_FALSE(report.active.any());
}

TEST(Activity, UsesRelativeTolerance) {
  CandidateSet set;
  set.rows.push_back({{kInput0}, VectorXd::Constant(1, 1.0), 1000.0, "u <= 1000"});
  set.activity_tolerance = 1e-6;
  // tolerance 1e-6 * (1 + 1000) ~ 1.001e-3
  const Trajectory traj = Signals({1000.0 - 1e-3, 1000.0 - 2e-3});
  const ActivityReport report = EvaluateActivity(set, traj);
  EXPECT_TRUE(report.active(0, 0));
  EXPECT_FALSE(report.active(1, 0));
}

TEST(CandidateSet, SubsetAndAppend) {
  CandidateSet set =
      BuildBoxCandidates(Signals({-1.0, 2.0}), {kInput0});
  set.activity_tolerance = 1e-3;
  const CandidateSet sub = set.Subset({1});
  ASSERT_EQ(sub.size(), 1);
  EXPECT_EQ(sub.rows[0].label, set.rows[1].label);
  EXPECT_EQ(sub.activity_tolerance, 1e-3);
  CandidateSet joined = sub;
  joined.Append(set);
  EXPECT_EQ(joined.size(), 3);
  EXPECT_THROW(set.Subset({5}), Error);
}

TEST(SignalLabel, IsHumanReadable) {
  EXPECT_EQ(SignalLabel({SignalKind::kState, 0}), "x1");
  EXPECT_EQ(SignalLabel({SignalKind::kInput, 2}), "u3");
}

}  // namespace
}  // namespace spioc
