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

#include "spioc/learner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "spioc/linalg.h"
#include "spioc/nnls.h"

namespace spioc {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// column groups of theta = (cost weights, lambda, nu)
struct ColumnLayout {
  std::vector<int> q_cols, r_cols, abs_cols;  // positions within free_params
  int q_dim = 0, r_dim = 0;
  bool trace = false;
};

ColumnLayout Layout(const ParametricCost& cost,
                    const std::vector<int>& free_params) {
  ColumnLayout layout;
  layout.trace = cost.normalization() == Normalization::kTrace;
  for (int k = 0; k < static_cast<int>(free_params.size()); ++k) {
    const int p = free_params[k];
    switch (cost.features()[p].kind) {
      case FeatureKind::kStateProduct: layout.q_cols.push_back(k); break;
      case FeatureKind::kInputProduct: layout.r_cols.push_back(k); break;
      case FeatureKind::kInputAbs: layout.abs_cols.push_back(k); break;
      case FeatureKind::kFrozenInputForm: break;
    }
  }
  if (const ParamBlock* b = cost.FindBlock(BlockKind::kStateWeight)) {
    layout.q_dim = b->dim;
  }
  if (const ParamBlock* b = cost.FindBlock(BlockKind::kInputWeight)) {
    layout.r_dim = b->dim;
  }
  return layout;
}

MatrixXd SelectRows(const MatrixXd& M, const std::vector<int>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = M.row(rows[k]);
  }
  return out;
}

VectorXd SelectRows(const VectorXd& v, const std::vector<int>& rows) {
  VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out(static_cast<Eigen::Index>(k)) = v(rows[k]);
  }
  return out;
}

MatrixXd SelectCols(const MatrixXd& M, const std::vector<int>& cols) {
  MatrixXd out(M.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = M.col(cols[k]);
  }
  return out;
}

// orthonormal basis of range(A) with columns normalized first
MatrixXd RangeBasis(const MatrixXd& A) {
  if (A.cols() == 0) return MatrixXd(A.rows(), 0);
  MatrixXd scaled = A;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double norm = A.col(j).norm();
    if (norm > 0.0) scaled.col(j) /= norm;
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
  cod.setThreshold(1e-12);
  cod.compute(scaled);
  return cod.householderQ() * MatrixXd::Identity(A.rows(), cod.rank());
}

VectorXd MinNormSolve(const MatrixXd& A, const VectorXd& b) {
  if (A.cols() == 0) return VectorXd(0);
  VectorXd scale(A.cols());
  MatrixXd scaled = A;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double norm = A.col(j).norm();
    scale(j) = norm > 0.0 ? 1.0 / norm : 1.0;
    scaled.col(j) *= scale(j);
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
  cod.setThreshold(1e-12);
  cod.compute(scaled);
  return cod.solve(b).cwiseProduct(scale);
}

int NumericalRank(const MatrixXd& A) {
  if (A.cols() == 0 || A.rows() == 0) return 0;
  MatrixXd scaled = A;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double norm = A.col(j).norm();
    if (norm > 0.0) scaled.col(j) /= norm;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr;
  qr.setThreshold(1e-12);
  qr.compute(scaled);
  return static_cast<int>(qr.rank());
}

// symmetric matrix <-> scaled upper-triangle vector (off-diagonals times
// sqrt 2), an isometry for the Frobenius norm
MatrixXd SvecToMatrix(const VectorXd& v, const std::vector<Feature>& feats,
                      int dim) {
  MatrixXd mat = MatrixXd::Zero(dim, dim);
  for (int k = 0; k < v.size(); ++k) {
    const Feature& f = feats[k];
    const double value = f.a == f.b ? v(k) : v(k) / kSqrt2;
    mat(f.a, f.b) = value;
    mat(f.b, f.a) = value;
  }
  return mat;
}

VectorXd MatrixToSvec(const MatrixXd& mat, const std::vector<Feature>& feats) {
  VectorXd v(static_cast<Eigen::Index>(feats.size()));
  for (std::size_t k = 0; k < feats.size(); ++k) {
    const Feature& f = feats[k];
    v(static_cast<Eigen::Index>(k)) =
        f.a == f.b ? mat(f.a, f.a) : kSqrt2 * mat(f.a, f.b);
  }
  return v;
}

struct Solution {
  VectorXd theta;  // full column space of the stationarity system
  int iterations = 0;
  bool converged = true;
  std::string solver;
};

// exact relaxation: Q and R treated as free symmetric blocks, r and lambda
// nonnegative, trace rule eliminated by substitution, nu projected out.
// Among minimizers the matrix weights take the smallest Frobenius norm.
Solution SolveActiveSet(const StationaritySystem& sys, const MatrixXd& M,
                        const VectorXd& c, const ColumnLayout& layout,
                        const ParametricCost& cost, double target) {
  const int cols = static_cast<int>(M.cols());
  std::vector<int> free_cols, nonneg_cols, nu_cols;
  VectorXd offset = c;
  MatrixXd Mw = M;

  int pivot = -1;
  std::vector<int> diag_r;
  if (layout.trace) {
    for (int k : layout.r_cols) {
      const Feature& f = cost.features()[sys.free_params[k]];
      if (f.a == f.b) diag_r.push_back(k);
    }
    pivot = diag_r.front();
    offset += target * M.col(pivot);
    for (int k : diag_r) {
      if (k != pivot) Mw.col(k) -= M.col(pivot);
    }
  }
  for (int k : layout.q_cols) free_cols.push_back(k);
  for (int k : layout.r_cols) {
    if (k != pivot) free_cols.push_back(k);
  }
  for (int k : layout.abs_cols) nonneg_cols.push_back(k);
  for (int k = sys.lambda_offset(); k < sys.nu_offset(); ++k) {
    nonneg_cols.push_back(k);
  }
  for (int k = sys.nu_offset(); k < cols; ++k) nu_cols.push_back(k);

  const MatrixXd basis = RangeBasis(SelectCols(M, nu_cols));
  MatrixXd F = SelectCols(Mw, free_cols);
  MatrixXd N = SelectCols(Mw, nonneg_cols);
  F -= basis * (basis.transpose() * F);
  N -= basis * (basis.transpose() * N);
  VectorXd b = -offset;
  b -= basis * (basis.transpose() * b);
  // svec coordinates: off-diagonal weights scaled by sqrt 2
  VectorXd to_param = VectorXd::Ones(static_cast<Eigen::Index>(free_cols.size()));
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const Feature& f = cost.features()[sys.free_params[free_cols[k]]];
    if (f.a != f.b) to_param(static_cast<Eigen::Index>(k)) = 1.0 / kSqrt2;
  }
  F = F * to_param.asDiagonal();

  const MixedNnlsResult mixed = SolveMixedNnls(F, N, b);
  VectorXd free = mixed.free;
  if (F.cols() > 0) {
    // drop the component in the null space of F
    Eigen::JacobiSVD<MatrixXd> svd(F, Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    const double cutoff = 1e-9 * (sv.size() > 0 ? sv(0) : 0.0);
    for (Eigen::Index k = 0; k < F.cols(); ++k) {
      if (k >= sv.size() || sv(k) <= cutoff) {
        const VectorXd z = svd.matrixV().col(k);
        free -= z * z.dot(free);
      }
    }
  }
  free = free.cwiseProduct(to_param);

  Solution sol;
  sol.solver = "active-set";
  sol.theta = VectorXd::Zero(cols);
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    sol.theta(free_cols[k]) = free(static_cast<Eigen::Index>(k));
  }
  for (std::size_t k = 0; k < nonneg_cols.size(); ++k) {
    sol.theta(nonneg_cols[k]) = mixed.nonneg(static_cast<Eigen::Index>(k));
  }
  if (pivot >= 0) {
    double rest = 0.0;
    for (int k : diag_r) {
      if (k != pivot) rest += sol.theta(k);
    }
    sol.theta(pivot) = target - rest;
  }
  if (!nu_cols.empty()) {
    const VectorXd partial = M * sol.theta + c;
    const VectorXd nu = MinNormSolve(SelectCols(M, nu_cols), -partial);
    for (std::size_t k = 0; k < nu_cols.size(); ++k) {
      sol.theta(nu_cols[k]) = nu(static_cast<Eigen::Index>(k));
    }
  }
  sol.iterations = mixed.iterations;
  sol.converged = mixed.converged;
  return sol;
}

// accelerated projected gradient over (Q, R, r, lambda) with nu eliminated
Solution SolveProjectedGradient(const StationaritySystem& sys,
                                const MatrixXd& M, const VectorXd& c,
                                const ColumnLayout& layout,
                                const ParametricCost& cost,
                                const LearnOptions& options) {
  const int cols = static_cast<int>(M.cols());
  std::vector<int> var_cols;
  for (int k : layout.q_cols) var_cols.push_back(k);
  for (int k : layout.r_cols) var_cols.push_back(k);
  for (int k : layout.abs_cols) var_cols.push_back(k);
  for (int k = sys.lambda_offset(); k < sys.nu_offset(); ++k) {
    var_cols.push_back(k);
  }
  std::vector<int> nu_cols;
  for (int k = sys.nu_offset(); k < cols; ++k) nu_cols.push_back(k);

  const int nq = static_cast<int>(layout.q_cols.size());
  const int nr = static_cast<int>(layout.r_cols.size());
  const int nvar = static_cast<int>(var_cols.size());
  std::vector<Feature> q_feats, r_feats;
  for (int k : layout.q_cols) q_feats.push_back(cost.features()[sys.free_params[k]]);
  for (int k : layout.r_cols) r_feats.push_back(cost.features()[sys.free_params[k]]);

  // svec coordinates for the matrix blocks
  MatrixXd G = SelectCols(M, var_cols);
  for (int k = 0; k < nq; ++k) {
    if (q_feats[k].a != q_feats[k].b) G.col(k) /= kSqrt2;
  }
  for (int k = 0; k < nr; ++k) {
    if (r_feats[k].a != r_feats[k].b) G.col(nq + k) /= kSqrt2;
  }
  // project out the unconstrained endpoint multipliers
  const MatrixXd basis = RangeBasis(SelectCols(M, nu_cols));
  MatrixXd Gp = G - basis * (basis.transpose() * G);
  VectorXd cp = c - basis * (basis.transpose() * c);

  const MatrixXd H = Gp.transpose() * Gp;
  const VectorXd h = Gp.transpose() * cp;

  // diagonal scaling, one scalar per matrix block
  VectorXd d = VectorXd::Ones(nvar);
  auto block_scale = [&](int begin, int count) {
    double mean = 0.0;
    for (int k = begin; k < begin + count; ++k) mean += H(k, k);
    mean /= std::max(count, 1);
    const double s = mean > 0.0 ? 1.0 / std::sqrt(mean) : 1.0;
    for (int k = begin; k < begin + count; ++k) d(k) = s;
  };
  if (nq > 0) block_scale(0, nq);
  if (nr > 0) block_scale(nq, nr);
  for (int k = nq + nr; k < nvar; ++k) {
    d(k) = H(k, k) > 0.0 ? 1.0 / std::sqrt(H(k, k)) : 1.0;
  }
  const MatrixXd Hz = d.asDiagonal() * H * d.asDiagonal();
  const VectorXd hz = d.cwiseProduct(h);
  double lipschitz = 1.0;
  if (nvar > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Hz, Eigen::EigenvaluesOnly);
    lipschitz = std::max(2.0 * eig.eigenvalues().maxCoeff(), 1e-300);
  }

  const double target = options.normalization_target;
  auto project = [&](const VectorXd& z) {
    VectorXd out = z;
    if (nq > 0) {
      const MatrixXd q = SvecToMatrix(z.head(nq), q_feats, layout.q_dim);
      out.head(nq) = MatrixToSvec(ProjectPsd(q), q_feats);
    }
    if (nr > 0) {
      const MatrixXd r = SvecToMatrix(z.segment(nq, nr), r_feats, layout.r_dim);
      const MatrixXd proj = layout.trace
                                ? ProjectSpectraplex(r, target / d(nq))
                                : ProjectPsd(r);
      out.segment(nq, nr) = MatrixToSvec(proj, r_feats);
    }
    for (int k = nq + nr; k < nvar; ++k) out(k) = std::max(out(k), 0.0);
    return out;
  };

  Solution sol;
  sol.solver = "projected-gradient";
  VectorXd z = project(VectorXd::Zero(nvar));
  VectorXd y = z;
  double t = 1.0;
  const double tol = options.tolerance * (1.0 + hz.cwiseAbs().maxCoeff());
  sol.converged = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const VectorXd grad = 2.0 * (Hz * y + hz);
    const VectorXd z_next = project(y - grad / lipschitz);
    const double mapping = nvar > 0
        ? (lipschitz * (y - z_next)).cwiseAbs().maxCoeff() : 0.0;
    if (mapping <= tol) {
      z = z_next;
      sol.converged = true;
      break;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    VectorXd y_next = z_next + ((t - 1.0) / t_next) * (z_next - z);
    // gradient-based adaptive restart
    if ((y - z_next).dot(z_next - z) > 0.0) {
      y_next = z_next;
      t = 1.0;
    } else {
      t = t_next;
    }
    z = z_next;
    y = y_next;
  }
  sol.iterations = it;

  VectorXd theta_var = d.cwiseProduct(z);
  for (int k = 0; k < nq; ++k) {
    if (q_feats[k].a != q_feats[k].b) theta_var(k) /= kSqrt2;
  }
  for (int k = 0; k < nr; ++k) {
    if (r_feats[k].a != r_feats[k].b) theta_var(nq + k) /= kSqrt2;
  }
  sol.theta = VectorXd::Zero(cols);
  for (int k = 0; k < nvar; ++k) sol.theta(var_cols[k]) = theta_var(k);
  if (!nu_cols.empty()) {
    const VectorXd partial = M * sol.theta + c;
    const VectorXd nu = MinNormSolve(SelectCols(M, nu_cols), -partial);
    for (std::size_t k = 0; k < nu_cols.size(); ++k) {
      sol.theta(nu_cols[k]) = nu(static_cast<Eigen::Index>(k));
    }
  }
  return sol;
}

}  // namespace

void LearnProblem::Validate() const {
  if (!model) Fail(ErrorCode::kInvalidArgument, "learner: no dynamics model");
  if (segments.empty()) Fail(ErrorCode::kInvalidArgument, "learner: no segments");
  if (!(options.threshold >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "learner: threshold must be >= 0");
  }
  const int n = model->state_dim();
  const int m = model->input_dim();
  CheckDimension(cost.state_dim() == n && cost.input_dim() == m,
                 "learner: cost dimensions do not match the model");
  for (const Trajectory& seg : segments) {
    seg.Validate();
    CheckDimension(seg.state_dim() == n, "learner: segment state dimension");
    if (seg.horizon() < 2) {
      Fail(ErrorCode::kUnderdetermined,
           "learner: segment needs at least 2 steps");
    }
    CheckDimension(seg.input_dim() == m, "learner: segment input dimension");
  }
  for (const CandidateRow& row : candidates.rows) {
    CheckDimension(row.normal.size() == static_cast<int>(row.signals.size()),
                   "learner: candidate normal/signal size mismatch");
    for (const SignalSpec& s : row.signals) ValidateSignal(s, n, m);
  }
}

int StationaritySystem::num_used_rows() const {
  return static_cast<int>(std::count(row_used.begin(), row_used.end(), true));
}

StationaritySystem AssembleStationarity(const LearnProblem& problem) {
  problem.Validate();
  const DynamicsModel& model = *problem.model;
  const ParametricCost& cost = problem.cost;
  const LearnOptions& opt = problem.options;
  const int n = model.state_dim();
  const int m = model.input_dim();
  const int P = cost.num_params();
  const int J = problem.candidates.size();
  const int S = static_cast<int>(problem.segments.size());

  StationaritySystem sys;
  if (!opt.cost_known) sys.free_params = cost.FreeParams();
  sys.nu_per_segment = opt.finite_horizon ? 0 : n;

  // fixed weights: frozen features scaled by the normalization target, or
  // everything when the cost is known
  VectorXd fixed_weight = VectorXd::Zero(P);
  for (int p = 0; p < P; ++p) {
    if (opt.cost_known) {
      fixed_weight(p) = cost.params()(p);
    } else if (cost.IsFrozen(p)) {
      fixed_weight(p) = opt.normalization_target * cost.params()(p);
    }
  }

  std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> activity;
  int rows = 0;
  for (int s = 0; s < S; ++s) {
    const Trajectory& seg = problem.segments[s];
    sys.segment_row_offset.push_back(rows);
    rows += seg.horizon() * m;
    activity.push_back(EvaluateActivity(problem.candidates, seg).active);
    for (int i = 0; i < seg.horizon(); ++i) {
      for (int j = 0; j < J; ++j) {
        if (activity[s](i, j)) sys.active.push_back({s, i, j});
      }
    }
  }
  const int cols = sys.num_cost_columns() + sys.num_lambda_columns() +
                   S * sys.nu_per_segment;
  sys.M = MatrixXd::Zero(rows, cols);
  sys.c = VectorXd::Zero(rows);
  sys.row_used.assign(rows, true);

  const bool mask_zero_inputs = cost.has_abs_features();
  int pair = 0;
  for (int s = 0; s < S; ++s) {
    const Trajectory& seg = problem.segments[s];
    const int e = seg.horizon();
    const int row0 = sys.segment_row_offset[s];
    const RolloutSensitivities sens =
        ComputeRolloutSensitivities(model, seg.states[0], seg.StackedInputs());
    const Trajectory& rolled = sens.trajectory();
    for (int i = 0; i <= e; ++i) {
      sys.rollout_mismatch = std::max(
          sys.rollout_mismatch,
          (rolled.states[i] - seg.states[i]).cwiseAbs().maxCoeff());
    }

    // cost columns through the adjoint recursion, one per feature
    std::vector<CostGradients> grads;
    grads.reserve(e);
    for (int i = 0; i < e; ++i) {
      grads.push_back(cost.Gradients(rolled.states[i], rolled.inputs[i]));
    }
    std::vector<VectorXd> state_w(e + 1, VectorXd::Zero(n));
    std::vector<VectorXd> input_w(e, VectorXd::Zero(m));
    int free_col = 0;
    for (int p = 0; p < P; ++p) {
      const bool is_free =
          free_col < sys.num_cost_columns() && sys.free_params[free_col] == p;
      if (!is_free && fixed_weight(p) == 0.0) continue;
      for (int i = 0; i < e; ++i) {
        state_w[i] = grads[i].feature_dx.col(p);
        input_w[i] = grads[i].feature_du.col(p);
      }
      const VectorXd column = AdjointGradient(sens.step_jacobians(), state_w,
                                              input_w);
      if (is_free) {
        sys.M.block(row0, free_col, e * m, 1) = column;
        ++free_col;
      } else {
        sys.c.segment(row0, e * m) += fixed_weight(p) * column;
      }
    }

    // candidate columns for active (step, row) pairs
    for (; pair < sys.num_lambda_columns() && sys.active[pair].segment == s;
         ++pair) {
      const ActivePair& ap = sys.active[pair];
      const CandidateRow& row = problem.candidates.rows[ap.candidate];
      const int col = sys.lambda_offset() + pair;
      for (std::size_t k = 0; k < row.signals.size(); ++k) {
        const SignalSpec& sig = row.signals[k];
        const double coef = row.normal(static_cast<int>(k));
        switch (sig.kind) {
          case SignalKind::kState:
            for (int j = 0; j < ap.step; ++j) {
              sys.M.block(row0 + j * m, col, m, 1) +=
                  coef * sens.Block(ap.step, j).row(sig.index).transpose();
            }
            break;
          case SignalKind::kInput:
            sys.M(row0 + ap.step * m + sig.index, col) += coef;
            break;
          case SignalKind::kInputRate:
            sys.M(row0 + (ap.step + 1) * m + sig.index, col) +=
                coef / seg.sampling_period;
            sys.M(row0 + ap.step * m + sig.index, col) -=
                coef / seg.sampling_period;
            break;
        }
      }
    }

    // endpoint multiplier columns: (dF_e/du_j)^T
    if (sys.nu_per_segment > 0) {
      const int col0 = sys.nu_offset() + s * n;
      for (int j = 0; j < e; ++j) {
        sys.M.block(row0 + j * m, col0, m, n) = sens.Block(e, j).transpose();
      }
    }

    if (mask_zero_inputs) {
      for (int i = 0; i < e; ++i) {
        for (int a = 0; a < m; ++a) {
          if (std::abs(seg.inputs[i](a)) <= opt.zero_input_tolerance) {
            sys.row_used[row0 + i * m + a] = false;
          }
        }
      }
    }
  }
  return sys;
}

LearnResult SolveRelaxed(const LearnProblem& problem) {
  const StationaritySystem sys = AssembleStationarity(problem);
  const ParametricCost& cost = problem.cost;
  const LearnOptions& opt = problem.options;
  const ColumnLayout layout = Layout(cost, sys.free_params);

  std::vector<int> used;
  for (int r = 0; r < static_cast<int>(sys.row_used.size()); ++r) {
    if (sys.row_used[r]) used.push_back(r);
  }
  const MatrixXd M = SelectRows(sys.M, used);
  const VectorXd c = SelectRows(sys.c, used);

  Solution sol;
  bool accepted = false;
  if (!opt.force_projected_gradient) {
    sol = SolveActiveSet(sys, M, c, layout, cost, opt.normalization_target);
    // the relaxation is exact when its Q/R blocks already are PSD
    accepted = true;
    VectorXd params = VectorXd::Zero(cost.num_params());
    for (int k = 0; k < sys.num_cost_columns(); ++k) {
      params(sys.free_params[k]) = sol.theta(k);
    }
    for (const ParamBlock& block : cost.blocks()) {
      if (block.kind != BlockKind::kStateWeight &&
          block.kind != BlockKind::kInputWeight) {
        continue;
      }
      if (opt.cost_known) continue;
      const MatrixXd mat = cost.BlockMatrix(params, block);
      if (MinEigenvalue(mat) < -1e-10 * std::max(1.0, mat.norm())) {
        accepted = false;
      }
    }
  }
  if (!accepted) {
    sol = SolveProjectedGradient(sys, M, c, layout, cost, opt);
  }

  LearnResult result;
  result.finite_horizon = opt.finite_horizon;
  VectorXd params = cost.params();
  if (!opt.cost_known) {
    for (int p = 0; p < cost.num_params(); ++p) {
      if (cost.IsFrozen(p)) params(p) *= opt.normalization_target;
    }
    for (int k = 0; k < sys.num_cost_columns(); ++k) {
      params(sys.free_params[k]) = sol.theta(k);
    }
  }
  result.cost = cost.WithParams(params);

  const int J = problem.candidates.size();
  const int S = static_cast<int>(problem.segments.size());
  for (int s = 0; s < S; ++s) {
    result.lambda.push_back(MatrixXd::Zero(problem.segments[s].horizon(), J));
  }
  for (int k = 0; k < sys.num_lambda_columns(); ++k) {
    const ActivePair& ap = sys.active[k];
    result.lambda[ap.segment](ap.step, ap.candidate) =
        sol.theta(sys.lambda_offset() + k);
  }
  result.multiplier_sums = VectorXd::Zero(J);
  for (const MatrixXd& lam : result.lambda) {
    result.multiplier_sums += lam.colwise().sum().transpose();
  }
  if (sys.nu_per_segment > 0) {
    for (int s = 0; s < S; ++s) {
      result.nu.push_back(
          sol.theta.segment(sys.nu_offset() + s * sys.nu_per_segment,
                            sys.nu_per_segment));
    }
  }
  result.identified = IdentifyConstraints(result, opt.threshold);
  result.residual = (M * sol.theta + c).squaredNorm();
  result.offset_norm = c.norm();

  LearnDiagnostics& diag = result.diagnostics;
  diag.solver = sol.solver;
  diag.iterations = sol.iterations;
  diag.converged = sol.converged;
  diag.rows = static_cast<int>(sys.M.rows());
  diag.used_rows = static_cast<int>(used.size());
  diag.columns = static_cast<int>(sys.M.cols());
  diag.active_pairs = sys.num_lambda_columns();
  diag.rank = NumericalRank(M);
  diag.rollout_mismatch = sys.rollout_mismatch;
  diag.min_eigenvalue = StructuralViolation(result.cost, result.cost.params());
  return result;
}

LearnResult LearnFiniteHorizonBaseline(LearnProblem problem) {
  problem.options.finite_horizon = true;
  return SolveRelaxed(problem);
}

std::vector<int> IdentifyConstraints(const LearnResult& result,
                                     double threshold) {
  std::vector<int> identified;
  for (int j = 0; j < result.multiplier_sums.size(); ++j) {
    if (result.multiplier_sums(j) >= threshold) identified.push_back(j);
  }
  return identified;
}

double KnownCostStationarityResidual(
    std::shared_ptr<const DynamicsModel> model, const ParametricCost& cost,
    const CandidateSet& constraints, const Trajectory& segment) {
  LearnProblem problem;
  problem.model = std::move(model);
  problem.cost = cost;
  problem.candidates = constraints;
  problem.segments = {segment};
  problem.options.cost_known = true;
  return SolveRelaxed(problem).residual;
}

double RelativeStateWeightError(const ParametricCost& learned,
                                const MatrixXd& reference) {
  return (learned.StateWeight() - reference).norm() / reference.norm();
}

}  // namespace spioc
