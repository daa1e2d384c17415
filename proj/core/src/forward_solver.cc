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

#include "spioc/forward_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include <Eigen/Cholesky>

namespace spioc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// augmented Lagrangian of the shooting problem, split into a smooth part and
// the separable |u| and input-box part
class AugmentedLagrangian {
 public:
  explicit AugmentedLagrangian(const ForwardProblem& problem)
      : problem_(problem),
        model_(*problem.model),
        cost_(problem.cost),
        m_(model_.input_dim()),
        e_(problem.horizon),
        abs_weights_(cost_.AbsWeights()),
        lower_(VectorXd::Constant(m_, -kInf)),
        upper_(VectorXd::Constant(m_, kInf)) {
    const CandidateSet& rows = problem.constraints;
    for (int j = 0; j < rows.size(); ++j) {
      const CandidateRow& row = rows.rows[j];
      if (row.IsInputBox()) {
        const int a = row.signals[0].index;
        const double bound = row.offset / row.normal(0);
        if (row.normal(0) > 0.0) {
          upper_(a) = std::min(upper_(a), bound);
        } else {
          lower_(a) = std::max(lower_(a), bound);
        }
        box_rows_.push_back(j);
      } else {
        penalty_rows_.push_back(j);
      }
    }
    for (int a = 0; a < m_; ++a) {
      if (lower_(a) > upper_(a)) {
        Fail(ErrorCode::kInvalidArgument,
             "forward solver: empty input box for u" + std::to_string(a + 1));
      }
    }
    if (problem.endpoint) nu = VectorXd::Zero(model_.state_dim());
    mu = MatrixXd::Zero(e_, rows.size());
  }

  const ForwardProblem& problem() const { return problem_; }
  bool has_penalty_terms() const {
    return problem_.endpoint.has_value() || !penalty_rows_.empty();
  }
  const std::vector<int>& box_rows() const { return box_rows_; }
  const std::vector<int>& penalty_rows() const { return penalty_rows_; }
  double lower(int a) const { return lower_(a); }
  double upper(int a) const { return upper_(a); }
  double abs_weight(int a) const {
    return problem_.settings.abs_mode == AbsMode::kProximal ? abs_weights_(a)
                                                            : 0.0;
  }

  Trajectory Roll(const VectorXd& U) const {
    return Rollout(model_, problem_.x0, U);
  }

  VectorXd EndpointResidual(const Trajectory& traj) const {
    return traj.states[e_] - *problem_.endpoint;
  }

  // g_j(z_i) for the penalized rows; NaN where a row is undefined
  MatrixXd RowValues(const Trajectory& traj) const {
    MatrixXd g = MatrixXd::Constant(e_, problem_.constraints.size(),
                                    std::numeric_limits<double>::quiet_NaN());
    for (int j : penalty_rows_) {
      const CandidateRow& row = problem_.constraints.rows[j];
      for (int i = 0; i < e_; ++i) {
        if (RowDefinedAt(row, traj, i)) g(i, j) = RowValue(row, traj, i);
      }
    }
    return g;
  }

  double Smooth(const Trajectory& traj) const {
    const bool smooth_abs = problem_.settings.abs_mode == AbsMode::kSmooth;
    const double eps = problem_.settings.smoothing;
    double value = 0.0;
    for (int i = 0; i < e_; ++i) {
      const VectorXd& u = traj.inputs[i];
      value += cost_.Value(traj.states[i], u);
      for (int a = 0; a < m_; ++a) {
        const double r = abs_weights_(a);
        if (r == 0.0) continue;
        value -= r * std::abs(u(a));
        if (smooth_abs) value += r * std::sqrt(u(a) * u(a) + eps);
      }
    }
    if (problem_.endpoint) {
      const VectorXd h = EndpointResidual(traj);
      value += nu.dot(h) + 0.5 * rho * h.squaredNorm();
    }
    if (!penalty_rows_.empty()) {
      const MatrixXd g = RowValues(traj);
      for (int j : penalty_rows_) {
        for (int i = 0; i < e_; ++i) {
          if (std::isnan(g(i, j))) continue;
          const double shifted = std::max(0.0, mu(i, j) + rho * g(i, j));
          value += (shifted * shifted - mu(i, j) * mu(i, j)) / (2.0 * rho);
        }
      }
    }
    return value;
  }

  double Nonsmooth(const VectorXd& U) const {
    double value = 0.0;
    for (int i = 0; i < e_; ++i) {
      for (int a = 0; a < m_; ++a) value += abs_weight(a) * std::abs(U(i * m_ + a));
    }
    return value;
  }

  // gradient of Smooth; with penalty = false the penalty terms are replaced
  // by the current multipliers alone (the Lagrangian gradient)
  VectorXd Gradient(const Trajectory& traj, bool penalty = true) const {
    const int n = model_.state_dim();
    const bool smooth_abs = problem_.settings.abs_mode == AbsMode::kSmooth;
    const double eps = problem_.settings.smoothing;
    std::vector<VectorXd> state_w(e_ + 1, VectorXd::Zero(n));
    std::vector<VectorXd> input_w(e_, VectorXd::Zero(m_));
    for (int i = 0; i < e_; ++i) {
      const VectorXd& u = traj.inputs[i];
      const CostGradients grad =
          cost_.Gradients(traj.states[i], u, /*include_abs=*/false);
      state_w[i] = grad.dx;
      input_w[i] = grad.du;
      if (smooth_abs) {
        for (int a = 0; a < m_; ++a) {
          input_w[i](a) += abs_weights_(a) * u(a) / std::sqrt(u(a) * u(a) + eps);
        }
      }
    }
    if (problem_.endpoint) {
      state_w[e_] = penalty ? VectorXd(nu + rho * EndpointResidual(traj)) : nu;
    }
    if (!penalty_rows_.empty()) {
      const MatrixXd g = RowValues(traj);
      for (int j : penalty_rows_) {
        const CandidateRow& row = problem_.constraints.rows[j];
        for (int i = 0; i < e_; ++i) {
          if (std::isnan(g(i, j))) continue;
          const double w =
              penalty ? std::max(0.0, mu(i, j) + rho * g(i, j)) : mu(i, j);
          if (w == 0.0) continue;
          for (std::size_t k = 0; k < row.signals.size(); ++k) {
            const SignalSpec& s = row.signals[k];
            const double coef = w * row.normal(static_cast<int>(k));
            switch (s.kind) {
              case SignalKind::kState: state_w[i](s.index) += coef; break;
              case SignalKind::kInput: input_w[i](s.index) += coef; break;
              case SignalKind::kInputRate:
                input_w[i + 1](s.index) += coef / traj.sampling_period;
                input_w[i](s.index) -= coef / traj.sampling_period;
                break;
            }
          }
        }
      }
    }
    return AdjointGradient(StepJacobians(model_, traj), state_w, input_w);
  }

  // prox of step * (r |u|) plus the box indicator, coordinatewise
  VectorXd Prox(const VectorXd& v, double step) const {
    VectorXd out(v.size());
    for (int k = 0; k < v.size(); ++k) {
      const int a = k % m_;
      const double t = step * abs_weight(a);
      double z = v(k);
      z = z > t ? z - t : (z < -t ? z + t : 0.0);
      out(k) = std::clamp(z, lower_(a), upper_(a));
    }
    return out;
  }

  VectorXd nu;   // endpoint multiplier
  MatrixXd mu;   // e x J, penalized rows only
  double rho = 1.0;

 private:
  const ForwardProblem& problem_;
  const DynamicsModel& model_;
  const ParametricCost& cost_;
  int m_;
  int e_;
  VectorXd abs_weights_;
  VectorXd lower_, upper_;
  std::vector<int> box_rows_;
  std::vector<int> penalty_rows_;
};

struct InnerResult {
  VectorXd U;
  Trajectory traj;
  double value = 0.0;  // smooth + nonsmooth
  int iterations = 0;
  bool converged = false;
  double lipschitz = 1.0;
};

// FISTA with backtracking and function-value restarts
InnerResult ProximalGradientSolve(const AugmentedLagrangian& al, const VectorXd& start,
                       double lipschitz, const ForwardSettings& settings) {
  InnerResult res;
  double L = std::max(lipschitz, 1e-8);
  VectorXd U = al.Prox(start, 0.0);
  Trajectory traj = al.Roll(U);
  double F = al.Smooth(traj) + al.Nonsmooth(U);
  VectorXd y = U;
  Trajectory y_traj = traj;
  double fy = al.Smooth(y_traj);
  double t = 1.0;
  int it = 0;
  for (; it < settings.max_inner_iterations; ++it) {
    const VectorXd grad = al.Gradient(y_traj);
    VectorXd z;
    Trajectory z_traj;
    double fz = 0.0;
    VectorXd d;
    for (int tries = 0; tries < 200; ++tries) {
      z = al.Prox(y - grad / L, 1.0 / L);
      z_traj = al.Roll(z);
      fz = al.Smooth(z_traj);
      d = z - y;
      const double model = fy + grad.dot(d) + 0.5 * L * d.squaredNorm();
      if (fz <= model + 1e-13 * (1.0 + std::abs(fy))) break;
      L *= 2.0;
    }
    const double mapping = d.size() > 0 ? L * d.cwiseAbs().maxCoeff() : 0.0;
    const double Fz = fz + al.Nonsmooth(z);
    if (mapping <= settings.inner_tolerance) {
      if (Fz <= F) {
        U = std::move(z);
        traj = std::move(z_traj);
        F = Fz;
      }
      res.converged = true;
      break;
    }
    if (Fz > F && t > 1.0) {
      // momentum overshoot: restart from the last accepted iterate
      y = U;
      y_traj = traj;
      fy = al.Smooth(y_traj);
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z + ((t - 1.0) / t_next) * (z - U);
    t = t_next;
    U = std::move(z);
    traj = std::move(z_traj);
    F = Fz;
    y_traj = al.Roll(y);
    fy = al.Smooth(y_traj);
  }
  res.U = std::move(U);
  res.traj = std::move(traj);
  res.value = F;
  res.iterations = it;
  res.lipschitz = L;
  return res;
}

// one stage of the linear-quadratic subproblem over (dz, du)
struct LqStage {
  MatrixXd A, B;  // augmented dynamics
  MatrixXd H;     // (nz + m) square, Gauss-Newton part
  MatrixXd curvature;  // dynamics curvature, same shape; may be empty
  VectorXd q;
  std::vector<int> free;  // input coordinates that may move
};

// Riccati recursion for min sum 0.5 w'Hw + q'w + 0.5 dz_e' HN dz_e + qN' dz_e
// with dz_0 = 0 and the non-free inputs held at zero; false when a reduced
// input Hessian is not positive definite
bool SolveLq(const std::vector<LqStage>& stages, const MatrixXd& HN,
             const VectorXd& qN, bool use_curvature, double reg,
             VectorXd* du) {
  const int e = static_cast<int>(stages.size());
  const int nz = static_cast<int>(HN.rows());
  const int m = static_cast<int>(stages[0].B.cols());
  std::vector<MatrixXd> gains(e);
  std::vector<VectorXd> feedforward(e);
  MatrixXd V = HN;
  VectorXd v = qN;
  for (int i = e - 1; i >= 0; --i) {
    const LqStage& st = stages[i];
    const MatrixXd H = use_curvature && st.curvature.size() > 0
                           ? MatrixXd(st.H + st.curvature)
                           : st.H;
    const MatrixXd VA = V * st.A;
    const MatrixXd Qzz = H.topLeftCorner(nz, nz) + st.A.transpose() * VA;
    const MatrixXd Quz = H.bottomLeftCorner(m, nz) + st.B.transpose() * VA;
    const MatrixXd Quu =
        H.bottomRightCorner(m, m) + st.B.transpose() * V * st.B;
    const VectorXd qz = st.q.head(nz) + st.A.transpose() * v;
    const VectorXd qu = st.q.tail(m) + st.B.transpose() * v;
    MatrixXd K = MatrixXd::Zero(m, nz);
    VectorXd k = VectorXd::Zero(m);
    const int f = static_cast<int>(st.free.size());
    if (f > 0) {
      MatrixXd QuuF(f, f), QuzF(f, nz);
      VectorXd quF(f);
      for (int a = 0; a < f; ++a) {
        for (int b = 0; b < f; ++b) QuuF(a, b) = Quu(st.free[a], st.free[b]);
        QuzF.row(a) = Quz.row(st.free[a]);
        quF(a) = qu(st.free[a]);
      }
      QuuF.diagonal().array() += reg;
      Eigen::LLT<MatrixXd> llt(QuuF);
      if (llt.info() != Eigen::Success) return false;
      const MatrixXd KF = -llt.solve(QuzF);
      const VectorXd kF = -llt.solve(quF);
      for (int a = 0; a < f; ++a) {
        K.row(st.free[a]) = KF.row(a);
        k(st.free[a]) = kF(a);
      }
    }
    V = Qzz + K.transpose() * Quu * K + K.transpose() * Quz +
        Quz.transpose() * K;
    V = 0.5 * (V + V.transpose()).eval();
    v = qz + K.transpose() * (Quu * k + qu) + Quz.transpose() * k;
    gains[i] = std::move(K);
    feedforward[i] = std::move(k);
  }
  du->resize(e * m);
  VectorXd dz = VectorXd::Zero(nz);
  for (int i = 0; i < e; ++i) {
    const VectorXd step = gains[i] * dz + feedforward[i];
    du->segment(i * m, m) = step;
    dz = stages[i].A * dz + stages[i].B * step;
  }
  return true;
}

// projected Newton on the augmented Lagrangian: coordinates pinned at a
// bound (or at zero inside the |u| dead zone) are held, the rest take a
// Riccati-structured Newton step, and the line search projects onto the box
// and the current sign orthant
InnerResult ProjectedNewtonSolve(const AugmentedLagrangian& al,
                                 const VectorXd& start,
                                 const ForwardSettings& settings) {
  const ForwardProblem& p = al.problem();
  const DynamicsModel& model = *p.model;
  const int n = model.state_dim();
  const int m = model.input_dim();
  const int e = p.horizon;
  const double ts = model.sampling_period();
  bool has_rate = false;
  for (int j : al.penalty_rows()) {
    for (const SignalSpec& s : p.constraints.rows[j].signals) {
      has_rate |= s.kind == SignalKind::kInputRate;
    }
  }
  // with rate rows the previous input joins the state
  const int nz = has_rate ? n + m : n;
  const int d = nz + m;
  const bool exact =
      settings.hessian == HessianMode::kExact ||
      (settings.hessian == HessianMode::kAuto &&
       model.has_analytic_second_order());
  const bool smooth_abs = settings.abs_mode == AbsMode::kSmooth;
  const CostHessians cost_h = p.cost.Hessians();
  const VectorXd abs_w = p.cost.AbsWeights();

  InnerResult res;
  VectorXd U = al.Prox(start, 0.0);
  Trajectory traj = al.Roll(U);
  double F = al.Smooth(traj) + al.Nonsmooth(U);
  // iterations in a row whose value change is at roundoff level
  int flat = 0;
  int it = 0;
  for (; it < settings.max_inner_iterations; ++it) {
    const std::vector<Jacobians> jac = StepJacobians(model, traj);
    std::vector<LqStage> stages(e);
    for (int i = 0; i < e; ++i) {
      LqStage& st = stages[i];
      st.A = MatrixXd::Zero(nz, nz);
      st.B = MatrixXd::Zero(nz, m);
      st.A.topLeftCorner(n, n) = jac[i].A;
      st.B.topRows(n) = jac[i].B;
      if (has_rate) st.B.bottomRows(m).setIdentity();
      st.H = MatrixXd::Zero(d, d);
      st.q = VectorXd::Zero(d);
      const VectorXd& u = traj.inputs[i];
      const CostGradients g =
          p.cost.Gradients(traj.states[i], u, /*include_abs=*/false);
      st.q.head(n) = g.dx;
      st.q.tail(m) = g.du;
      st.H.topLeftCorner(n, n) = cost_h.xx;
      st.H.bottomRightCorner(m, m) = cost_h.uu;
      if (smooth_abs) {
        for (int a = 0; a < m; ++a) {
          const double s2 = u(a) * u(a) + settings.smoothing;
          st.q(nz + a) += abs_w(a) * u(a) / std::sqrt(s2);
          st.H(nz + a, nz + a) +=
              abs_w(a) * settings.smoothing / (s2 * std::sqrt(s2));
        }
      }
    }
    // penalized rows; a row with a rate signal lives on stage i + 1 where
    // u_i is the previous input
    const MatrixXd gvals = al.RowValues(traj);
    for (int j : al.penalty_rows()) {
      const CandidateRow& row = p.constraints.rows[j];
      bool rate_row = false;
      for (const SignalSpec& s : row.signals) {
        rate_row |= s.kind == SignalKind::kInputRate;
      }
      for (int i = 0; i < e; ++i) {
        if (std::isnan(gvals(i, j))) continue;
        const double shifted = al.mu(i, j) + al.rho * gvals(i, j);
        if (shifted <= 0.0) continue;
        const int stage = rate_row ? i + 1 : i;
        VectorXd grad = VectorXd::Zero(d);
        for (std::size_t k = 0; k < row.signals.size(); ++k) {
          const SignalSpec& s = row.signals[k];
          const double c = row.normal(static_cast<int>(k));
          switch (s.kind) {
            case SignalKind::kState: grad(s.index) += c; break;
            case SignalKind::kInput:
              grad((rate_row ? n : nz) + s.index) += c;
              break;
            case SignalKind::kInputRate:
              grad(nz + s.index) += c / ts;
              grad(n + s.index) -= c / ts;
              break;
          }
        }
        stages[stage].q += shifted * grad;
        stages[stage].H += al.rho * grad * grad.transpose();
      }
    }
    MatrixXd HN = MatrixXd::Zero(nz, nz);
    VectorXd qN = VectorXd::Zero(nz);
    if (p.endpoint) {
      HN.topLeftCorner(n, n) = al.rho * MatrixXd::Identity(n, n);
      qN.head(n) = al.nu + al.rho * al.EndpointResidual(traj);
    }

    // adjoint pass for the gradient and the state costates
    VectorXd grad(e * m);
    {
      VectorXd lam = qN;
      for (int i = e - 1; i >= 0; --i) {
        const LqStage& st = stages[i];
        if (exact) {
          const ContractedHessian h = ModelSecondOrder(
              model, traj.states[i], traj.inputs[i], lam.head(n));
          MatrixXd& c = stages[i].curvature;
          c = MatrixXd::Zero(d, d);
          c.topLeftCorner(n, n) = h.xx;
          c.block(nz, 0, m, n) = h.ux;
          c.block(0, nz, n, m) = h.ux.transpose();
          c.bottomRightCorner(m, m) = h.uu;
        }
        grad.segment(i * m, m) = st.q.tail(m) + st.B.transpose() * lam;
        lam = st.q.head(nz) + st.A.transpose() * lam;
      }
    }

    const double mapping =
        (U - al.Prox(U - grad, 1.0)).cwiseAbs().maxCoeff();
    if (mapping <= settings.inner_tolerance) {
      res.converged = true;
      break;
    }
    // with large penalties the mapping can sit on a rounding floor just
    // above the tolerance
    if (flat >= 8) {
      res.converged = mapping <= 1e3 * settings.inner_tolerance;
      break;
    }

    // pin coordinates and build the effective gradient
    VectorXd geff = grad;
    VectorXd orthant = VectorXd::Zero(e * m);
    std::vector<bool> pinned(e * m, false);
    for (int k = 0; k < e * m; ++k) {
      const int a = k % m;
      const double r = al.abs_weight(a);
      const double u = U(k);
      if (r > 0.0) {
        if (u > 0.0) {
          geff(k) += r;
          orthant(k) = 1.0;
        } else if (u < 0.0) {
          geff(k) -= r;
          orthant(k) = -1.0;
        } else if (grad(k) + r < 0.0) {
          geff(k) += r;
          orthant(k) = 1.0;
        } else if (grad(k) - r > 0.0) {
          geff(k) -= r;
          orthant(k) = -1.0;
        } else {
          geff(k) = 0.0;
          pinned[k] = true;
        }
      }
      if (u >= al.upper(a) && geff(k) <= 0.0) pinned[k] = true;
      if (u <= al.lower(a) && geff(k) >= 0.0) pinned[k] = true;
    }
    // coordinates on a bound whose Newton step points outward are pinned
    // too, and the step is recomputed
    for (int k = 0; k < e * m; ++k) {
      if (!pinned[k]) stages[k / m].q(nz + k % m) += geff(k) - grad(k);
    }
    VectorXd dir;
    bool solved = false;
    for (int pass = 0; pass < 8; ++pass) {
      for (int i = 0; i < e; ++i) {
        stages[i].free.clear();
        for (int a = 0; a < m; ++a) {
          if (!pinned[i * m + a]) stages[i].free.push_back(a);
        }
      }
      // exact curvature first, then Gauss-Newton, then damped Gauss-Newton
      solved = exact && SolveLq(stages, HN, qN, true, 0.0, &dir);
      for (double reg = 0.0; !solved && reg < 1e6;
           reg = std::max(1e-8, 100.0 * reg)) {
        solved = SolveLq(stages, HN, qN, false, reg, &dir);
      }
      if (!solved) break;
      bool changed = false;
      for (int k = 0; k < e * m; ++k) {
        if (pinned[k]) continue;
        const int a = k % m;
        const bool out = (U(k) >= al.upper(a) && dir(k) > 0.0) ||
                         (U(k) <= al.lower(a) && dir(k) < 0.0) ||
                         (U(k) == 0.0 && orthant(k) * dir(k) < 0.0);
        if (out) {
          pinned[k] = true;
          stages[k / m].q(nz + a) -= geff(k) - grad(k);
          changed = true;
        }
      }
      if (!changed) break;
    }
    double slope = 0.0;
    for (int k = 0; k < e * m; ++k) {
      if (pinned[k]) dir(k) = 0.0;
      slope += geff(k) * dir(k);
    }
    if (!solved || !(slope < 0.0)) {
      // steepest descent on the free coordinates
      for (int k = 0; k < e * m; ++k) dir(k) = pinned[k] ? 0.0 : -geff(k);
    }

    const double previous_value = F;
    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      VectorXd trial = U;
      for (int k = 0; k < e * m; ++k) {
        if (pinned[k]) continue;
        const int a = k % m;
        double v = U(k) + alpha * dir(k);
        if (orthant(k) != 0.0 && v * orthant(k) < 0.0) v = 0.0;
        trial(k) = std::clamp(v, al.lower(a), al.upper(a));
      }
      Trajectory trial_traj = al.Roll(trial);
      const double Ft = al.Smooth(trial_traj) + al.Nonsmooth(trial);
      const double decrease = geff.dot(trial - U);
      if (Ft <= F + 1e-4 * decrease + 1e-15 * (1.0 + std::abs(F))) {
        accepted = Ft <= F || decrease < 0.0;
        U = std::move(trial);
        traj = std::move(trial_traj);
        F = Ft;
        break;
      }
    }
    if (!accepted) {
      // proximal-gradient step with backtracking keeps making progress when
      // the Newton step stalls against the bounds
      for (double t = 1.0; t > 1e-14; t *= 0.5) {
        VectorXd trial = al.Prox(U - t * grad, t);
        Trajectory trial_traj = al.Roll(trial);
        const double fs = al.Smooth(trial_traj);
        const VectorXd step = trial - U;
        const double f0 = F - al.Nonsmooth(U);
        if (fs <= f0 + grad.dot(step) + 0.5 / t * step.squaredNorm()) {
          const double Ft = fs + al.Nonsmooth(trial);
          accepted = Ft < F;
          if (accepted) {
            U = std::move(trial);
            traj = std::move(trial_traj);
            F = Ft;
          }
          break;
        }
      }
    }
    if (!accepted) break;
    flat = std::abs(F - previous_value) <= 1e-14 * (1.0 + std::abs(F))
               ? flat + 1
               : 0;
  }
  res.U = std::move(U);
  res.traj = std::move(traj);
  res.value = F;
  res.iterations = it;
  return res;
}

double PenaltyViolation(const AugmentedLagrangian& al, const ForwardProblem& p,
                        const Trajectory& traj) {
  double violation = 0.0;
  if (p.endpoint) {
    violation = al.EndpointResidual(traj).cwiseAbs().maxCoeff();
  }
  const MatrixXd g = al.RowValues(traj);
  for (int j : al.penalty_rows()) {
    for (int i = 0; i < p.horizon; ++i) {
      if (std::isnan(g(i, j))) continue;
      violation = std::max(violation,
                           std::abs(std::max(g(i, j), -al.mu(i, j) / al.rho)));
    }
  }
  return violation;
}

// reduced stationarity residual and box multipliers at the final iterate
void FinishKkt(const AugmentedLagrangian& al, const ForwardProblem& p,
               ForwardSolution* sol) {
  const int m = p.model->input_dim();
  const int e = p.horizon;
  const VectorXd s = al.Gradient(sol->trajectory, /*penalty=*/false);
  double stationarity = 0.0;
  VectorXd lam_hi = VectorXd::Zero(e * m), lam_lo = VectorXd::Zero(e * m);
  for (int k = 0; k < e * m; ++k) {
    const int a = k % m;
    const double u = sol->inputs(k);
    const double r = al.abs_weight(a);
    // -s must lie in d(r|u|) + normal cone of the box
    double lo = u > 0.0 ? r : -r;
    double hi = u < 0.0 ? -r : r;
    if (u >= al.upper(a)) hi = kInf;
    if (u <= al.lower(a)) lo = -kInf;
    const double target = -s(k);
    const double gap = std::max({0.0, lo - target, target - hi});
    stationarity += gap * gap;
    const double sigma_hi = u < 0.0 ? -1.0 : 1.0;
    const double sigma_lo = u > 0.0 ? 1.0 : -1.0;
    if (u >= al.upper(a)) lam_hi(k) = std::max(0.0, -s(k) - r * sigma_hi);
    if (u <= al.lower(a)) lam_lo(k) = std::max(0.0, s(k) + r * sigma_lo);
  }
  sol->kkt.stationarity = stationarity;

  sol->inequality_multipliers = al.mu;
  std::vector<bool> assigned_hi(m, false), assigned_lo(m, false);
  for (int j : al.box_rows()) {
    const CandidateRow& row = p.constraints.rows[j];
    const int a = row.signals[0].index;
    const double n = row.normal(0);
    const double bound = row.offset / n;
    const bool upper = n > 0.0;
    // the binding row of each side carries the multiplier
    if (upper && (assigned_hi[a] || bound != al.upper(a))) continue;
    if (!upper && (assigned_lo[a] || bound != al.lower(a))) continue;
    (upper ? assigned_hi : assigned_lo)[a] = true;
    for (int i = 0; i < e; ++i) {
      sol->inequality_multipliers(i, j) =
          (upper ? lam_hi(i * m + a) : lam_lo(i * m + a)) / std::abs(n);
    }
  }
  if (p.endpoint) {
    sol->kkt.endpoint_violation =
        (sol->trajectory.states[e] - *p.endpoint).cwiseAbs().maxCoeff();
    sol->endpoint_multiplier = al.nu;
  }
  sol->kkt.inequality_violation =
      std::max(0.0, MaxRelativeViolation(p.constraints, sol->trajectory));
}

ForwardSolution SolveOnce(const ForwardProblem& p, const VectorXd& start) {
  AugmentedLagrangian al(p);
  const ForwardSettings& s = p.settings;
  al.rho = s.initial_penalty;
  ForwardSolution sol;
  VectorXd U = start;
  double lipschitz = 1.0;
  double previous = kInf;
  const int outer_limit = al.has_penalty_terms() ? s.max_outer_iterations : 1;
  for (int k = 0; k < outer_limit; ++k) {
    const InnerResult inner =
        s.inner_method == InnerMethod::kProjectedNewton
            ? ProjectedNewtonSolve(al, U, s)
            : ProximalGradientSolve(al, U, lipschitz, s);
    sol.inner_iterations += inner.iterations;
    sol.outer_iterations = k + 1;
    lipschitz = inner.lipschitz / 4.0;
    U = inner.U;
    sol.inputs = inner.U;
    sol.trajectory = inner.traj;
    sol.merit_history.push_back(inner.value);
    if (!al.has_penalty_terms()) {
      sol.converged = inner.converged;
      break;
    }
    const double violation = PenaltyViolation(al, p, inner.traj);
    // first-order multiplier update
    if (p.endpoint) al.nu += al.rho * al.EndpointResidual(inner.traj);
    const MatrixXd g = al.RowValues(inner.traj);
    for (int j : al.penalty_rows()) {
      for (int i = 0; i < p.horizon; ++i) {
        if (!std::isnan(g(i, j))) {
          al.mu(i, j) = std::max(0.0, al.mu(i, j) + al.rho * g(i, j));
        }
      }
    }
    if (violation <= s.feasibility_tolerance && inner.converged) {
      sol.converged = true;
      break;
    }
    if (violation > 0.25 * previous) {
      al.rho = std::min(al.rho * s.penalty_growth, s.max_penalty);
    }
    previous = violation;
  }
  sol.penalty = al.rho;
  sol.objective = 0.0;
  for (int i = 0; i < p.horizon; ++i) {
    sol.objective += p.cost.Value(sol.trajectory.states[i],
                                  sol.trajectory.inputs[i]);
  }
  FinishKkt(al, p, &sol);
  return sol;
}

bool Better(const ForwardSolution& a, const ForwardSolution& b) {
  if (a.converged != b.converged) return a.converged;
  const double va = std::max(a.kkt.endpoint_violation, a.kkt.inequality_violation);
  const double vb = std::max(b.kkt.endpoint_violation, b.kkt.inequality_violation);
  if (va != vb) return va < vb;
  return a.objective < b.objective;
}

}  // namespace

void ForwardProblem::Validate() const {
  if (!model) Fail(ErrorCode::kInvalidArgument, "forward solver: no model");
  if (horizon < 1) Fail(ErrorCode::kInvalidArgument, "forward solver: horizon < 1");
  CheckDimension(x0.size() == model->state_dim(), "forward solver: x0 dimension");
  if (endpoint) {
    CheckDimension(endpoint->size() == model->state_dim(),
                   "forward solver: endpoint dimension");
  }
  CheckDimension(cost.state_dim() == model->state_dim() &&
                     cost.input_dim() == model->input_dim(),
                 "forward solver: cost dimensions do not match the model");
  for (const CandidateRow& row : constraints.rows) {
    for (const SignalSpec& s : row.signals) {
      ValidateSignal(s, model->state_dim(), model->input_dim());
    }
  }
  if (!(settings.initial_penalty > 0.0) || !(settings.penalty_growth >= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "forward solver: bad penalty settings");
  }
}

ForwardSolution SolveShortestPath(const ForwardProblem& problem) {
  problem.Validate();
  const int dim = problem.horizon * problem.model->input_dim();
  ForwardSolution best =
      SolveOnce(problem, problem.initial_inputs.size() == dim
                             ? problem.initial_inputs
                             : VectorXd::Zero(dim));
  std::mt19937_64 rng(problem.settings.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  int restarts = 0;
  while (!best.converged && restarts < problem.settings.max_restarts) {
    ++restarts;
    VectorXd start = best.inputs;
    for (int k = 0; k < dim; ++k) {
      start(k) += problem.settings.restart_scale * normal(rng) *
                  (1.0 + std::abs(start(k)));
    }
    ForwardSolution trial = SolveOnce(problem, start);
    trial.inner_iterations += best.inner_iterations;
    if (Better(trial, best)) {
      best = std::move(trial);
    }
  }
  best.restarts = restarts;
  return best;
}

ForwardSolution SolveLongHorizon(ForwardProblem problem) {
  if (!problem.endpoint) {
    problem.endpoint = VectorXd::Zero(problem.model->state_dim());
  }
  const int m = problem.model->input_dim();
  const int base = problem.settings.continuation_horizon;
  if (base > 0 && problem.horizon > base &&
      problem.initial_inputs.size() == 0) {
    // horizon continuation: long open-loop rollouts of poor guesses are
    // badly conditioned
    std::vector<int> horizons;
    for (int h = base; h < problem.horizon; h *= 2) horizons.push_back(h);
    VectorXd warm = VectorXd::Zero(0);
    for (int h : horizons) {
      ForwardProblem stage = problem;
      stage.horizon = h;
      stage.initial_inputs = VectorXd::Zero(h * m);
      stage.initial_inputs.head(warm.size()) = warm;
      warm = SolveShortestPath(stage).inputs;
    }
    problem.initial_inputs = VectorXd::Zero(problem.horizon * m);
    problem.initial_inputs.head(warm.size()) = warm;
  }
  ForwardSolution sol = SolveShortestPath(problem);
  sol.trajectory.simulated = true;
  return sol;
}

ForwardSolution SolveFreeTerminal(ForwardProblem problem) {
  problem.endpoint.reset();
  ForwardSolution sol = SolveShortestPath(problem);
  sol.trajectory.simulated = true;
  return sol;
}

double RmsError(const Trajectory& prediction, const Trajectory& reference) {
  CheckDimension(prediction.states.size() == reference.states.size(),
                 "rms: trajectories differ in length");
  const int e = reference.horizon();
  const int n = reference.state_dim();
  if (e == 0) return 0.0;
  double sum = 0.0;
  for (int i = 1; i <= e; ++i) {
    CheckDimension(prediction.states[i].size() == n, "rms: state dimension");
    sum += (prediction.states[i] - reference.states[i]).squaredNorm();
  }
  return std::sqrt(sum / (static_cast<double>(n) * e));
}

Prediction PredictAndRms(std::shared_ptr<const DynamicsModel> model,
                         const ParametricCost& cost,
                         const CandidateSet& constraints,
                         const Trajectory& reference,
                         const ForwardSettings& settings) {
  reference.Validate();
  ForwardProblem problem;
  problem.model = std::move(model);
  problem.cost = cost;
  problem.constraints = constraints;
  problem.x0 = reference.states.front();
  problem.endpoint = reference.states.back();
  problem.horizon = reference.horizon();
  problem.settings = settings;
  Prediction out;
  out.solution = SolveShortestPath(problem);
  out.solution.trajectory.start_index = reference.start_index;
  out.rms = RmsError(out.solution.trajectory, reference);
  return out;
}

}  // namespace spioc
