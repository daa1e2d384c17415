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

#include "spioc/dynamics.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "spioc/linalg.h"

namespace spioc {

Jacobians DynamicsModel::AnalyticJacobians(const VectorXd&,
                                           const VectorXd&) const {
  Fail(ErrorCode::kInvalidArgument,
       name() + " does not provide analytic Jacobians");
}

ContractedHessian DynamicsModel::AnalyticSecondOrder(const VectorXd&,
                                                    const VectorXd&,
                                                    const VectorXd&) const {
  Fail(ErrorCode::kInvalidArgument,
       name() + " does not provide analytic second derivatives");
}

void DynamicsModel::CheckArguments(const VectorXd& x,
                                   const VectorXd& u) const {
  if (x.size() != state_dim() || u.size() != input_dim()) {
    std::ostringstream msg;
    msg << name() << ": expected state/input of size " << state_dim() << "/"
        << input_dim() << ", got " << x.size() << "/" << u.size();
    Fail(ErrorCode::kDimensionMismatch, msg.str());
  }
}

Jacobians FiniteDifferenceJacobians(const DynamicsModel& model,
                                    const VectorXd& x, const VectorXd& u,
                                    double scale) {
  const int n = model.state_dim();
  const int m = model.input_dim();
  Jacobians jac{MatrixXd(n, n), MatrixXd(n, m)};
  VectorXd xp = x;
  for (int k = 0; k < n; ++k) {
    const double h = scale * (1.0 + std::abs(x(k)));
    xp(k) = x(k) + h;
    const VectorXd plus = model.Step(xp, u);
    xp(k) = x(k) - h;
    const VectorXd minus = model.Step(xp, u);
    xp(k) = x(k);
    jac.A.col(k) = (plus - minus) / (2.0 * h);
  }
  VectorXd up = u;
  for (int k = 0; k < m; ++k) {
    const double h = scale * (1.0 + std::abs(u(k)));
    up(k) = u(k) + h;
    const VectorXd plus = model.Step(x, up);
    up(k) = u(k) - h;
    const VectorXd minus = model.Step(x, up);
    up(k) = u(k);
    jac.B.col(k) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

Jacobians ModelJacobians(const DynamicsModel& model, const VectorXd& x,
                         const VectorXd& u) {
  if (model.has_analytic_jacobians()) return model.AnalyticJacobians(x, u);
  return FiniteDifferenceJacobians(model, x, u);
}

ContractedHessian ModelSecondOrder(const DynamicsModel& model,
                                   const VectorXd& x, const VectorXd& u,
                                   const VectorXd& w) {
  if (model.has_analytic_second_order()) {
    return model.AnalyticSecondOrder(x, u, w);
  }
  const int n = model.state_dim();
  const int m = model.input_dim();
  // columns of the Hessian are differences of J^T w, J = [A B]
  MatrixXd H(n + m, n + m);
  VectorXd xp = x, up = u;
  for (int k = 0; k < n + m; ++k) {
    double& v = k < n ? xp(k) : up(k - n);
    const double base = v;
    const double h = 1e-4 * (1.0 + std::abs(base));
    v = base + h;
    const Jacobians plus = ModelJacobians(model, xp, up);
    v = base - h;
    const Jacobians minus = ModelJacobians(model, xp, up);
    v = base;
    H.block(0, k, n, 1) = (plus.A - minus.A).transpose() * w / (2.0 * h);
    H.block(n, k, m, 1) = (plus.B - minus.B).transpose() * w / (2.0 * h);
  }
  H = 0.5 * (H + H.transpose()).eval();
  return {H.topLeftCorner(n, n), H.bottomLeftCorner(m, n),
          H.bottomRightCorner(m, m)};
}

// ---------------------------------------------------------------------------

void PendulumParams::Validate() const {
  if (!(gravity > 0.0) || !(length > 0.0) || !(mass > 0.0) ||
      !(sampling_period > 0.0)) {
    Fail(ErrorCode::kInvalidArgument,
         "pendulum: g, l, m and T_s must be strictly positive");
  }
}

VectorXd PendulumStep(const VectorXd& x, double u, const PendulumParams& p) {
  const double ts = p.sampling_period;
  VectorXd next(2);
  next(0) = x(0) + ts * x(1);
  next(1) = x(1) - ts * (p.gravity / p.length) * std::sin(x(0)) +
            ts * u / (p.mass * p.length * p.length);
  return next;
}

PendulumModel::PendulumModel(PendulumParams params) : params_(params) {
  params_.Validate();
}

VectorXd PendulumModel::Step(const VectorXd& x, const VectorXd& u) const {
  CheckArguments(x, u);
  return PendulumStep(x, u(0), params_);
}

Jacobians PendulumModel::AnalyticJacobians(const VectorXd& x,
                                           const VectorXd& u) const {
  CheckArguments(x, u);
  const double ts = params_.sampling_period;
  Jacobians jac{MatrixXd(2, 2), MatrixXd(2, 1)};
  jac.A << 1.0, ts,
      -ts * (params_.gravity / params_.length) * std::cos(x(0)), 1.0;
  jac.B << 0.0, ts / (params_.mass * params_.length * params_.length);
  return jac;
}

ContractedHessian PendulumModel::AnalyticSecondOrder(const VectorXd& x,
                                                    const VectorXd& u,
                                                    const VectorXd& w) const {
  CheckArguments(x, u);
  ContractedHessian h{MatrixXd::Zero(2, 2), MatrixXd::Zero(1, 2),
                      MatrixXd::Zero(1, 1)};
  h.xx(0, 0) = w(1) * params_.sampling_period *
               (params_.gravity / params_.length) * std::sin(x(0));
  return h;
}

// ---------------------------------------------------------------------------

LinearModel::LinearModel(MatrixXd A, MatrixXd B, double sampling_period)
    : A_(std::move(A)), B_(std::move(B)), sampling_period_(sampling_period) {
  if (A_.rows() != A_.cols() || B_.rows() != A_.rows() || B_.cols() < 1) {
    Fail(ErrorCode::kDimensionMismatch, "linear model: inconsistent A, B");
  }
}

VectorXd LinearModel::Step(const VectorXd& x, const VectorXd& u) const {
  CheckArguments(x, u);
  return A_ * x + B_ * u;
}

Jacobians LinearModel::AnalyticJacobians(const VectorXd& x,
                                         const VectorXd& u) const {
  CheckArguments(x, u);
  return {A_, B_};
}

ContractedHessian LinearModel::AnalyticSecondOrder(const VectorXd& x,
                                                  const VectorXd& u,
                                                  const VectorXd&) const {
  CheckArguments(x, u);
  return {MatrixXd::Zero(state_dim(), state_dim()),
          MatrixXd::Zero(input_dim(), state_dim()),
          MatrixXd::Zero(input_dim(), input_dim())};
}

// ---------------------------------------------------------------------------

void PlanarArmParams::Validate() const {
  if (human_links.empty() || object_links.empty()) {
    Fail(ErrorCode::kInvalidArgument, "arm: both chains need links");
  }
  for (double l : human_links) {
    if (!(l > 0.0)) Fail(ErrorCode::kInvalidArgument, "arm: link <= 0");
  }
  for (double l : object_links) {
    if (!(l > 0.0)) Fail(ErrorCode::kInvalidArgument, "arm: link <= 0");
  }
  if (!(sampling_period > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "arm: T_s must be positive");
  }
}

Eigen::Vector3d PlanarChainPose(const std::vector<double>& links,
                                const VectorXd& angles,
                                const Eigen::Vector3d& base) {
  double px = base(0), py = base(1), heading = base(2);
  for (std::size_t k = 0; k < links.size(); ++k) {
    heading += angles(static_cast<int>(k));
    px += links[k] * std::cos(heading);
    py += links[k] * std::sin(heading);
  }
  return {px, py, heading};
}

MatrixXd PlanarChainJacobian(const std::vector<double>& links,
                             const VectorXd& angles,
                             const Eigen::Vector3d& base) {
  const int joints = static_cast<int>(links.size());
  // joint positions, then tip
  std::vector<Eigen::Vector2d> joint_pos(joints);
  double px = base(0), py = base(1), heading = base(2);
  for (int k = 0; k < joints; ++k) {
    joint_pos[k] = {px, py};
    heading += angles(k);
    px += links[k] * std::cos(heading);
    py += links[k] * std::sin(heading);
  }
  MatrixXd jac(3, joints);
  for (int k = 0; k < joints; ++k) {
    jac(0, k) = -(py - joint_pos[k].y());
    jac(1, k) = px - joint_pos[k].x();
    jac(2, k) = 1.0;
  }
  return jac;
}

std::vector<MatrixXd> PlanarChainJacobianDerivatives(
    const std::vector<double>& links, const VectorXd& angles,
    const Eigen::Vector3d& base) {
  const int joints = static_cast<int>(links.size());
  // link vectors in the world frame
  std::vector<Eigen::Vector2d> link_vec(joints);
  double heading = base(2);
  for (int k = 0; k < joints; ++k) {
    heading += angles(k);
    link_vec[k] = links[k] * Eigen::Vector2d(std::cos(heading),
                                             std::sin(heading));
  }
  // column k depends on the links at or after joint k; turning joint l
  // rotates every link at or after l by 90 degrees
  std::vector<MatrixXd> derivs(joints, MatrixXd::Zero(3, joints));
  for (int l = 0; l < joints; ++l) {
    for (int k = 0; k < joints; ++k) {
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      for (int i = std::max(k, l); i < joints; ++i) sum += link_vec[i];
      derivs[l](0, k) = -sum.x();
      derivs[l](1, k) = -sum.y();
    }
  }
  return derivs;
}

Eigen::Vector3d ClosingObjectBase(const PlanarArmParams& params,
                                  const VectorXd& human_angles,
                                  const VectorXd& object_angles) {
  // tip pose of the object chain relative to its own base
  const Eigen::Vector3d grip = PlanarChainPose(
      params.human_links, human_angles, Eigen::Vector3d::Zero());
  const Eigen::Vector3d rel = PlanarChainPose(
      params.object_links, object_angles, Eigen::Vector3d::Zero());
  const double heading = grip(2) - rel(2);
  const double c = std::cos(heading), s = std::sin(heading);
  return {grip(0) - (c * rel(0) - s * rel(1)),
          grip(1) - (s * rel(0) + c * rel(1)), heading};
}

ArmStepResult ArmStep(const VectorXd& x, const VectorXd& u,
                      const PlanarArmParams& params) {
  const int nh = params.human_joints();
  const int no = params.object_joints();
  const VectorXd xh = x.head(nh);
  const VectorXd xo = x.tail(no);
  const MatrixXd jh =
      PlanarChainJacobian(params.human_links, xh, Eigen::Vector3d::Zero());
  const MatrixXd jo =
      PlanarChainJacobian(params.object_links, xo, params.object_base);
  ArmStepResult result;
  const MatrixXd jo_pinv = PseudoInverse(jo, params.singular_value_cutoff,
                                         &result.pseudo_inverse_truncated);
  result.next.resize(nh + no);
  result.next.head(nh) = xh + params.sampling_period * u;
  result.next.tail(no) = xo + params.sampling_period * (jo_pinv * (jh * u));
  return result;
}

PlanarArmModel::PlanarArmModel(PlanarArmParams params)
    : params_(std::move(params)) {
  params_.Validate();
}

VectorXd PlanarArmModel::Step(const VectorXd& x, const VectorXd& u) const {
  CheckArguments(x, u);
  return ArmStep(x, u, params_).next;
}

ArmStepResult PlanarArmModel::StepWithDiagnostics(const VectorXd& x,
                                                  const VectorXd& u) const {
  CheckArguments(x, u);
  return ArmStep(x, u, params_);
}

Jacobians PlanarArmModel::AnalyticJacobians(const VectorXd& x,
                                            const VectorXd& u) const {
  CheckArguments(x, u);
  const int nh = params_.human_joints();
  const int no = params_.object_joints();
  const double ts = params_.sampling_period;
  const VectorXd xh = x.head(nh);
  const VectorXd xo = x.tail(no);
  const MatrixXd jh =
      PlanarChainJacobian(params_.human_links, xh, Eigen::Vector3d::Zero());
  const MatrixXd jo =
      PlanarChainJacobian(params_.object_links, xo, params_.object_base);
  const MatrixXd pinv = PseudoInverse(jo, params_.singular_value_cutoff);
  const VectorXd twist = jh * u;
  const std::vector<MatrixXd> djh = PlanarChainJacobianDerivatives(
      params_.human_links, xh, Eigen::Vector3d::Zero());
  const std::vector<MatrixXd> djo = PlanarChainJacobianDerivatives(
      params_.object_links, xo, params_.object_base);
  // projectors onto the complements of range(J) and range(J^T)
  const MatrixXd left = MatrixXd::Identity(3, 3) - jo * pinv;
  const MatrixXd right = MatrixXd::Identity(no, no) - pinv * jo;
  Jacobians jac;
  jac.A = MatrixXd::Identity(nh + no, nh + no);
  for (int k = 0; k < nh; ++k) {
    jac.A.block(nh, k, no, 1) = ts * (pinv * (djh[k] * u));
  }
  for (int k = 0; k < no; ++k) {
    const MatrixXd& d = djo[k];
    const MatrixXd dpinv = -pinv * d * pinv +
                           pinv * pinv.transpose() * d.transpose() * left +
                           right * d.transpose() * pinv.transpose() * pinv;
    jac.A.block(nh, nh + k, no, 1) += ts * (dpinv * twist);
  }
  jac.B = MatrixXd::Zero(nh + no, nh);
  jac.B.topRows(nh) = ts * MatrixXd::Identity(nh, nh);
  jac.B.bottomRows(no) = ts * (pinv * jh);
  return jac;
}

MatrixXd PlanarArmModel::InputMatrix(const VectorXd& x,
                                     bool* truncated) const {
  const int nh = params_.human_joints();
  const int no = params_.object_joints();
  const MatrixXd jh = PlanarChainJacobian(params_.human_links, x.head(nh),
                                          Eigen::Vector3d::Zero());
  const MatrixXd jo = PlanarChainJacobian(params_.object_links, x.tail(no),
                                          params_.object_base);
  MatrixXd g(nh + no, nh);
  g.topRows(nh).setIdentity();
  g.bottomRows(no) =
      PseudoInverse(jo, params_.singular_value_cutoff, truncated) * jh;
  return g;
}

}  // namespace spioc
