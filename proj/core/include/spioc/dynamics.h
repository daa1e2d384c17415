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

#ifndef SPIOC_DYNAMICS_H_
#define SPIOC_DYNAMICS_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "spioc/common.h"

namespace spioc {

// linearization of one transition: x' ~ A x + B u
struct Jacobians {
  MatrixXd A;
  MatrixXd B;
};

// second derivatives of w . step(x, u) for a fixed weight vector w
struct ContractedHessian {
  MatrixXd xx;  // n x n
  MatrixXd ux;  // m x n
  MatrixXd uu;  // m x m
};

// Discrete-time transition map x(k+1) = f(x(k), u(k)). Implementations are
// immutable after construction.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual double sampling_period() const = 0;
  virtual std::string name() const = 0;

  virtual VectorXd Step(const VectorXd& x, const VectorXd& u) const = 0;

  virtual bool has_analytic_jacobians() const { return false; }
  // only called when has_analytic_jacobians() is true
  virtual Jacobians AnalyticJacobians(const VectorXd& x,
                                      const VectorXd& u) const;

  virtual bool has_analytic_second_order() const { return false; }
  virtual ContractedHessian AnalyticSecondOrder(const VectorXd& x,
                                                const VectorXd& u,
                                                const VectorXd& w) const;

 protected:
  void CheckArguments(const VectorXd& x, const VectorXd& u) const;
};

// central differences with per-coordinate step scale * (1 + |value|)
Jacobians FiniteDifferenceJacobians(const DynamicsModel& model,
                                    const VectorXd& x, const VectorXd& u,
                                    double scale = 1e-6);

// analytic Jacobians when the model provides them, finite differences
// otherwise
Jacobians ModelJacobians(const DynamicsModel& model, const VectorXd& x,
                         const VectorXd& u);

// analytic when available, else central differences of the Jacobians
ContractedHessian ModelSecondOrder(const DynamicsModel& model,
                                   const VectorXd& x, const VectorXd& u,
                                   const VectorXd& w);

// ---------------------------------------------------------------------------
// pendulum

struct PendulumParams {
  double gravity = 9.81;        // m/s^2
  double length = 1.0;          // m
  double mass = 1.0;            // kg
  double sampling_period = 0.01;  // s
  double torque_bound = 5.0;    // N m, metadata only

  void Validate() const;
};

// x = (angle, angular rate), u = torque; explicit Euler discretization
VectorXd PendulumStep(const VectorXd& x, double u, const PendulumParams& p);

class PendulumModel final : public DynamicsModel {
 public:
  explicit PendulumModel(PendulumParams params = {});

  int state_dim() const override { return 2; }
  int input_dim() const override { return 1; }
  double sampling_period() const override { return params_.sampling_period; }
  std::string name() const override { return "pendulum"; }

  VectorXd Step(const VectorXd& x, const VectorXd& u) const override;
  bool has_analytic_jacobians() const override { return true; }
  Jacobians AnalyticJacobians(const VectorXd& x,
                              const VectorXd& u) const override;
  bool has_analytic_second_order() const override { return true; }
  ContractedHessian AnalyticSecondOrder(const VectorXd& x, const VectorXd& u,
                                        const VectorXd& w) const override;

  const PendulumParams& params() const { return params_; }

 private:
  PendulumParams params_;
};

// ---------------------------------------------------------------------------
// linear time-invariant model, used for Riccati checks

class LinearModel final : public DynamicsModel {
 public:
  LinearModel(MatrixXd A, MatrixXd B, double sampling_period = 1.0);

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int input_dim() const override { return static_cast<int>(B_.cols()); }
  double sampling_period() const override { return sampling_period_; }
  std::string name() const override { return "linear"; }

  VectorXd Step(const VectorXd& x, const VectorXd& u) const override;
  bool has_analytic_jacobians() const override { return true; }
  Jacobians AnalyticJacobians(const VectorXd& x,
                              const VectorXd& u) const override;
  bool has_analytic_second_order() const override { return true; }
  ContractedHessian AnalyticSecondOrder(const VectorXd& x, const VectorXd& u,
                                        const VectorXd& w) const override;

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }

 private:
  MatrixXd A_;
  MatrixXd B_;
  double sampling_period_;
};

// ---------------------------------------------------------------------------
// planar human arm coupled to a passive planar object chain
//
// Both chains are serial revolute chains in the plane. The human chain is
// rooted at the origin; the object chain is rooted at `object_base` (x, y,
// heading). The grip frame is the tip of both chains, so at a consistent
// configuration their tip poses coincide. The state is (x_h, x_o) and the
// input is the human joint-rate vector. Object joint rates follow from the
// shared grip twist through the pseudo-inverse of the object Jacobian.

struct PlanarArmParams {
  std::vector<double> human_links = {0.30, 0.27, 0.08};
  std::vector<double> object_links = {0.45, 0.40, 0.08};
  Eigen::Vector3d object_base = Eigen::Vector3d(0.75, 0.0, 2.6);
  double sampling_period = 0.0185;  // s
  double singular_value_cutoff = 1e-8;  // relative to sigma_max

  int human_joints() const { return static_cast<int>(human_links.size()); }
  int object_joints() const { return static_cast<int>(object_links.size()); }
  void Validate() const;
};

// tip pose (x, y, heading) of a planar chain with the given base pose
Eigen::Vector3d PlanarChainPose(const std::vector<double>& links,
                                const VectorXd& angles,
                                const Eigen::Vector3d& base);

// 3 x joints matrix mapping joint rates to the tip twist (vx, vy, omega)
// expressed in the world frame at the tip point
MatrixXd PlanarChainJacobian(const std::vector<double>& links,
                             const VectorXd& angles,
                             const Eigen::Vector3d& base);

// derivatives of PlanarChainJacobian, entry l is d J / d angle_l
std::vector<MatrixXd> PlanarChainJacobianDerivatives(
    const std::vector<double>& links, const VectorXd& angles,
    const Eigen::Vector3d& base);

// object base pose that closes the loop for the given joint angles
Eigen::Vector3d ClosingObjectBase(const PlanarArmParams& params,
                                  const VectorXd& human_angles,
                                  const VectorXd& object_angles);

struct ArmStepResult {
  VectorXd next;
  bool pseudo_inverse_truncated = false;
};

ArmStepResult ArmStep(const VectorXd& x, const VectorXd& u,
                      const PlanarArmParams& params);

class PlanarArmModel final : public DynamicsModel {
 public:
  explicit PlanarArmModel(PlanarArmParams params = {});

  int state_dim() const override {
    return params_.human_joints() + params_.object_joints();
  }
  int input_dim() const override { return params_.human_joints(); }
  double sampling_period() const override { return params_.sampling_period; }
  std::string name() const override { return "planar_arm"; }

  VectorXd Step(const VectorXd& x, const VectorXd& u) const override;
  ArmStepResult StepWithDiagnostics(const VectorXd& x,
                                    const VectorXd& u) const;
  // differentiates the pseudo-inverse assuming its rank is locally constant
  bool has_analytic_jacobians() const override { return true; }
  Jacobians AnalyticJacobians(const VectorXd& x,
                              const VectorXd& u) const override;

  // state-dependent input matrix [I; J_o^+ J_h]
  MatrixXd InputMatrix(const VectorXd& x, bool* truncated = nullptr) const;

  const PlanarArmParams& params() const { return params_; }

 private:
  PlanarArmParams params_;
};

}  // namespace spioc

#endif  // SPIOC_DYNAMICS_H_
