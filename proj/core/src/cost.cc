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

#include "spioc/cost.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spioc/linalg.h"

namespace spioc {

ParametricCost ParametricCost::Create(const CostSpec& spec) {
  ParametricCost cost;
  const int n = static_cast<int>(spec.selector.cols());
  const int ny = static_cast<int>(spec.selector.rows());
  CheckDimension(n > 0 && ny > 0, "cost: empty selector");
  CheckDimension(spec.reference.size() == ny, "cost: reference size != rows of S");
  CheckDimension(spec.state_weight.rows() == ny && spec.state_weight.cols() == ny,
                 "cost: Q must be n_y x n_y");
  const int m = static_cast<int>(spec.input_weight.rows());
  CheckDimension(m > 0 && spec.input_weight.cols() == m,
                 "cost: R must be square and non-empty");

  cost.state_dim_ = n;
  cost.input_dim_ = m;
  cost.selector_ = spec.selector;
  cost.reference_ = spec.reference;
  cost.normalization_ = spec.normalization;

  cost.AddSymmetricBlock(BlockKind::kStateWeight, FeatureKind::kStateProduct,
                         ny, spec.diagonal_state_weight);
  if (spec.input_mode == InputWeightMode::kFrozen) {
    cost.frozen_input_weight_ = spec.input_weight;
    ParamBlock block{BlockKind::kFrozen, static_cast<int>(cost.features_.size()),
                     1, m, false};
    cost.features_.push_back({FeatureKind::kFrozenInputForm, 0, 0, 1.0});
    cost.blocks_.push_back(block);
  } else {
    cost.frozen_input_weight_ = MatrixXd::Zero(m, m);
    cost.AddSymmetricBlock(BlockKind::kInputWeight, FeatureKind::kInputProduct,
                           m, spec.input_mode == InputWeightMode::kDiagonal);
  }
  VectorXd abs_weight;
  if (spec.abs_input) {
    CheckDimension(spec.abs_weight.size() == m, "cost: r needs one entry per input");
    ParamBlock block{BlockKind::kAbsWeight,
                     static_cast<int>(cost.features_.size()), m, m, true};
    for (int a = 0; a < m; ++a) {
      cost.features_.push_back({FeatureKind::kInputAbs, a, a, 1.0});
    }
    cost.blocks_.push_back(block);
    abs_weight = spec.abs_weight;
  }

  if (spec.normalization == Normalization::kTrace &&
      spec.input_mode == InputWeightMode::kFrozen) {
    Fail(ErrorCode::kInvalidArgument,
         "cost: trace normalization needs a learned R block");
  }
  if (spec.normalization == Normalization::kFixedFeature &&
      spec.input_mode != InputWeightMode::kFrozen) {
    Fail(ErrorCode::kInvalidArgument,
         "cost: fixed-feature normalization needs a frozen feature");
  }

  cost.params_ = VectorXd::Zero(static_cast<int>(cost.features_.size()));
  for (const ParamBlock& block : cost.blocks_) {
    switch (block.kind) {
      case BlockKind::kStateWeight:
        cost.SetBlockMatrix(block, spec.state_weight, &cost.params_);
        break;
      case BlockKind::kInputWeight:
        cost.SetBlockMatrix(block, spec.input_weight, &cost.params_);
        break;
      case BlockKind::kAbsWeight:
        cost.params_.segment(block.offset, block.count) = abs_weight;
        break;
      case BlockKind::kFrozen:
        cost.params_(block.offset) = 1.0;
        break;
    }
  }
  return cost;
}

ParametricCost ParametricCost::Pendulum(const MatrixXd& Q, double r) {
  CostSpec spec;
  spec.selector = MatrixXd::Identity(2, 2);
  spec.reference = VectorXd::Zero(2);
  spec.state_weight = Q;
  spec.input_mode = InputWeightMode::kFrozen;
  spec.input_weight = MatrixXd::Identity(1, 1);
  spec.abs_input = true;
  spec.abs_weight = VectorXd::Constant(1, r);
  spec.normalization = Normalization::kFixedFeature;
  return Create(spec);
}

ParametricCost ParametricCost::Quadratic(const MatrixXd& Q,
                                         const MatrixXd& R0) {
  CostSpec spec;
  spec.selector = MatrixXd::Identity(Q.rows(), Q.rows());
  spec.reference = VectorXd::Zero(Q.rows());
  spec.state_weight = Q;
  spec.input_mode = InputWeightMode::kFrozen;
  spec.input_weight = R0;
  spec.normalization = Normalization::kFixedFeature;
  return Create(spec);
}

ParametricCost ParametricCost::Tracking(const MatrixXd& selector,
                                        const VectorXd& reference,
                                        const MatrixXd& Q, const MatrixXd& R,
                                        bool diagonal_r) {
  CostSpec spec;
  spec.selector = selector;
  spec.reference = reference;
  spec.state_weight = Q;
  spec.input_mode =
      diagonal_r ? InputWeightMode::kDiagonal : InputWeightMode::kFull;
  spec.input_weight = R;
  spec.normalization = Normalization::kTrace;
  return Create(spec);
}

void ParametricCost::AddSymmetricBlock(BlockKind kind, FeatureKind feature,
                                       int dim, bool diagonal) {
  ParamBlock block{kind, static_cast<int>(features_.size()), 0, dim, diagonal};
  for (int a = 0; a < dim; ++a) {
    const int last = diagonal ? a + 1 : dim;
    for (int b = a; b < last; ++b) {
      features_.push_back({feature, a, b, a == b ? 1.0 : 2.0});
      ++block.count;
    }
  }
  blocks_.push_back(block);
}

ParametricCost ParametricCost::WithParams(const VectorXd& params) const {
  CheckDimension(params.size() == num_params(), "cost: parameter size mismatch");
  ParametricCost out = *this;
  out.params_ = params;
  return out;
}

const ParamBlock* ParametricCost::FindBlock(BlockKind kind) const {
  for (const ParamBlock& block : blocks_) {
    if (block.kind == kind) return &block;
  }
  return nullptr;
}

bool ParametricCost::IsFrozen(int p) const {
  return features_[p].kind == FeatureKind::kFrozenInputForm;
}

std::vector<int> ParametricCost::FreeParams() const {
  std::vector<int> free;
  for (int p = 0; p < num_params(); ++p) {
    if (!IsFrozen(p)) free.push_back(p);
  }
  return free;
}

VectorXd ParametricCost::FeatureValues(const VectorXd& x,
                                       const VectorXd& u) const {
  CheckDimension(x.size() == state_dim_ && u.size() == input_dim_,
                 "cost: state/input dimension mismatch");
  const VectorXd y = selector_ * x - reference_;
  VectorXd phi(num_params());
  for (int p = 0; p < num_params(); ++p) {
    const Feature& f = features_[p];
    switch (f.kind) {
      case FeatureKind::kStateProduct:
        phi(p) = f.scale * y(f.a) * y(f.b);
        break;
      case FeatureKind::kInputProduct:
        phi(p) = f.scale * u(f.a) * u(f.b);
        break;
      case FeatureKind::kInputAbs:
        phi(p) = std::abs(u(f.a));
        break;
      case FeatureKind::kFrozenInputForm:
        phi(p) = u.dot(frozen_input_weight_ * u);
        break;
    }
  }
  return phi;
}

double ParametricCost::Value(const VectorXd& x, const VectorXd& u) const {
  return params_.dot(FeatureValues(x, u));
}

CostGradients ParametricCost::Gradients(const VectorXd& x, const VectorXd& u,
                                        bool include_abs) const {
  CheckDimension(x.size() == state_dim_ && u.size() == input_dim_,
                 "cost: state/input dimension mismatch");
  const int n = state_dim_;
  const int m = input_dim_;
  const int P = num_params();
  const VectorXd y = selector_ * x - reference_;
  CostGradients g;
  g.feature_dx = MatrixXd::Zero(n, P);
  g.feature_du = MatrixXd::Zero(m, P);
  g.dx = VectorXd::Zero(n);
  g.du = VectorXd::Zero(m);
  for (int p = 0; p < P; ++p) {
    const Feature& f = features_[p];
    switch (f.kind) {
      case FeatureKind::kStateProduct:
        g.feature_dx.col(p) =
            f.scale * (y(f.b) * selector_.row(f.a).transpose() +
                       y(f.a) * selector_.row(f.b).transpose());
        break;
      case FeatureKind::kInputProduct:
        g.feature_du(f.a, p) += f.scale * u(f.b);
        g.feature_du(f.b, p) += f.scale * u(f.a);
        break;
      case FeatureKind::kInputAbs:
        g.feature_du(f.a, p) = u(f.a) > 0.0 ? 1.0 : (u(f.a) < 0.0 ? -1.0 : 0.0);
        break;
      case FeatureKind::kFrozenInputForm:
        g.feature_du.col(p) =
            (frozen_input_weight_ + frozen_input_weight_.transpose()) * u;
        break;
    }
    if (f.kind == FeatureKind::kInputAbs && !include_abs) continue;
    g.dx += params_(p) * g.feature_dx.col(p);
    g.du += params_(p) * g.feature_du.col(p);
  }
  return g;
}

CostHessians ParametricCost::Hessians() const {
  CostHessians h{MatrixXd::Zero(state_dim_, state_dim_),
                 MatrixXd::Zero(input_dim_, input_dim_)};
  MatrixXd hy = MatrixXd::Zero(selector_.rows(), selector_.rows());
  for (int p = 0; p < num_params(); ++p) {
    const Feature& f = features_[p];
    const double w = params_(p) * f.scale;
    switch (f.kind) {
      case FeatureKind::kStateProduct:
        hy(f.a, f.b) += w;
        hy(f.b, f.a) += w;
        break;
      case FeatureKind::kInputProduct:
        h.uu(f.a, f.b) += w;
        h.uu(f.b, f.a) += w;
        break;
      case FeatureKind::kFrozenInputForm:
        h.uu += params_(p) *
                (frozen_input_weight_ + frozen_input_weight_.transpose());
        break;
      case FeatureKind::kInputAbs:
        break;
    }
  }
  h.xx = selector_.transpose() * hy * selector_;
  return h;
}

MatrixXd ParametricCost::BlockMatrix(const VectorXd& params,
                                     const ParamBlock& block) const {
  MatrixXd mat = MatrixXd::Zero(block.dim, block.dim);
  for (int k = 0; k < block.count; ++k) {
    const Feature& f = features_[block.offset + k];
    mat(f.a, f.b) = params(block.offset + k);
    mat(f.b, f.a) = params(block.offset + k);
  }
  return mat;
}

void ParametricCost::SetBlockMatrix(const ParamBlock& block,
                                    const MatrixXd& matrix,
                                    VectorXd* params) const {
  for (int k = 0; k < block.count; ++k) {
    const Feature& f = features_[block.offset + k];
    (*params)(block.offset + k) = 0.5 * (matrix(f.a, f.b) + matrix(f.b, f.a));
  }
}

MatrixXd ParametricCost::StateWeight() const {
  return BlockMatrix(params_, *FindBlock(BlockKind::kStateWeight));
}

MatrixXd ParametricCost::InputWeight() const {
  const ParamBlock* block = FindBlock(BlockKind::kInputWeight);
  if (!block) return frozen_input_weight_;
  return BlockMatrix(params_, *block);
}

VectorXd ParametricCost::AbsWeights() const {
  const ParamBlock* block = FindBlock(BlockKind::kAbsWeight);
  if (!block) return VectorXd::Zero(input_dim_);
  return params_.segment(block->offset, block->count);
}

VectorXd ProjectParameters(const ParametricCost& cost, const VectorXd& raw) {
  CheckDimension(raw.size() == cost.num_params(),
                 "project_parameters: size mismatch");
  VectorXd out = raw;
  for (const ParamBlock& block : cost.blocks()) {
    switch (block.kind) {
      case BlockKind::kStateWeight:
      case BlockKind::kInputWeight:
        cost.SetBlockMatrix(block, ProjectPsd(cost.BlockMatrix(raw, block)),
                            &out);
        break;
      case BlockKind::kAbsWeight:
        out.segment(block.offset, block.count) =
            raw.segment(block.offset, block.count).cwiseMax(0.0);
        break;
      case BlockKind::kFrozen:
        break;
    }
  }
  if (cost.normalization() == Normalization::kTrace) {
    const ParamBlock* r_block = cost.FindBlock(BlockKind::kInputWeight);
    const MatrixXd raw_r = cost.BlockMatrix(raw, *r_block);
    const double trace = cost.BlockMatrix(out, *r_block).trace();
    if (raw_r.diagonal().cwiseAbs().maxCoeff() == 0.0 ||
        !(trace > std::numeric_limits<double>::epsilon())) {
      Fail(ErrorCode::kDegenerateNormalization,
           "trace normalization: R has no positive diagonal mass");
    }
    for (int p : cost.FreeParams()) out(p) /= trace;
  }
  return out;
}

double StructuralViolation(const ParametricCost& cost, const VectorXd& params) {
  double worst = std::numeric_limits<double>::infinity();
  for (const ParamBlock& block : cost.blocks()) {
    switch (block.kind) {
      case BlockKind::kStateWeight:
      case BlockKind::kInputWeight:
        worst = std::min(worst, MinEigenvalue(cost.BlockMatrix(params, block)));
        break;
      case BlockKind::kAbsWeight:
        worst = std::min(worst,
                         params.segment(block.offset, block.count).minCoeff());
        break;
      case BlockKind::kFrozen:
        break;
    }
  }
  return worst;
}

std::string BlockName(BlockKind kind) {
  switch (kind) {
    case BlockKind::kStateWeight: return "Q";
    case BlockKind::kInputWeight: return "R";
    case BlockKind::kAbsWeight: return "r";
    case BlockKind::kFrozen: return "frozen";
  }
  return "?";
}

}  // namespace spioc
