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

#ifndef SPIOC_COST_H_
#define SPIOC_COST_H_

#include <string>
#include <vector>

#include "spioc/common.h"

namespace spioc {

// One scalar basis function of (x, u). With y = S x - y_s:
//   kStateProduct:  scale * y_a * y_b
//   kInputProduct:  scale * u_a * u_b
//   kInputAbs:      |u_a|
//   kFrozenInputForm: u^T R0 u with R0 owned by the cost
// Off-diagonal products carry scale 2 so that the weights of a symmetric
// matrix block are its upper-triangle entries.
enum class FeatureKind {
  kStateProduct,
  kInputProduct,
  kInputAbs,
  kFrozenInputForm,
};

struct Feature {
  FeatureKind kind;
  int a = 0;
  int b = 0;
  double scale = 1.0;
};

enum class BlockKind {
  kStateWeight,  // Q, symmetric PSD
  kInputWeight,  // R, symmetric PSD
  kAbsWeight,    // r, elementwise nonnegative
  kFrozen,       // weight fixed at 1
};

struct ParamBlock {
  BlockKind kind;
  int offset = 0;     // first entry in the parameter vector
  int count = 0;      // number of parameters
  int dim = 0;        // matrix dimension for Q/R blocks
  bool diagonal = false;
};

enum class Normalization {
  kFixedFeature,  // scale fixed by frozen features
  kTrace,         // sum_i R_ii = 1
};

enum class InputWeightMode { kFrozen, kFull, kDiagonal };

// construction recipe for a ParametricCost
struct CostSpec {
  MatrixXd selector;            // S, n_y x n
  VectorXd reference;           // y_s, n_y
  MatrixXd state_weight;        // Q
  bool diagonal_state_weight = false;
  InputWeightMode input_mode = InputWeightMode::kFrozen;
  MatrixXd input_weight;        // R (or frozen R0)
  bool abs_input = false;
  VectorXd abs_weight;          // r, one per input
  Normalization normalization = Normalization::kFixedFeature;
};

struct CostGradients {
  VectorXd dx;          // dl/dx
  VectorXd du;          // dl/du
  MatrixXd feature_dx;  // n x P, column p = d phi_p / dx
  MatrixXd feature_du;  // m x P
};

// Stage cost l(x, u; L) = sum_p L_p phi_p(x, u), linear in L.
// constant Hessians of the quadratic features; |u| features add nothing
// away from u = 0
struct CostHessians {
  MatrixXd xx;  // n x n
  MatrixXd uu;  // m x m
};

class ParametricCost {
 public:
  // empty cost with no features; use the factories for real costs
  ParametricCost() = default;

  static ParametricCost Create(const CostSpec& spec);

  // x^T Q x + r |u| + u^2 with the u^2 weight frozen at 1
  static ParametricCost Pendulum(const MatrixXd& Q, double r);
  // x^T Q x + u^T R0 u with R0 frozen
  static ParametricCost Quadratic(const MatrixXd& Q, const MatrixXd& R0);
  // (S x - y_s)^T Q (S x - y_s) + u^T R u, trace(R) = 1
  static ParametricCost Tracking(const MatrixXd& selector,
                                 const VectorXd& reference, const MatrixXd& Q,
                                 const MatrixXd& R, bool diagonal_r = false);

  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  int num_params() const { return static_cast<int>(params_.size()); }

  const VectorXd& params() const { return params_; }
  ParametricCost WithParams(const VectorXd& params) const;

  const std::vector<Feature>& features() const { return features_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  const ParamBlock* FindBlock(BlockKind kind) const;
  Normalization normalization() const { return normalization_; }
  const MatrixXd& selector() const { return selector_; }
  const VectorXd& reference() const { return reference_; }
  const MatrixXd& frozen_input_weight() const { return frozen_input_weight_; }

  bool IsFrozen(int p) const;
  std::vector<int> FreeParams() const;
  bool has_abs_features() const { return FindBlock(BlockKind::kAbsWeight); }

  double Value(const VectorXd& x, const VectorXd& u) const;
  VectorXd FeatureValues(const VectorXd& x, const VectorXd& u) const;
  // |u| features use the sign subgradient, 0 exactly at 0; with
  // include_abs = false they are left out of dx/du (feature columns are
  // always filled)
  CostGradients Gradients(const VectorXd& x, const VectorXd& u,
                          bool include_abs = true) const;

  // structured views of the current parameters
  CostHessians Hessians() const;

  MatrixXd StateWeight() const;
  MatrixXd InputWeight() const;  // frozen R0 when R is not learned
  VectorXd AbsWeights() const;   // zeros when no |u| features

  MatrixXd BlockMatrix(const VectorXd& params, const ParamBlock& block) const;
  void SetBlockMatrix(const ParamBlock& block, const MatrixXd& matrix,
                      VectorXd* params) const;

 private:
  void AddSymmetricBlock(BlockKind kind, FeatureKind feature, int dim,
                         bool diagonal);

  int state_dim_ = 0;
  int input_dim_ = 0;
  MatrixXd selector_;
  VectorXd reference_;
  MatrixXd frozen_input_weight_;
  Normalization normalization_ = Normalization::kFixedFeature;
  std::vector<Feature> features_;
  std::vector<ParamBlock> blocks_;
  VectorXd params_;
};

// Maps raw parameters onto the structural constraint set: Q and R blocks are
// symmetrized and eigen-clipped, |u| weights clipped at zero, then the
// normalization is re-imposed (the trace rule rescales every learned weight
// by 1 / trace(R)). Throws kDegenerateNormalization when the trace rule
// meets an all-zero R diagonal.
VectorXd ProjectParameters(const ParametricCost& cost, const VectorXd& raw);

// minimum eigenvalue over the Q/R blocks (+inf when there are none) and the
// smallest |u| weight
double StructuralViolation(const ParametricCost& cost, const VectorXd& params);

std::string BlockName(BlockKind kind);

}  // namespace spioc

#endif  // SPIOC_COST_H_
