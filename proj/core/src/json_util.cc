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

#include "json_util.h"

#include <vector>

namespace spioc::internal {
namespace {

[[noreturn]] void Bad(const std::string& what, const std::string& detail) {
  Fail(ErrorCode::kConfig, "config: " + what + ": " + detail);
}

double ToNumber(const Json& j, const std::string& what) {
  if (!j.is_number()) Bad(what, "expected a number");
  return j.get<double>();
}

}  // namespace

VectorXd ToVector(const Json& j, const std::string& what) {
  if (j.is_number()) return VectorXd::Constant(1, j.get<double>());
  if (!j.is_array()) Bad(what, "expected an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = ToNumber(j[i], what);
  }
  return v;
}

MatrixXd ToMatrix(const Json& j, const std::string& what) {
  if (j.is_number()) return MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) Bad(what, "expected an array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) Bad(what, "expected an array of rows");
  const std::size_t cols = j[0].size();
  MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) Bad(what, "ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          ToNumber(j[r][c], what);
    }
  }
  return m;
}

Json FromVector(const VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json FromMatrix(const MatrixXd& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    j.push_back(FromVector(m.row(r).transpose()));
  }
  return j;
}

SignalSpec ToSignal(const Json& j, const std::string& what) {
  if (!j.is_object()) Bad(what, "expected {\"kind\", \"index\"}");
  const std::string kind = Get<std::string>(j, "kind", "");
  SignalSpec spec;
  if (kind == "state") {
    spec.kind = SignalKind::kState;
  } else if (kind == "input") {
    spec.kind = SignalKind::kInput;
  } else if (kind == "input_rate") {
    spec.kind = SignalKind::kInputRate;
  } else {
    Bad(what, "signal kind must be state, input or input_rate");
  }
  spec.index = Get<int>(j, "index", -1);
  if (spec.index < 0) Bad(what, "signal index must be >= 0");
  return spec;
}

Json FromSignal(const SignalSpec& spec) {
  const char* kind = spec.kind == SignalKind::kState   ? "state"
                     : spec.kind == SignalKind::kInput ? "input"
                                                       : "input_rate";
  return Json{{"kind", kind}, {"index", spec.index}};
}

CandidateRow ToRow(const Json& j, const std::string& what) {
  if (!j.is_object()) Bad(what, "expected a constraint row object");
  CandidateRow row;
  const Json& signals = Require(j, "signals", what);
  if (!signals.is_array() || signals.empty()) {
    Bad(what, "signals must be a non-empty array");
  }
  for (const Json& s : signals) row.signals.push_back(ToSignal(s, what));
  row.normal = ToVector(Require(j, "normal", what), what + ".normal");
  if (row.normal.size() != static_cast<Eigen::Index>(row.signals.size())) {
    Bad(what, "normal needs one entry per signal");
  }
  row.offset = ToNumber(Require(j, "offset", what), what + ".offset");
  row.label = Get<std::string>(j, "label", "");
  if (row.label.empty()) {
    for (std::size_t k = 0; k < row.signals.size(); ++k) {
      if (k > 0) row.label += ",";
      row.label += SignalLabel(row.signals[k]);
    }
    row.label += " row";
  }
  return row;
}

Json FromRow(const CandidateRow& row) {
  Json signals = Json::array();
  for (const SignalSpec& s : row.signals) signals.push_back(FromSignal(s));
  return Json{{"label", row.label},
              {"signals", signals},
              {"normal", FromVector(row.normal)},
              {"offset", row.offset}};
}

CandidateSet ToCandidateSet(const Json& j, const std::string& what) {
  CandidateSet set;
  const Json* rows = &j;
  if (j.is_object()) {
    set.activity_tolerance =
        Get<double>(j, "activity_tolerance", set.activity_tolerance);
    set.degenerate_hull_fallback =
        Get<bool>(j, "degenerate_hull_fallback", false);
    rows = &Require(j, "rows", what);
  }
  if (!rows->is_array()) Bad(what, "rows must be an array");
  for (std::size_t k = 0; k < rows->size(); ++k) {
    set.rows.push_back(
        ToRow((*rows)[k], what + "[" + std::to_string(k) + "]"));
  }
  return set;
}

Json FromCandidateSet(const CandidateSet& set) {
  Json rows = Json::array();
  for (const CandidateRow& row : set.rows) rows.push_back(FromRow(row));
  return Json{{"activity_tolerance", set.activity_tolerance},
              {"degenerate_hull_fallback", set.degenerate_hull_fallback},
              {"rows", rows}};
}

const Json& Require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    Bad(where, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

}  // namespace spioc::internal
