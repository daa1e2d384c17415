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

#ifndef SPIOC_SRC_JSON_UTIL_H_
#define SPIOC_SRC_JSON_UTIL_H_

// JSON conversions shared by the config parser and the serialization
// helpers; not part of the installed interface

#include <string>

#include "json.hpp"
#include "spioc/candidates.h"
#include "spioc/common.h"

namespace spioc::internal {

using Json = nlohmann::ordered_json;

// all conversion errors are reported as Error(kConfig) naming `what`
VectorXd ToVector(const Json& j, const std::string& what);
// nested row arrays; a bare number becomes a 1 x 1 matrix
MatrixXd ToMatrix(const Json& j, const std::string& what);
Json FromVector(const VectorXd& v);
Json FromMatrix(const MatrixXd& m);

SignalSpec ToSignal(const Json& j, const std::string& what);
Json FromSignal(const SignalSpec& spec);
CandidateRow ToRow(const Json& j, const std::string& what);
Json FromRow(const CandidateRow& row);
CandidateSet ToCandidateSet(const Json& j, const std::string& what);
Json FromCandidateSet(const CandidateSet& set);

// typed field access with a default when the key is absent
template <typename T>
T Get(const Json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("config: field '") + key +
                                 "' has the wrong type (" + e.what() + ")");
  }
}

const Json& Require(const Json& j, const char* key, const std::string& where);

}  // namespace spioc::internal

#endif  // SPIOC_SRC_JSON_UTIL_H_
