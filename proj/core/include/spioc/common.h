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

#ifndef SPIOC_COMMON_H_
#define SPIOC_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace spioc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// error categories; the command line tool maps these onto exit codes
enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kUnderdetermined,
  kDegenerateNormalization,
  kConfig,
  kIo,
  kNonConvergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void CheckDimension(bool ok, const std::string& what) {
  if (!ok) Fail(ErrorCode::kDimensionMismatch, what);
}

}  // namespace spioc

#endif  // SPIOC_COMMON_H_
