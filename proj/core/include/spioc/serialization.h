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

#ifndef SPIOC_SERIALIZATION_H_
#define SPIOC_SERIALIZATION_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "spioc/candidates.h"
#include "spioc/experiments.h"
#include "spioc/forward_solver.h"
#include "spioc/learner.h"

namespace spioc {

// JSON documents are pretty-printed with two-space indentation and
// shortest round-trip number formatting, so identical inputs give identical
// bytes.

std::string CandidateSetToJson(const CandidateSet& set);
// throws Error(kConfig) on malformed input
CandidateSet CandidateSetFromJson(const std::string& text);

// learned weights, multiplier sums, identified rows, sparse multipliers
// (segment, step, row, value), endpoint multipliers and diagnostics
std::string LearnOutcomeToJson(const LearnOutcome& outcome);

// objective, KKT residuals, iteration counts and solver settings
std::string ForwardSidecarToJson(const ForwardSolution& solution,
                                 const ForwardSettings& settings);

// Plot-ready tables. Columns mirror the figure axes: segment bounds, the
// learned weights, one Lambda column per candidate label, residual and
// errors against the ground truth.
void WriteSweepCsv(std::ostream& out, const SweepReport& report);
// learned vs. finite-horizon baseline errors per segment
void WriteBaselineCsv(std::ostream& out, const SweepReport& report);
void WriteLeaveOneOutCsv(std::ostream& out, const LeaveOneOutReport& report);
void WriteHorizonCsv(std::ostream& out, const std::vector<HorizonRow>& rows);
void WriteNoiseCsv(std::ostream& out, const std::vector<NoiseRow>& rows);

// writes `content` to `path`, creating parent directories; Error(kIo) on
// failure
void WriteTextFile(const std::string& path, const std::string& content);

}  // namespace spioc

#endif  // SPIOC_SERIALIZATION_H_
