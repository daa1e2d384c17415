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

#ifndef SPIOC_TRAJECTORY_IO_H_
#define SPIOC_TRAJECTORY_IO_H_

#include <iosfwd>
#include <string>

#include "spioc/rollout.h"

namespace spioc {

// CSV layout: header "t,x1..xn,u1..um", one row per state sample, values
// printed with 17 significant digits; the last row leaves the input cells
// empty. Reading back a written file reproduces every value bit for bit.
void WriteTrajectoryCsv(std::ostream& out, const Trajectory& traj);
Trajectory ReadTrajectoryCsv(std::istream& in);

void SaveTrajectoryCsv(const std::string& path, const Trajectory& traj);
Trajectory LoadTrajectoryCsv(const std::string& path);

// 17-significant-digit decimal form used across CSV outputs
std::string FormatDouble(double value);

}  // namespace spioc

#endif  // SPIOC_TRAJECTORY_IO_H_
