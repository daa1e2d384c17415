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

#ifndef SPIOC_TOOLS_COMMANDS_H_
#define SPIOC_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spioc::cli {

enum ExitCode {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitIo = 4,
};

struct CommandOptions {
  std::string command;  // generate | learn | sweep | eval | baseline
  std::string config_path;
  std::optional<std::pair<double, double>> segment;
  bool no_candidates = false;
  bool finite_horizon = false;
  std::optional<double> threshold;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> data_paths;  // measured trajectories (CSV)
  bool noise = false;                   // eval: add the noise study
  int threads = 1;
};

// runs one command; errors are reported on `err` and mapped onto exit codes
int RunCommand(const CommandOptions& options, std::ostream& out,
               std::ostream& err);

// parses argv and runs the command
int Main(int argc, char** argv);

}  // namespace spioc::cli

#endif  // SPIOC_TOOLS_COMMANDS_H_
