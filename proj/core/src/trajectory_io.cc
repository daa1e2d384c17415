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

#include "spioc/trajectory_io.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace spioc {
namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double ParseCell(const std::string& cell, int line_number) {
  const std::string text = Trim(cell);
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(text.c_str(), &end);
  // underflow to a subnormal still parses exactly; only overflow is an error
  const bool overflow = errno == ERANGE && std::isinf(value);
  if (text.empty() || end != text.c_str() + text.size() || overflow) {
    std::ostringstream msg;
    msg << "trajectory csv: bad number '" << text << "' on line "
        << line_number;
    Fail(ErrorCode::kIo, msg.str());
  }
  return value;
}

}  // namespace

std::string FormatDouble(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& traj) {
  traj.Validate();
  const int n = traj.state_dim();
  const int m = traj.horizon() > 0
                    ? traj.input_dim()
                    : 0;
  out << "t";
  for (int k = 0; k < n; ++k) out << ",x" << (k + 1);
  for (int k = 0; k < m; ++k) out << ",u" << (k + 1);
  out << "\n";
  for (int i = 0; i <= traj.horizon(); ++i) {
    out << FormatDouble(traj.time(i));
    for (int k = 0; k < n; ++k) out << "," << FormatDouble(traj.states[i](k));
    for (int k = 0; k < m; ++k) {
      out << ",";
      if (i < traj.horizon()) out << FormatDouble(traj.inputs[i](k));
    }
    out << "\n";
  }
}

Trajectory ReadTrajectoryCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kIo, "trajectory csv: empty");
  const std::vector<std::string> header = SplitCsvLine(line);
  int n = 0, m = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string name = Trim(header[c]);
    if (!name.empty() && name[0] == 'x') ++n;
    else if (!name.empty() && name[0] == 'u') ++m;
    else Fail(ErrorCode::kIo, "trajectory csv: unexpected column " + name);
  }
  if (header.empty() || Trim(header[0]) != "t" || n == 0) {
    Fail(ErrorCode::kIo, "trajectory csv: header must be t,x1..xn,u1..um");
  }

  std::vector<double> times;
  Trajectory traj;
  int line_number = 1;
  bool ended = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    if (ended) Fail(ErrorCode::kIo, "trajectory csv: rows after final state");
    std::vector<std::string> cells = SplitCsvLine(line);
    cells.resize(1 + n + m);
    times.push_back(ParseCell(cells[0], line_number));
    VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = ParseCell(cells[1 + k], line_number);
    traj.states.push_back(x);
    bool empty_inputs = true;
    for (int k = 0; k < m; ++k) {
      if (!Trim(cells[1 + n + k]).empty()) empty_inputs = false;
    }
    if (empty_inputs && m > 0) {
      ended = true;
      continue;
    }
    VectorXd u(m);
    for (int k = 0; k < m; ++k) u(k) = ParseCell(cells[1 + n + k], line_number);
    traj.inputs.push_back(u);
  }
  if (traj.states.empty()) Fail(ErrorCode::kIo, "trajectory csv: no rows");
  if (m > 0 && !ended) {
    Fail(ErrorCode::kIo, "trajectory csv: final row must have empty inputs");
  }
  if (times.size() >= 2) {
    // time stamps are k * T_s; recover T_s at 12 significant digits so the
    // written time column reproduces exactly
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", times[1] - times[0]);
    traj.sampling_period = std::strtod(buffer, nullptr);
    traj.start_index =
        static_cast<int>(std::lround(times[0] / traj.sampling_period));
  }
  traj.Validate();
  return traj;
}

void SaveTrajectoryCsv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot open " + path + " for writing");
  WriteTrajectoryCsv(out, traj);
  if (!out) Fail(ErrorCode::kIo, "failed writing " + path);
}

Trajectory LoadTrajectoryCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  return ReadTrajectoryCsv(in);
}

}  // namespace spioc
