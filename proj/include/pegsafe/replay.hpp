// Copyright 2026 The pegsafe Authors
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

#ifndef PEGSAFE_REPLAY_HPP_
#define PEGSAFE_REPLAY_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pegsafe/experiment.hpp"

namespace pegsafe::harness {

// A trajectory CSV held as text cells, with typed accessors.
class TrajectoryTable {
 public:
  // Throws SchemaMismatch if the header differs from trajectory_columns() or
  // a row has the wrong width.
  static TrajectoryTable read(const std::filesystem::path& path);
  static TrajectoryTable parse(const std::string& text);

  int rows() const { return static_cast<int>(cells_.size()); }
  const std::string& text(int row, const std::string& column) const;
  // Throws SchemaMismatch on a cell that is not a number.
  double number(int row, const std::string& column) const;

 private:
  std::map<std::string, int> index_;
  std::vector<std::vector<std::string>> cells_;
};

struct ReplaySummary {
  int steps = 0;
  double total_reward = 0.0;
  bool success = false;
  bool estop = false;
  double deepest_z = 0.0;  // lowest p_ee z, mm
  double peak_fz = 0.0;    // largest normalized F_z
  int limited_steps = 0;   // steps spent with the lock engaged
  std::string text;        // human-readable report
  std::string svg;         // depth and force against step
};

// Recomputes each step's safety command, lock state, reward and success from
// the logged states and the spec, and compares with the logged values
// (tolerance 1e-12). Throws ReplayDivergence at the first mismatch.
ReplaySummary replay(const TrajectoryTable& table, const ExperimentSpec& spec);

// Spec next to the log: config.resolved in the CSV's directory or its parent.
std::filesystem::path find_run_config(const std::filesystem::path& csv);

}  // namespace pegsafe::harness

#endif  // PEGSAFE_REPLAY_HPP_
