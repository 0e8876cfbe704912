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

#ifndef PEGSAFE_EVALUATE_HPP_
#define PEGSAFE_EVALUATE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pegsafe/checkpoint.hpp"
#include "pegsafe/experiment.hpp"

namespace pegsafe::harness {

struct EpisodeSummary {
  int index = 0;
  std::uint64_t seed = 0;
  double reward = 0.0;
  bool success = false;
  bool estop = false;
  int steps = 0;
  double peak_fz = 0.0;
};

struct EvalReport {
  std::string model;
  std::string safety;
  std::string shape;
  double clearance = 0.0;       // mm
  double gap_proportion = 0.0;  // of the resolved hole
  int episodes = 0;
  double reward_mean = 0.0;
  double reward_var = 0.0;  // population variance
  double success_mean = 0.0;
  double success_var = 0.0;
  double peak_fz = 0.0;  // max over episodes
  double estop_rate = 0.0;
  std::string spec_hash;
  std::string checkpoint_id;
  std::vector<EpisodeSummary> records;
};

// Deterministic (mean-action) episodes; episode i uses derive_seed(seed_root, i).
EvalReport evaluate_policy(const ExperimentSpec& spec, const rl::PolicyParams& params,
                           const rl::ObsNormalizer& normalizer, int episodes,
                           std::uint64_t seed_root);

// Loads a checkpoint and runs spec.eval_episodes from spec.eval_seed. Throws
// IncompatibleCheckpoint when the network or observation model differ.
EvalReport evaluate(const std::filesystem::path& checkpoint, const ExperimentSpec& spec);

// "<file name>@<content hash>"
std::string checkpoint_identity(const std::filesystem::path& checkpoint);

std::vector<std::string> summary_columns();
std::string summary_row(const EvalReport& report);

// <dir>/episodes.csv and <dir>/summary.csv.
void write_eval_outputs(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace pegsafe::harness

#endif  // PEGSAFE_EVALUATE_HPP_
