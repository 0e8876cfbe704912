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

#ifndef PEGSAFE_TRAINER_HPP_
#define PEGSAFE_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "pegsafe/experiment.hpp"

namespace pegsafe::harness {

struct CheckpointScore {
  std::filesystem::path path;
  std::int64_t step = 0;
  double success_rate = 0.0;
  double mean_reward = 0.0;
};

struct TrainResult {
  std::uint64_t seed = 0;
  std::filesystem::path run_dir;
  std::filesystem::path best_checkpoint;
  std::int64_t steps = 0;
  bool resumed = false;
  std::vector<CheckpointScore> scores;
  CheckpointScore best;
};

// Progress callback: (update, steps, mean episode reward, success rate).
using ProgressFn = std::function<void(std::int64_t, std::int64_t, double, double)>;

// run_root(spec) / name / seed_<seed>
std::filesystem::path seed_run_dir(const ExperimentSpec& spec, std::uint64_t seed);

// One seed. Picks up from the newest checkpoint in `run_dir` written for the
// same spec and seed; throws InvalidConfig if the directory belongs to a
// different spec.
TrainResult train_one(const ExperimentSpec& spec, std::uint64_t seed,
                      const std::filesystem::path& run_dir,
                      const ProgressFn& progress = nullptr);

// Every seed of the spec, each in its own directory.
std::vector<TrainResult> train(const ExperimentSpec& spec, const ProgressFn& progress = nullptr);

// Checkpoint file for a step threshold: checkpoints/ckpt_<step>.ckpt.
std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir, std::int64_t step);

std::vector<std::string> metrics_columns();

}  // namespace pegsafe::harness

#endif  // PEGSAFE_TRAINER_HPP_
