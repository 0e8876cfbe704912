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

#ifndef PEGSAFE_EXPERIMENT_HPP_
#define PEGSAFE_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pegsafe/catalogue.hpp"
#include "pegsafe/env.hpp"
#include "pegsafe/keyvalue.hpp"
#include "pegsafe/policy.hpp"
#include "pegsafe/ppo.hpp"
#include "pegsafe/reward.hpp"
#include "pegsafe/safety.hpp"

namespace pegsafe::harness {

// Height the reward measures insertion against.
enum class RewardReference { kHoleBottom, kSurface };

struct ExperimentSpec {
  std::string name = "experiment";
  env::ObservationMask model = env::ObservationMask::kVFTM;
  safety::SafetyVariant safety = safety::SafetyVariant::kDsl;
  std::string shape = "tr";
  // Exactly one of these sizes the hole.
  std::optional<double> clearance = 4.0;  // mm of uniform boundary gap
  std::optional<double> gap_proportion;
  std::string catalogue;  // empty: built-in shapes

  env::EnvConfig env;
  reward::RewardParams reward;
  RewardReference reward_reference = RewardReference::kHoleBottom;
  safety::DslParams dsl;
  rl::PpoConfig ppo;

  std::vector<std::uint64_t> seeds = {1};
  int eval_episodes = 500;
  std::int64_t checkpoint_every = 10000;
  int selection_episodes = 32;
  std::uint64_t eval_seed = 20240601;
  int trajectory_samples = 3;
  std::string run_dir;  // empty: $PEGSAFE_RUN_DIR or ./runs

  // The filter actually applied: VM with beta2 = 0 runs without the lock.
  safety::SafetyVariant effective_safety() const;
  rl::Architecture architecture() const;
  // Canonical, fully explicit key-value form; its hash identifies the spec.
  KeyValueConfig resolved() const;
  std::string hash() const;
  // Throws InvalidConfig for inconsistent combinations.
  void validate() const;
};

// Parses a spec; keys not present keep their defaults. Unknown keys are
// rejected. Relative catalogue paths resolve against `base_dir`.
ExperimentSpec spec_from_config(const KeyValueConfig& cfg,
                                const std::filesystem::path& base_dir = {});
ExperimentSpec load_spec(const std::filesystem::path& path);

// Rebuilds peg and hole shapes from shape/clearance/gap_proportion.
void resolve_geometry(ExperimentSpec& spec);

// Root directory for runs: spec.run_dir, else $PEGSAFE_RUN_DIR, else "runs".
std::filesystem::path run_root(const ExperimentSpec& spec);

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);

// Policy-side action source for one episode. `full` shows every slot; a
// controller must only read what its observation model allows, except for
// scripted oracles used in validation.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual env::Action propose(const env::Observation& masked, const env::Observation& full,
                              const env::PegInHoleEnv& env) = 0;
};

// Trained network, mean or sampled actions.
class PolicyController : public Controller {
 public:
  PolicyController(const rl::PolicyParams& params, const rl::ObsNormalizer& normalizer,
                   env::ObservationMask mask, std::mt19937_64* rng);
  env::Action propose(const env::Observation& masked, const env::Observation& full,
                      const env::PegInHoleEnv& env) override;
  const rl::ActResult& last() const { return last_; }

 private:
  const rl::PolicyParams& params_;
  const rl::ObsNormalizer& normalizer_;
  env::ObservationMask mask_;
  std::mt19937_64* rng_;
  rl::ActResult last_;
};

// Normalizes the full observation, then hides the masked slots.
rl::Vector policy_input(const env::Observation& full, const rl::ObsNormalizer& normalizer,
                        env::ObservationMask mask);

// One environment with its safety filter and reward.
class SafeEnv {
 public:
  struct Outcome {
    env::StepResult result;
    env::Action proposed;
    env::Action command;  // after the safety filter
    double reward = 0.0;
    safety::DslState lock;
  };

  explicit SafeEnv(const ExperimentSpec& spec);

  env::Observation reset(std::uint64_t seed);
  Outcome step(const env::Action& proposed);

  const env::PegInHoleEnv& env() const { return env_; }
  env::PegInHoleEnv& env() { return env_; }
  const env::Observation& observation() const { return obs_; }
  const safety::DslState& lock() const { return lock_; }
  double reward_of(const env::EefState& eef, const env::Vec3& p_h) const;

 private:
  safety::SafetyVariant variant_;
  safety::DslParams dsl_;
  reward::RewardParams reward_;
  RewardReference reference_;
  env::PegInHoleEnv env_;
  safety::DslState lock_;
  env::Observation obs_;
};

// Reward reference point in metres for a hole.
env::Vec3 reward_target(const env::HoleTarget& hole, RewardReference ref);

struct StepRecord {
  int step = 0;
  env::Action proposed;
  env::Action command;
  env::EefState eef;
  env::Wrench wrench;
  env::Vec3 p_h_true = env::Vec3::Zero();
  env::Vec3 p_h_obs = env::Vec3::Zero();
  double hole_yaw = 0.0;
  double reward = 0.0;
  bool done = false;
  bool success = false;
  bool estop = false;
  safety::DslState lock;
};

struct EpisodeResult {
  double total_reward = 0.0;
  bool success = false;
  bool estop = false;
  int steps = 0;
  double peak_fz = 0.0;  // largest normalized F_z read by the sensor
  std::vector<StepRecord> records;  // filled when requested; row 0 is reset
};

EpisodeResult run_episode(SafeEnv& env, Controller& controller, std::uint64_t seed,
                          bool keep_records);

// Trajectory CSV: one row per record.
std::vector<std::string> trajectory_columns();
void write_trajectory(const std::filesystem::path& path, const std::vector<StepRecord>& records);

// %.17g formatting for CSV output.
std::string fmt(double v);

}  // namespace pegsafe::harness

#endif  // PEGSAFE_EXPERIMENT_HPP_
