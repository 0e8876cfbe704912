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

#ifndef PEGSAFE_POLICY_HPP_
#define PEGSAFE_POLICY_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "pegsafe/env.hpp"
#include "pegsafe/mlp.hpp"

namespace pegsafe::rl {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 1.0;

struct Architecture {
  int obs_dim = env::kObsDim;
  int act_dim = env::kActDim;
  std::vector<int> hidden = {64, 64};

  bool operator==(const Architecture&) const = default;
};

// Actor and critic weights plus the state-independent log standard
// deviation, all in one flat vector laid out as [actor | log_std | critic].
class PolicyParams {
 public:
  explicit PolicyParams(Architecture arch = {});

  const Architecture& arch() const { return arch_; }
  const MlpLayout& actor_layout() const { return actor_; }
  const MlpLayout& critic_layout() const { return critic_; }

  Vector& flat() { return flat_; }
  const Vector& flat() const { return flat_; }
  int actor_offset() const { return 0; }
  int log_std_offset() const { return actor_.num_params(); }
  int critic_offset() const { return log_std_offset() + arch_.act_dim; }

  Eigen::Map<const Vector> log_std() const {
    return {flat_.data() + log_std_offset(), arch_.act_dim};
  }
  Eigen::Map<Vector> log_std() { return {flat_.data() + log_std_offset(), arch_.act_dim}; }
  void clamp_log_std();

  // Per-dimension bound applied after tanh squashing.
  Vector& action_limits() { return limits_; }
  const Vector& action_limits() const { return limits_; }

  void init(std::uint64_t seed, double init_log_std = 0.0);

 private:
  Architecture arch_;
  MlpLayout actor_;
  MlpLayout critic_;
  Vector flat_;
  Vector limits_;
};

struct ActResult {
  env::Action action;  // squashed and scaled
  Vector raw;          // pre-squash sample u
  Vector mean;
  double log_prob = 0.0;
  double value = 0.0;
};

// Gaussian log-density of `u` plus the tanh change of variables,
// -sum log(1 - tanh(u)^2), evaluated in a numerically stable form. The
// constant scale factor of the action limits is left out.
double squashed_log_prob(const Vector& mean, const Vector& log_std, const Vector& u);
double gaussian_log_prob(const Vector& mean, const Vector& log_std, const Vector& u);
double tanh_log_jacobian(const Vector& u);
double gaussian_entropy(const Vector& log_std);

// Samples an action for one (normalized, masked) observation. With `rng`
// null the mean action is returned. Throws NonFiniteOutput.
ActResult act(const PolicyParams& params, const Vector& obs, std::mt19937_64* rng);

// Critic only.
double value(const PolicyParams& params, const Vector& obs);

// Squashes a raw sample into an environment action.
env::Action squash(const PolicyParams& params, const Vector& u);

// Running mean and variance of observations (parallel-merge update). The
// normalized vector is clipped to [-clip, clip].
class ObsNormalizer {
 public:
  explicit ObsNormalizer(int dim = env::kObsDim, double clip = 10.0);

  void update(const Matrix& batch);  // one sample per column
  Vector normalize(const Vector& x) const;

  const Vector& mean() const { return mean_; }
  const Vector& var() const { return var_; }
  double count() const { return count_; }
  double clip() const { return clip_; }
  void set(const Vector& mean, const Vector& var, double count);

 private:
  Vector mean_;
  Vector var_;
  double count_ = 0.0;
  double clip_;
};

}  // namespace pegsafe::rl

#endif  // PEGSAFE_POLICY_HPP_
