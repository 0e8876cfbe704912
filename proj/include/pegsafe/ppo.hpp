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

#ifndef PEGSAFE_PPO_HPP_
#define PEGSAFE_PPO_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "pegsafe/policy.hpp"

namespace pegsafe::rl {

struct PpoConfig {
  std::int64_t total_steps = 500000;
  int horizon = 110;
  int rollout_length = 256;  // steps per environment between updates
  int n_envs = 8;
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  int epochs = 10;
  int minibatch = 64;
  double learning_rate = 3e-4;
  double entropy_coef = 0.0;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  double init_log_std = 0.0;
  std::vector<int> hidden = {64, 64};
  std::uint64_t seed = 1;

  int batch_size() const { return rollout_length * n_envs; }
  void validate() const;
};

// One rollout of `size` transitions, one per column/entry.
struct TrajectoryBuffer {
  Matrix obs;          // normalized, masked observations
  Matrix raw_actions;  // pre-squash samples
  Vector log_probs;
  Vector rewards;
  Vector values;
  Vector dones;        // 1 when the episode ended after this transition
  Vector advantages;
  Vector returns;

  void resize(int obs_dim, int act_dim, int size);
  int size() const { return static_cast<int>(rewards.size()); }
};

// Advantages of one contiguous stream. `next_values(t)` is V(s_{t+1}), used
// only where dones(t) == 0:
//   delta_t = r_t + gamma V(s_{t+1}) (1 - done_t) - V(s_t)
//   A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}
void compute_gae(const Vector& rewards, const Vector& values, const Vector& dones,
                 double bootstrap_value, double gamma, double lambda,
                 Vector& advantages, Vector& returns);

// Zero mean, unit (population) variance.
void normalize_advantages(Vector& advantages);

struct LossTerms {
  double policy = 0.0;   // -mean clipped surrogate
  double value = 0.0;    // mean squared value error
  double entropy = 0.0;  // Gaussian entropy before squashing
  double total = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

// Loss on a minibatch of columns and, when `grad` is non-null, its gradient
// with respect to params.flat():
//   total = -mean(min(rho A, clip(rho) A)) + c_v mean((V - R)^2) - c_e H
LossTerms ppo_loss(const PolicyParams& params, const Matrix& obs, const Matrix& raw_actions,
                   const Vector& old_log_probs, const Vector& advantages,
                   const Vector& returns, const PpoConfig& config, Vector* grad);

class Adam {
 public:
  Adam() = default;
  Adam(int n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(Vector& params, const Vector& grad);

  const Vector& m() const { return m_; }
  const Vector& v() const { return v_; }
  std::int64_t t() const { return t_; }
  void set_state(const Vector& m, const Vector& v, std::int64_t t);

 private:
  double lr_ = 3e-4;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  Vector m_;
  Vector v_;
  std::int64_t t_ = 0;
};

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int minibatches = 0;
};

// Epochs of shuffled minibatch steps on a buffer whose advantages are already
// computed; normalizes the advantages first. Throws NonFiniteGradient with
// the running minibatch index.
UpdateDiagnostics ppo_update(PolicyParams& params, Adam& optimizer, TrajectoryBuffer& buffer,
                             const PpoConfig& config, std::mt19937_64& rng);

}  // namespace pegsafe::rl

#endif  // PEGSAFE_PPO_HPP_
