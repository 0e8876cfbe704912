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

#include "pegsafe/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pegsafe/errors.hpp"

namespace pegsafe::rl {

void PpoConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidConfig(what);
  };
  require(rollout_length >= 1 && n_envs >= 1, "rollout length and env count must be positive");
  require(total_steps >= batch_size(), "total_steps must cover at least one rollout");
  require(horizon >= 1, "horizon must be positive");
  require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
  require(clip > 0.0 && clip < 1.0, "clip must lie in (0, 1)");
  require(epochs >= 1 && minibatch >= 1, "epochs and minibatch must be positive");
  require(learning_rate > 0.0, "learning rate must be positive");
  require(entropy_coef >= 0.0 && value_coef >= 0.0, "loss coefficients must be non-negative");
  require(max_grad_norm >= 0.0, "max_grad_norm must be non-negative");
  require(!hidden.empty(), "need at least one hidden layer");
  for (int h : hidden) require(h >= 1, "hidden sizes must be positive");
}

void TrajectoryBuffer::resize(int obs_dim, int act_dim, int size) {
  obs.setZero(obs_dim, size);
  raw_actions.setZero(act_dim, size);
  log_probs.setZero(size);
  rewards.setZero(size);
  values.setZero(size);
  dones.setZero(size);
  advantages.setZero(size);
  returns.setZero(size);
}

LossTerms ppo_loss(const PolicyParams& params, const Matrix& obs, const Matrix& raw_actions,
                   const Vector& old_log_probs, const Vector& advantages,
                   const Vector& returns, const PpoConfig& config, Vector* grad) {
  const Eigen::Index batch = obs.cols();
  const double inv_b = 1.0 / static_cast<double>(batch);
  const int act_dim = params.arch().act_dim;
  const double* flat = params.flat().data();

  MlpCache actor_cache;
  MlpCache critic_cache;
  const Matrix& mean =
      mlp_forward(params.actor_layout(), flat + params.actor_offset(), obs, actor_cache);
  const Matrix& v =
      mlp_forward(params.critic_layout(), flat + params.critic_offset(), obs, critic_cache);
  const Vector log_std = params.log_std();
  const Vector inv_std = (-log_std.array()).exp();

  LossTerms out;
  Matrix grad_mean(act_dim, batch);
  Vector grad_log_std = Vector::Zero(act_dim);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const Vector u = raw_actions.col(j);
    const Vector z = (u - mean.col(j)).cwiseProduct(inv_std);
    const double logp = squashed_log_prob(mean.col(j), log_std, u);
    const double ratio = std::exp(logp - old_log_probs(j));
    const double a = advantages(j);
    const double clipped = std::clamp(ratio, 1.0 - config.clip, 1.0 + config.clip);
    const double s1 = ratio * a;
    const double s2 = clipped * a;
    out.policy -= std::min(s1, s2) * inv_b;
    if (std::abs(ratio - 1.0) > config.clip) out.clip_fraction += inv_b;
    out.approx_kl += ((ratio - 1.0) - (logp - old_log_probs(j))) * inv_b;
    // d(-min)/d logp; the clipped branch carries no gradient.
    const double g = s1 <= s2 ? -a * ratio * inv_b : 0.0;
    grad_mean.col(j) = g * z.cwiseProduct(inv_std);
    grad_log_std.array() += g * (z.array().square() - 1.0);
  }
  const Vector verr = v.row(0).transpose() - returns;
  out.value = verr.squaredNorm() * inv_b;
  out.entropy = gaussian_entropy(log_std);
  out.total = out.policy + config.value_coef * out.value - config.entropy_coef * out.entropy;

  if (grad != nullptr) {
    grad->setZero(params.flat().size());
    mlp_backward(params.actor_layout(), flat + params.actor_offset(), actor_cache, grad_mean,
                 grad->data() + params.actor_offset());
    grad->segment(params.log_std_offset(), act_dim) =
        grad_log_std.array() - config.entropy_coef;
    const Matrix grad_v = (2.0 * config.value_coef * inv_b) * verr.transpose();
    mlp_backward(params.critic_layout(), flat + params.critic_offset(), critic_cache, grad_v,
                 grad->data() + params.critic_offset());
  }
  return out;
}

Adam::Adam(int n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(Vector::Zero(n)), v_(Vector::Zero(n)) {}

void Adam::step(Vector& params, const Vector& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

void Adam::set_state(const Vector& m, const Vector& v, std::int64_t t) {
  m_ = m;
  v_ = v;
  t_ = t;
}

UpdateDiagnostics ppo_update(PolicyParams& params, Adam& optimizer, TrajectoryBuffer& buffer,
                             const PpoConfig& config, std::mt19937_64& rng) {
  normalize_advantages(buffer.advantages);
  const int n = buffer.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  Vector grad;
  UpdateDiagnostics diag;
  int minibatch_index = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += config.minibatch) {
      const int m = std::min(config.minibatch, n - start);
      Matrix obs(buffer.obs.rows(), m);
      Matrix raw(buffer.raw_actions.rows(), m);
      Vector old_lp(m), adv(m), ret(m);
      for (int k = 0; k < m; ++k) {
        const int i = order[static_cast<std::size_t>(start + k)];
        obs.col(k) = buffer.obs.col(i);
        raw.col(k) = buffer.raw_actions.col(i);
        old_lp(k) = buffer.log_probs(i);
        adv(k) = buffer.advantages(i);
        ret(k) = buffer.returns(i);
      }
      const LossTerms loss = ppo_loss(params, obs, raw, old_lp, adv, ret, config, &grad);
      if (!grad.allFinite() || !std::isfinite(loss.total)) {
        throw NonFiniteGradient(minibatch_index);
      }
      const double norm = grad.norm();
      if (config.max_grad_norm > 0.0 && norm > config.max_grad_norm) {
        grad *= config.max_grad_norm / norm;
      }
      optimizer.step(params.flat(), grad);
      params.clamp_log_std();

      diag.policy_loss += loss.policy;
      diag.value_loss += loss.value;
      diag.entropy += loss.entropy;
      diag.clip_fraction += loss.clip_fraction;
      diag.approx_kl += loss.approx_kl;
      ++minibatch_index;
    }
  }
  diag.minibatches = minibatch_index;
  if (minibatch_index > 0) {
    const double inv = 1.0 / minibatch_index;
    diag.policy_loss *= inv;
    diag.value_loss *= inv;
    diag.entropy *= inv;
    diag.clip_fraction *= inv;
    diag.approx_kl *= inv;
  }
  return diag;
}

}  // namespace pegsafe::rl
