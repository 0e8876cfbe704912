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

#include "pegsafe/policy.hpp"

#include <cmath>
#include <numbers>

#include "pegsafe/errors.hpp"

namespace pegsafe::rl {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

MlpLayout make_layout(int in, const std::vector<int>& hidden, int out) {
  MlpLayout l;
  l.sizes.push_back(in);
  l.sizes.insert(l.sizes.end(), hidden.begin(), hidden.end());
  l.sizes.push_back(out);
  return l;
}

}  // namespace

PolicyParams::PolicyParams(Architecture arch)
    : arch_(std::move(arch)),
      actor_(make_layout(arch_.obs_dim, arch_.hidden, arch_.act_dim)),
      critic_(make_layout(arch_.obs_dim, arch_.hidden, 1)) {
  flat_ = Vector::Zero(actor_.num_params() + arch_.act_dim + critic_.num_params());
  limits_ = Vector::Ones(arch_.act_dim);
}

void PolicyParams::clamp_log_std() {
  auto s = log_std();
  s = s.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

void PolicyParams::init(std::uint64_t seed, double init_log_std) {
  std::mt19937_64 rng(seed);
  mlp_init(actor_, flat_.data() + actor_offset(), rng, 0.01);
  log_std().setConstant(init_log_std);
  clamp_log_std();
  mlp_init(critic_, flat_.data() + critic_offset(), rng, 1.0);
}

double gaussian_log_prob(const Vector& mean, const Vector& log_std, const Vector& u) {
  const Vector z = (u - mean).array() * (-log_std.array()).exp();
  return -0.5 * z.squaredNorm() - log_std.sum() - 0.5 * kLog2Pi * static_cast<double>(u.size());
}

double tanh_log_jacobian(const Vector& u) {
  // log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u))
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    s += 2.0 * (std::numbers::ln2 - u(i) - softplus(-2.0 * u(i)));
  }
  return s;
}

double squashed_log_prob(const Vector& mean, const Vector& log_std, const Vector& u) {
  return gaussian_log_prob(mean, log_std, u) - tanh_log_jacobian(u);
}

double gaussian_entropy(const Vector& log_std) {
  return log_std.sum() + 0.5 * (1.0 + kLog2Pi) * static_cast<double>(log_std.size());
}

env::Action squash(const PolicyParams& params, const Vector& u) {
  const Vector a = u.array().tanh() * params.action_limits().array();
  Eigen::Vector4d v = Eigen::Vector4d::Zero();
  for (int i = 0; i < std::min<int>(4, static_cast<int>(a.size())); ++i) v(i) = a(i);
  return env::Action::from_vector(v);
}

ActResult act(const PolicyParams& params, const Vector& obs, std::mt19937_64* rng) {
  MlpCache cache;
  const Matrix& mean = mlp_forward(params.actor_layout(), params.flat().data() + params.actor_offset(),
                                   obs, cache);
  ActResult out;
  out.mean = mean.col(0);
  out.value = value(params, obs);
  const Vector log_std = params.log_std();
  if (!out.mean.allFinite() || !std::isfinite(out.value)) {
    throw NonFiniteOutput("policy network produced a non-finite output");
  }
  out.raw = out.mean;
  if (rng != nullptr) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index i = 0; i < out.raw.size(); ++i) {
      out.raw(i) += std::exp(log_std(i)) * gauss(*rng);
    }
  }
  out.log_prob = squashed_log_prob(out.mean, log_std, out.raw);
  out.action = squash(params, out.raw);
  return out;
}

double value(const PolicyParams& params, const Vector& obs) {
  MlpCache cache;
  const Matrix& v = mlp_forward(params.critic_layout(), params.flat().data() + params.critic_offset(),
                                obs, cache);
  return v(0, 0);
}

ObsNormalizer::ObsNormalizer(int dim, double clip)
    : mean_(Vector::Zero(dim)), var_(Vector::Ones(dim)), clip_(clip) {}

void ObsNormalizer::update(const Matrix& batch) {
  const double n = static_cast<double>(batch.cols());
  if (n == 0.0) return;
  const Vector bmean = batch.rowwise().mean();
  const Vector bvar = (batch.colwise() - bmean).array().square().rowwise().sum() / n;
  if (count_ == 0.0) {
    mean_ = bmean;
    var_ = bvar;
    count_ = n;
    return;
  }
  const double total = count_ + n;
  const Vector delta = bmean - mean_;
  const Vector m2 = var_ * count_ + bvar * n + delta.cwiseProduct(delta) * (count_ * n / total);
  mean_ += delta * (n / total);
  var_ = m2 / total;
  count_ = total;
}

Vector ObsNormalizer::normalize(const Vector& x) const {
  const Vector z = (x - mean_).array() / (var_.array() + 1e-8).sqrt();
  return z.cwiseMax(-clip_).cwiseMin(clip_);
}

void ObsNormalizer::set(const Vector& mean, const Vector& var, double count) {
  mean_ = mean;
  var_ = var;
  count_ = count;
}

}  // namespace pegsafe::rl
