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

#include <cmath>

#include "pegsafe/ppo.hpp"

namespace pegsafe::rl {

void compute_gae(const Vector& rewards, const Vector& values, const Vector& dones,
                 double bootstrap_value, double gamma, double lambda,
                 Vector& advantages, Vector& returns) {
  const Eigen::Index n = rewards.size();
  advantages.resize(n);
  returns.resize(n);
  double next_adv = 0.0;
  double next_value = bootstrap_value;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double live = 1.0 - dones(t);
    const double delta = rewards(t) + gamma * next_value * live - values(t);
    next_adv = delta + gamma * lambda * live * next_adv;
    advantages(t) = next_adv;
    next_value = values(t);
  }
  returns = advantages + values;
}

void normalize_advantages(Vector& advantages) {
  const Eigen::Index n = advantages.size();
  if (n == 0) return;
  const double mean = advantages.mean();
  advantages.array() -= mean;
  const double stdev = std::sqrt(advantages.squaredNorm() / static_cast<double>(n));
  advantages /= stdev + 1e-12;
}

}  // namespace pegsafe::rl
