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

#ifndef PEGSAFE_REWARD_HPP_
#define PEGSAFE_REWARD_HPP_

#include <Eigen/Core>

#include <string>

namespace pegsafe::reward {

using Vec3 = Eigen::Vector3d;

enum class DistanceSign { kNegative, kAsWritten };
std::string to_string(DistanceSign sign);
DistanceSign parse_distance_sign(const std::string& text);

// Weights and thresholds of the per-step reward. Positions are in metres.
struct RewardParams {
  // x, y, z distance weights, arrival bonus, insertion-depth bonus.
  Eigen::Matrix<double, 5, 1> alpha =
      (Eigen::Matrix<double, 5, 1>() << 2.30, 2.30, 1.23, 2.0, 0.5).finished();
  double delta1 = 1e-4;  // arrival radius
  double delta2 = 0.01;  // depth-bonus radius
  DistanceSign distance_sign = DistanceSign::kNegative;

  // Throws InvalidConfig unless delta2 > delta1 > 0.
  void validate() const;
};

// Height of the EEF below the hole datum, z_h - z_ee, while within delta2 of
// the hole; zero elsewhere.
double z_dist(const Vec3& p_ee, const Vec3& p_h, const RewardParams& params);

// Weighted distance term, arrival indicator and depth bonus.
double reward(const Vec3& p_ee, const Vec3& p_h, const RewardParams& params);

}  // namespace pegsafe::reward

#endif  // PEGSAFE_REWARD_HPP_
