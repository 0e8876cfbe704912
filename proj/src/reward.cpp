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

#include "pegsafe/reward.hpp"

#include <cctype>
#include <cmath>

#include "pegsafe/errors.hpp"

namespace pegsafe::reward {

std::string to_string(DistanceSign sign) {
  return sign == DistanceSign::kNegative ? "negative" : "as_written";
}

DistanceSign parse_distance_sign(const std::string& text) {
  std::string s;
  for (char c : text) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "negative") return DistanceSign::kNegative;
  if (s == "as_written" || s == "aswritten") return DistanceSign::kAsWritten;
  throw InvalidConfig("unknown distance_sign '" + text + "'");
}

void RewardParams::validate() const {
  if (!(delta1 > 0.0 && delta2 > delta1)) {
    throw InvalidConfig("reward thresholds need delta2 > delta1 > 0");
  }
  if (!alpha.allFinite()) throw InvalidConfig("reward weights must be finite");
}

double z_dist(const Vec3& p_ee, const Vec3& p_h, const RewardParams& params) {
  if ((p_ee - p_h).norm() < params.delta2) return p_h.z() - p_ee.z();
  return 0.0;
}

double reward(const Vec3& p_ee, const Vec3& p_h, const RewardParams& params) {
  const Vec3 e = p_ee - p_h;
  const auto& a = params.alpha;
  const double dist =
      std::sqrt(a(0) * e.x() * e.x() + a(1) * e.y() * e.y() + a(2) * e.z() * e.z());
  const double sign = params.distance_sign == DistanceSign::kNegative ? -1.0 : 1.0;
  const double arrived = e.norm() < params.delta1 ? 1.0 : 0.0;
  return sign * dist + a(3) * arrived + a(4) * z_dist(p_ee, p_h, params);
}

}  // namespace pegsafe::reward
