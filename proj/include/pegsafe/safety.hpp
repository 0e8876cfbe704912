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

#ifndef PEGSAFE_SAFETY_HPP_
#define PEGSAFE_SAFETY_HPP_

#include <Eigen/Core>

#include <deque>
#include <string>

#include "pegsafe/env.hpp"

namespace pegsafe::safety {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

enum class SafetyVariant { kDsl, kSliding, kNone };
std::string to_string(SafetyVariant v);
SafetyVariant parse_safety(const std::string& text);

enum class Phase { kProbing, kLimited };
// Which rule produced the current limit.
enum class Branch { kNone, kEdge, kFlat, kShortHistory };
std::string to_string(Phase p);
std::string to_string(Branch b);
Phase parse_phase(const std::string& text);
Branch parse_branch(const std::string& text);

// Lock gains and thresholds. Positions in metres, wrench values normalized.
struct DslParams {
  Vec3 beta1 = Vec3(1e-3, 1e-3, 5e-4);
  Vec3 beta2 = Vec3(1e-7, 1e-7, 1e-3);
  Vec6 delta_f = (Vec6() << 0.15, 0.15, 0.45, 0.1, 0.1, 0.2).finished();
  double probe_increment = 5e-4;  // downward step added while probing
  double contact_threshold = 0.5;
  // Re-probing starts once F_z falls below this and z is back at the limit.
  double release_threshold = 0.25;
  int history = 16;

  void validate() const;
};

struct DslState {
  std::deque<Vec6> r_f;  // normalized wrench records
  std::deque<Vec3> r_p;  // EEF position records, metres
  double z_c = 0.0;
  Phase phase = Phase::kProbing;
  // Logging: rule and increments behind the most recent limit update.
  Branch branch = Branch::kNone;
  Vec3 increments = Vec3::Zero();
  double displacement_norm = 0.0;

  void record(const Vec6& wrench, const Vec3& position, int capacity);
};

struct FilterOutput {
  env::Action action;
  DslState state;
};

// Contact limit from the last two records. Edge contact when any wrench
// component changed by more than delta_f: z_c = z + sum_i beta1_i |dF_i +
// dtau_i|. Otherwise z_c = z + beta2 . |dp|. Updates the logging fields of
// `state`. Throws InsufficientHistory with fewer than two records.
double update_limit(DslState& state, const DslParams& params);

// Lock applied to a proposed action (mm, rad) given the policy observation
// (mm). Only the vertical component is modified.
FilterOutput dsl_filter(const DslState& state, const DslParams& params,
                        const env::Action& proposed, const env::Observation& obs);

// Baseline: probes like the lock until the first contact, then holds the
// height of that contact for the rest of the episode.
FilterOutput sliding_filter(const DslState& state, const DslParams& params,
                            const env::Action& proposed,
                            const env::Observation& obs);

// Dispatches on the variant; kNone passes the action through.
FilterOutput apply_filter(SafetyVariant variant, const DslState& state,
                          const DslParams& params, const env::Action& proposed,
                          const env::Observation& obs);

}  // namespace pegsafe::safety

#endif  // PEGSAFE_SAFETY_HPP_
