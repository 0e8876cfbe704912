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

#include "pegsafe/safety.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "pegsafe/errors.hpp"

namespace pegsafe::safety {

namespace {

constexpr double kMmPerM = 1000.0;
// Height tolerance (m) for "back at the limit".
constexpr double kLimitTol = 1e-9;

std::string lower(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void check_wrench(const env::Observation& obs) {
  if (obs.mask == env::ObservationMask::kVM) {
    throw MissingWrench("safety filter needs the wrench but the observation hides it");
  }
}

env::Action probe(const env::Action& proposed, const DslParams& params) {
  env::Action out = proposed;
  out.delta.z() -= params.probe_increment * kMmPerM;
  return out;
}

env::Action hold_above(const env::Action& proposed, double z_limit, double z) {
  env::Action out = proposed;
  out.delta.z() = std::max(proposed.delta.z(), (z_limit - z) * kMmPerM);
  return out;
}

}  // namespace

std::string to_string(SafetyVariant v) {
  switch (v) {
    case SafetyVariant::kDsl:
      return "DSL";
    case SafetyVariant::kSliding:
      return "Sliding";
    case SafetyVariant::kNone:
      return "None";
  }
  return "?";
}

SafetyVariant parse_safety(const std::string& text) {
  const std::string s = lower(text);
  if (s == "dsl") return SafetyVariant::kDsl;
  if (s == "sliding") return SafetyVariant::kSliding;
  if (s == "none") return SafetyVariant::kNone;
  throw InvalidConfig("unknown safety variant '" + text + "'");
}

std::string to_string(Phase p) { return p == Phase::kProbing ? "probing" : "limited"; }

std::string to_string(Branch b) {
  switch (b) {
    case Branch::kNone:
      return "none";
    case Branch::kEdge:
      return "edge";
    case Branch::kFlat:
      return "flat";
    case Branch::kShortHistory:
      return "short";
  }
  return "?";
}

Phase parse_phase(const std::string& text) {
  if (text == "probing") return Phase::kProbing;
  if (text == "limited") return Phase::kLimited;
  throw SchemaMismatch("unknown phase '" + text + "'");
}

Branch parse_branch(const std::string& text) {
  if (text == "none") return Branch::kNone;
  if (text == "edge") return Branch::kEdge;
  if (text == "flat") return Branch::kFlat;
  if (text == "short") return Branch::kShortHistory;
  throw SchemaMismatch("unknown branch '" + text + "'");
}

void DslParams::validate() const {
  if ((beta1.array() < 0.0).any() || (beta2.array() < 0.0).any()) {
    throw InvalidConfig("lock gains must be non-negative");
  }
  if (!(delta_f.array() > 0.0).all()) throw InvalidConfig("delta_f must be positive");
  if (!(contact_threshold > 0.0 && contact_threshold < 1.0)) {
    throw InvalidConfig("contact threshold must lie in (0, 1)");
  }
  if (!(release_threshold >= 0.0 && release_threshold <= contact_threshold)) {
    throw InvalidConfig("release threshold must lie in [0, contact threshold]");
  }
  if (!(probe_increment >= 0.0)) throw InvalidConfig("probe increment must be non-negative");
  if (history < 2) throw InvalidConfig("history must hold at least 2 records");
}

void DslState::record(const Vec6& wrench, const Vec3& position, int capacity) {
  r_f.push_back(wrench);
  r_p.push_back(position);
  while (static_cast<int>(r_f.size()) > capacity) {
    r_f.pop_front();
    r_p.pop_front();
  }
}

double update_limit(DslState& state, const DslParams& params) {
  const std::size_t n = state.r_f.size();
  if (n < 2 || state.r_p.size() < 2) {
    throw InsufficientHistory("limit update needs two records, have " + std::to_string(n));
  }
  const Vec6 df = state.r_f[n - 1] - state.r_f[n - 2];
  const Vec3& p_last = state.r_p[n - 1];
  const Vec3 dp = p_last - state.r_p[n - 2];
  state.displacement_norm = dp.norm();

  bool edge = false;
  for (int i = 0; i < 6; ++i) edge = edge || std::abs(df(i)) > params.delta_f(i);
  if (edge) {
    for (int i = 0; i < 3; ++i) {
      state.increments(i) = params.beta1(i) * std::abs(df(i) + df(3 + i));
    }
    state.branch = Branch::kEdge;
  } else {
    state.increments = params.beta2.cwiseProduct(dp.cwiseAbs());
    state.branch = Branch::kFlat;
  }
  state.z_c = p_last.z() + state.increments.sum();
  return state.z_c;
}

FilterOutput dsl_filter(const DslState& state, const DslParams& params,
                        const env::Action& proposed, const env::Observation& obs) {
  check_wrench(obs);
  FilterOutput out{proposed, state};
  DslState& s = out.state;
  const double fz = obs.wrench_normalized(2);
  const Vec3 pos = obs.p_ee / kMmPerM;

  if (s.phase == Phase::kLimited) {
    if (fz < params.release_threshold && pos.z() >= s.z_c - kLimitTol) {
      s.phase = Phase::kProbing;
    } else {
      out.action = hold_above(proposed, s.z_c, pos.z());
      return out;
    }
  }

  if (fz < params.contact_threshold) {
    s.record(obs.wrench_normalized, pos, params.history);
    out.action = probe(proposed, params);
    return out;
  }

  // Contact: lock at the limit derived from the records before this reading.
  if (s.r_p.size() >= 2) {
    update_limit(s, params);
  } else {
    s.branch = Branch::kShortHistory;
    s.increments.setZero();
    s.displacement_norm = 0.0;
    s.z_c = s.r_p.empty() ? pos.z() : s.r_p.back().z();
  }
  s.phase = Phase::kLimited;
  out.action = hold_above(proposed, s.z_c, pos.z());
  return out;
}

FilterOutput sliding_filter(const DslState& state, const DslParams& params,
                            const env::Action& proposed, const env::Observation& obs) {
  check_wrench(obs);
  FilterOutput out{proposed, state};
  DslState& s = out.state;
  const double z = obs.p_ee.z() / kMmPerM;
  if (s.phase == Phase::kProbing && obs.wrench_normalized(2) < params.contact_threshold) {
    s.record(obs.wrench_normalized, obs.p_ee / kMmPerM, params.history);
    out.action = probe(proposed, params);
    return out;
  }
  if (s.phase == Phase::kProbing) {
    s.phase = Phase::kLimited;
    s.z_c = z;
    s.branch = Branch::kNone;
  }
  out.action.delta.z() = (s.z_c - z) * kMmPerM;
  return out;
}

FilterOutput apply_filter(SafetyVariant variant, const DslState& state,
                          const DslParams& params, const env::Action& proposed,
                          const env::Observation& obs) {
  switch (variant) {
    case SafetyVariant::kDsl:
      return dsl_filter(state, params, proposed, obs);
    case SafetyVariant::kSliding:
      return sliding_filter(state, params, proposed, obs);
    case SafetyVariant::kNone:
      break;
  }
  return {proposed, state};
}

}  // namespace pegsafe::safety
