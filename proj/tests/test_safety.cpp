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

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pegsafe/errors.hpp"
#include "pegsafe/safety.hpp"

using namespace pegsafe::safety;
using pegsafe::env::Action;
using pegsafe::env::Observation;
using pegsafe::env::ObservationMask;

namespace {

Observation reading(const Vec3& p_mm, const Vec6& f) {
  Observation o;
  o.p_ee = p_mm;
  o.wrench_normalized = f;
  return o;
}

Vec6 fz(double v) {
  Vec6 f = Vec6::Zero();
  f(2) = v;
  return f;
}

Action dz(double v) { return Action::from_vector(Eigen::Vector4d(0.3, -0.2, v, 0.01)); }

}  // namespace

TEST_SUITE("safety") {

TEST_CASE("free space adds the probe step and records") {
  const DslParams p;
  const FilterOutput out = dsl_filter(DslState{}, p, dz(-1.0), reading(Vec3(1, 2, 10), fz(0.0)));
  CHECK(out.action.delta.z() == doctest::Approx(-1.0 - 0.5));
  CHECK(out.action.delta.x() == 0.3);
  CHECK(out.state.r_f.size() == 1);
  CHECK(out.state.r_p.back() == Vec3(0.001, 0.002, 0.01));
  CHECK(out.state.phase == Phase::kProbing);
}

TEST_CASE("contact at the limit holds the peg") {
  const DslParams p;
  DslState s;
  s.phase = Phase::kLimited;
  s.z_c = 0.002;
  const FilterOutput out = dsl_filter(s, p, dz(-1.0), reading(Vec3(0, 0, 2.0), fz(0.6)));
  CHECK(out.action.delta.z() == 0.0);
  CHECK(out.state.phase == Phase::kLimited);
}

TEST_CASE("limit update examples") {
  const DslParams p;
  SUBCASE("no change keeps the touch height") {
    DslState s;
    s.record(Vec6::Zero(), Vec3(0, 0, 0.004), 16);
    s.record(Vec6::Zero(), Vec3(0, 0, 0.004), 16);
    CHECK(update_limit(s, p) == 0.004);
    CHECK(s.branch == Branch::kFlat);
  }
  SUBCASE("edge contact") {
    DslState s;
    Vec6 f = Vec6::Zero();
    s.record(f, Vec3(0, 0, 0.004), 16);
    f(0) = 0.2;
    f(3) = 0.1;
    s.record(f, Vec3(0, 0, 0.004), 16);
    CHECK(update_limit(s, p) == doctest::Approx(0.004 + 3e-4).epsilon(1e-14));
    CHECK(s.increments(0) == doctest::Approx(3e-4));
    CHECK(s.branch == Branch::kEdge);
  }
  SUBCASE("flat press") {
    DslState s;
    s.record(Vec6::Zero(), Vec3(0, 0, 0.005), 16);
    s.record(Vec6::Zero(), Vec3(0, 0, 0.004), 16);
    CHECK(update_limit(s, p) == doctest::Approx(0.004 + 1e-6).epsilon(1e-14));
  }
  SUBCASE("needs two records") {
    DslState s;
    s.record(Vec6::Zero(), Vec3::Zero(), 16);
    CHECK_THROWS_AS(update_limit(s, p), pegsafe::InsufficientHistory);
  }
}

TEST_CASE("sliding pins the first-contact height") {
  const DslParams p;
  FilterOutput out = sliding_filter(DslState{}, p, dz(-1.0), reading(Vec3(0, 0, 5), fz(0.1)));
  CHECK(out.action.delta.z() == doctest::Approx(-1.5));
  out = sliding_filter(out.state, p, dz(-1.0), reading(Vec3(0, 0, 3.5), fz(0.7)));
  CHECK(out.action.delta.z() == 0.0);
  CHECK(out.state.z_c == 0.0035);
  // Lift off and press again: the pin never moves.
  for (double z : {3.6, 4.0, 3.5, 3.5}) {
    out = sliding_filter(out.state, p, dz(-2.0), reading(Vec3(1, 1, z), fz(0.0)));
    CHECK(out.action.delta.z() == doctest::Approx((3.5 - z)));
    CHECK(out.action.delta.x() == 0.3);
    CHECK(out.action.delta.y() == -0.2);
    CHECK(out.state.z_c == 0.0035);
  }
}

TEST_CASE("a wrench-blind observation is rejected") {
  Observation o = reading(Vec3::Zero(), Vec6::Zero());
  o.mask = ObservationMask::kVM;
  CHECK_THROWS_AS(dsl_filter(DslState{}, DslParams{}, dz(0), o), pegsafe::MissingWrench);
  CHECK_THROWS_AS(sliding_filter(DslState{}, DslParams{}, dz(0), o), pegsafe::MissingWrench);
  CHECK_NOTHROW(apply_filter(SafetyVariant::kNone, DslState{}, DslParams{}, dz(0), o));
}

TEST_CASE("parameter validation") {
  DslParams p;
  p.beta1(0) = -1;
  CHECK_THROWS_AS(p.validate(), pegsafe::InvalidConfig);
  DslParams q;
  q.contact_threshold = 1.0;
  CHECK_THROWS_AS(q.validate(), pegsafe::InvalidConfig);
  DslParams r;
  r.delta_f(4) = 0.0;
  CHECK_THROWS_AS(r.validate(), pegsafe::InvalidConfig);
  CHECK(parse_safety("sliding") == SafetyVariant::kSliding);
  CHECK_THROWS_AS(parse_safety("off"), pegsafe::InvalidConfig);
}

TEST_CASE("random traces: lateral untouched, limit never crossed, transcript agrees") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DslParams p;
  for (int trace = 0; trace < 200; ++trace) {
    DslState s;
    oracle::LockTranscript t;
    Vec3 pos(0, 0, 0.004);
    double touch = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < 60; ++k) {
      Vec6 f;
      for (int i = 0; i < 6; ++i) f(i) = 0.4 * u(rng);
      f(2) = 0.5 + 0.5 * u(rng);
      const Action prop = Action::from_vector(Eigen::Vector4d(2 * u(rng), 2 * u(rng), 2 * u(rng), 0.03 * u(rng)));
      const bool probing = s.phase == Phase::kProbing;
      const FilterOutput out = dsl_filter(s, p, prop, reading(pos * 1000.0, f));
      std::array<double, 6> fa;
      for (int i = 0; i < 6; ++i) fa[static_cast<std::size_t>(i)] = f(i);
      const double expected = t.step(fa, pos, prop.delta.z());
      REQUIRE(out.action.delta.z() == doctest::Approx(expected).epsilon(1e-12));
      REQUIRE(out.action.delta.x() == prop.delta.x());
      REQUIRE(out.action.delta.y() == prop.delta.y());
      REQUIRE(out.action.delta_theta_z == prop.delta_theta_z);
      if (out.state.phase == Phase::kLimited) {
        REQUIRE(std::abs(out.state.z_c - t.z_c) < 1e-12);
        REQUIRE(pos.z() + out.action.delta.z() / 1000.0 >= out.state.z_c - 1e-12);
        if (probing && out.state.branch != Branch::kShortHistory) {
          touch = out.state.r_p.back().z();
          REQUIRE(out.state.z_c >= touch);
        }
      }
      s = out.state;
      pos += Vec3(prop.delta.x(), prop.delta.y(), out.action.delta.z()) / 1000.0;
    }
  }
}

TEST_CASE("without gains or edges the lock clamps at the last probing height") {
  DslParams p;
  p.beta2.setZero();
  p.delta_f.setConstant(std::numeric_limits<double>::infinity());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trace = 0; trace < 50; ++trace) {
    DslState s;
    Vec3 pos(0, 0, 0.006);
    int k = 0;
    // Probe down with sub-threshold readings, then touch.
    for (; k < 4; ++k) {
      const FilterOutput out = dsl_filter(s, p, dz(-1.0), reading(pos * 1000.0, fz(0.1)));
      s = out.state;
      pos.z() += out.action.delta.z() / 1000.0;
    }
    const double last_recorded = s.r_p.back().z();
    Vec6 f;
    for (int i = 0; i < 6; ++i) f(i) = u(rng);
    f(2) = 0.8;
    FilterOutput out = dsl_filter(s, p, dz(-1.0), reading(pos * 1000.0, f));
    CHECK(out.state.z_c == last_recorded);
    // Within the contact event the limit stays put whatever the policy does.
    for (int j = 0; j < 10; ++j) {
      s = out.state;
      out = dsl_filter(s, p, dz(-2.0 * std::abs(u(rng))), reading(pos * 1000.0, fz(0.55 + 0.4 * std::abs(u(rng)))));
      CHECK(out.state.z_c == last_recorded);
    }
  }
}

TEST_CASE("replaying a trace reproduces the limit sequence") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DslParams p;
  std::vector<Observation> obs;
  std::vector<Action> props;
  for (int k = 0; k < 80; ++k) {
    Vec6 f;
    for (int i = 0; i < 6; ++i) f(i) = 0.3 * u(rng);
    f(2) = 0.5 + 0.5 * u(rng);
    obs.push_back(reading(Vec3(u(rng), u(rng), 3 + u(rng)), f));
    props.push_back(dz(2 * u(rng)));
  }
  auto run = [&] {
    std::vector<double> zc;
    DslState s;
    for (std::size_t k = 0; k < obs.size(); ++k) {
      s = dsl_filter(s, p, props[k], obs[k]).state;
      zc.push_back(s.z_c);
    }
    return zc;
  };
  CHECK(run() == run());
}

}  // TEST_SUITE
