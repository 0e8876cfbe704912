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

// Spec builders and scripted controllers shared by the harness tests and the
// acceptance runner.

#ifndef PEGSAFE_TESTS_SUPPORT_HPP_
#define PEGSAFE_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "pegsafe/experiment.hpp"
#include "pegsafe/keyvalue.hpp"

namespace testing {

inline pegsafe::harness::ExperimentSpec spec_from_text(const std::string& text) {
  return pegsafe::harness::spec_from_config(pegsafe::KeyValueConfig::parse(text));
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pegsafe_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reads the true hole pose, turns to the nearest symmetric yaw, centres over
// the hole and only then descends.
class AligningController : public pegsafe::harness::Controller {
 public:
  explicit AligningController(int symmetry) : period_(2 * M_PI / symmetry) {}

  pegsafe::env::Action propose(const pegsafe::env::Observation&, const pegsafe::env::Observation&,
                               const pegsafe::env::PegInHoleEnv& env) override {
    const auto& cfg = env.config();
    const auto& eef = env.eef();
    const auto& hole = env.hole();
    double dth = std::remainder(hole.yaw - eef.theta_z, period_);
    const Eigen::Vector2d dxy = hole.p_h.head<2>() - eef.p_ee.head<2>();
    pegsafe::env::Action a;
    a.delta_theta_z = std::clamp(dth, -cfg.max_step_theta, cfg.max_step_theta);
    a.delta.head<2>() = dxy.norm() > cfg.max_step_xyz ? Eigen::Vector2d(dxy.normalized() * cfg.max_step_xyz)
                                                      : dxy;
    const bool aligned = dxy.norm() < 1e-6 && std::abs(dth) < 1e-9;
    a.delta.z() = aligned ? -cfg.max_step_xyz : 0.0;
    return a;
  }

 private:
  double period_;
};

// Uniform random actions within the limits.
class RandomController : public pegsafe::harness::Controller {
 public:
  explicit RandomController(std::uint64_t seed) : rng_(seed) {}

  pegsafe::env::Action propose(const pegsafe::env::Observation&, const pegsafe::env::Observation&,
                               const pegsafe::env::PegInHoleEnv& env) override {
    const auto& cfg = env.config();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    pegsafe::env::Action a;
    a.delta = cfg.max_step_xyz * Eigen::Vector3d(u(rng_), u(rng_), u(rng_));
    a.delta_theta_z = cfg.max_step_theta * u(rng_);
    return a;
  }

 private:
  std::mt19937_64 rng_;
};

// Pushes straight down while wandering sideways.
class PressingController : public pegsafe::harness::Controller {
 public:
  explicit PressingController(std::uint64_t seed) : rng_(seed) {}

  pegsafe::env::Action propose(const pegsafe::env::Observation&, const pegsafe::env::Observation&,
                               const pegsafe::env::PegInHoleEnv& env) override {
    const auto& cfg = env.config();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    pegsafe::env::Action a;
    a.delta = Eigen::Vector3d(cfg.max_step_xyz * u(rng_), cfg.max_step_xyz * u(rng_),
                              -cfg.max_step_xyz);
    a.delta_theta_z = cfg.max_step_theta * u(rng_);
    return a;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing

#endif  // PEGSAFE_TESTS_SUPPORT_HPP_
