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

#ifndef PEGSAFE_ENV_HPP_
#define PEGSAFE_ENV_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pegsafe/geometry.hpp"

namespace pegsafe::env {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Observation layout: [p_ee(3), wrench_norm(6), theta_z(1), p_h_obs(3)].
inline constexpr int kObsDim = 13;
inline constexpr int kActDim = 4;
inline constexpr int kObsPee = 0;
inline constexpr int kObsWrench = 3;
inline constexpr int kObsTheta = 9;
inline constexpr int kObsHole = 10;
using ObsVector = Eigen::Matrix<double, kObsDim, 1>;

enum class ObservationMask { kVFTM, kFTM, kVM };
std::string to_string(ObservationMask mask);
// Accepts "VFTM", "FTM", "VM" (case-insensitive). Throws InvalidConfig.
ObservationMask parse_mask(const std::string& text);

struct EefState {
  Vec3 p_ee = Vec3::Zero();  // peg bottom centre, mm
  double theta_z = 0.0;
};

struct Wrench {
  Vec3 force = Vec3::Zero();   // N, reaction on the EEF
  Vec3 torque = Vec3::Zero();  // N mm
  Vec6 normalized = Vec6::Zero();

  Vec6 raw() const;
};

struct HoleTarget {
  Vec3 p_h = Vec3::Zero();  // z is the plate surface height
  double yaw = 0.0;
  geometry::CrossSection shape = geometry::CrossSection::circle(1.0);
  double depth = 20.0;

  geometry::PlanarPose planar_pose() const { return {p_h.x(), p_h.y(), yaw}; }
};

struct Observation {
  Vec3 p_ee = Vec3::Zero();
  Vec6 wrench_normalized = Vec6::Zero();
  double theta_z = 0.0;
  Vec3 p_h_observed = Vec3::Zero();
  ObservationMask mask = ObservationMask::kVFTM;

  ObsVector vector() const;
};

// Zeroes the slots hidden by `mask` in a raw 13-slot vector.
ObsVector apply_mask(const ObsVector& v, ObservationMask mask);
Observation apply_mask(Observation obs, ObservationMask mask);

struct Action {
  Vec3 delta = Vec3::Zero();  // mm
  double delta_theta_z = 0.0;  // rad

  static Action from_vector(const Eigen::Vector4d& v);
  Eigen::Vector4d vector() const;
};

struct ContactParams {
  double surface_z = 0.0;
  double k_n = 10.0;  // N/mm
  double mu = 0.3;
  Vec6 full_scale = (Vec6() << 20, 20, 40, 500, 500, 500).finished();
  // Sensor noise standard deviation as a fraction of full scale.
  double wrench_noise = 0.01;
  // Largest peg-outside-hole overlap (mm) the walls absorb elastically.
  double wall_compliance = 1.0;
};

struct EnvConfig {
  geometry::CrossSection peg = geometry::equilateral_triangle(82.0);
  geometry::CrossSection hole = geometry::equilateral_triangle(82.0).dilated(4.0);
  ContactParams contact;

  Vec3 start_position = Vec3(0.0, 0.0, 20.0);
  double start_theta_z = 0.0;
  double hole_depth = 20.0;
  // Hole randomization domain around (hole_x, hole_y).
  double hole_x = 0.0;
  double hole_y = 0.0;
  double hole_xy_range = 15.0;
  double hole_yaw_min = -3.14159265358979323846;
  double hole_yaw_max = 3.14159265358979323846;

  double obs_noise = 1.0;  // mm, on the observed hole position
  double max_step_xyz = 2.0;  // mm
  double max_step_theta = 2.0 * 3.14159265358979323846 / 180.0;
  int horizon = 110;
  double success_depth = 2.5;
  int contact_samples = 128;
  // Largest increase of plate penetration in one step (mm).
  double penetration_rate = 0.25;
  // Normalized F_z at which the arm halts for the rest of the episode;
  // 0 disables the stop.
  double estop_fz = 0.6;
  double workspace_xy = 80.0;
  double workspace_z_max = 100.0;
  ObservationMask mask = ObservationMask::kVFTM;

  // Throws InvalidConfig when a field is out of range.
  void validate() const;
  double max_penetration() const { return contact.full_scale(2) / contact.k_n; }
};

struct StepInfo {
  EefState eef;
  Vec3 p_h_true = Vec3::Zero();
  double hole_yaw = 0.0;
  Action applied;  // clamped action actually executed
  Wrench wrench_raw_noise_free;
  double penetration = 0.0;
  bool in_hole = false;
  bool success = false;
  bool estop = false;
  bool truncated = false;
  int step = 0;
};

struct StepResult {
  Observation obs;  // masked, as seen by the policy
  Wrench wrench;    // full sensor reading (noisy)
  bool done = false;
  StepInfo info;
};

// Quasi-static wrench for a peg at `eef`. `local_samples` are bottom-face
// points in the peg frame; `lateral_motion` (mm) and `rotation_motion` (rad)
// are the displacement of the current step and set the friction direction at
// each supported sample. Noise is drawn from `rng` only when the peg touches
// something; pass nullptr for a noise-free reading.
Wrench compute_wrench(const geometry::CrossSection& peg,
                      const std::vector<geometry::Vec2>& local_samples,
                      const EefState& eef, const HoleTarget& hole,
                      const geometry::Vec2& lateral_motion,
                      double rotation_motion, const ContactParams& params,
                      std::mt19937_64* rng);

// Below the surface with the outline overlapping the walls by at most the
// wall compliance: the peg is inside the hole rather than on the plate.
bool in_hole(const geometry::CrossSection& peg, const EefState& eef,
             const HoleTarget& hole, const ContactParams& params);

// Fills `normalized` from force/torque: raw / full_scale clamped to [-1, 1].
void normalize_wrench(Wrench& w, const Vec6& full_scale);

// Inside the hole outline with the bottom at least `success_depth` below the
// plate surface.
bool success(const geometry::CrossSection& peg, const EefState& eef,
             const HoleTarget& hole, double success_depth = 2.5);

class PegInHoleEnv {
 public:
  explicit PegInHoleEnv(EnvConfig config);

  // Fixed start pose, freshly randomized hole. Returns the masked observation.
  Observation reset(std::uint64_t seed);
  StepResult step(const Action& action);

  // Places the peg directly; for tests and scripted setups.
  void set_eef(const EefState& eef);
  void set_hole(const HoleTarget& hole);

  const EnvConfig& config() const { return config_; }
  const EefState& eef() const { return eef_; }
  const HoleTarget& hole() const { return hole_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }
  bool stopped() const { return estop_; }
  // Observation with every slot visible, noise included.
  const Observation& full_observation() const { return last_obs_; }
  const Wrench& last_wrench() const { return last_wrench_; }

 private:
  // Peg-outside-hole overlap at a candidate planar pose.
  double overlap_at(const geometry::PlanarPose& pose) const;
  bool below_surface(double z) const;
  Observation observe(const Wrench& wrench);

  EnvConfig config_;
  std::vector<geometry::Vec2> samples_;
  std::mt19937_64 rng_;
  EefState eef_;
  HoleTarget hole_;
  Observation last_obs_;
  Wrench last_wrench_;
  int steps_ = 0;
  bool done_ = true;
  bool estop_ = false;
};

}  // namespace pegsafe::env

#endif  // PEGSAFE_ENV_HPP_
