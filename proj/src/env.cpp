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

#include "pegsafe/env.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "pegsafe/errors.hpp"

namespace pegsafe::env {

using geometry::CrossSection;
using geometry::PlanarPose;
using geometry::Vec2;

std::string to_string(ObservationMask mask) {
  switch (mask) {
    case ObservationMask::kVFTM:
      return "VFTM";
    case ObservationMask::kFTM:
      return "FTM";
    case ObservationMask::kVM:
      return "VM";
  }
  return "?";
}

ObservationMask parse_mask(const std::string& text) {
  std::string s = text;
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "VFTM") return ObservationMask::kVFTM;
  if (s == "FTM") return ObservationMask::kFTM;
  if (s == "VM") return ObservationMask::kVM;
  throw InvalidConfig("unknown observation model '" + text + "'");
}

Vec6 Wrench::raw() const {
  Vec6 r;
  r << force, torque;
  return r;
}

ObsVector Observation::vector() const {
  ObsVector v;
  v << p_ee, wrench_normalized, theta_z, p_h_observed;
  return apply_mask(v, mask);
}

ObsVector apply_mask(const ObsVector& v, ObservationMask mask) {
  ObsVector out = v;
  if (mask == ObservationMask::kFTM) out.segment<3>(kObsHole).setZero();
  if (mask == ObservationMask::kVM) out.segment<6>(kObsWrench).setZero();
  return out;
}

Observation apply_mask(Observation obs, ObservationMask mask) {
  obs.mask = mask;
  if (mask == ObservationMask::kFTM) obs.p_h_observed.setZero();
  if (mask == ObservationMask::kVM) obs.wrench_normalized.setZero();
  return obs;
}

Action Action::from_vector(const Eigen::Vector4d& v) {
  Action a;
  a.delta = v.head<3>();
  a.delta_theta_z = v(3);
  return a;
}

Eigen::Vector4d Action::vector() const {
  Eigen::Vector4d v;
  v << delta, delta_theta_z;
  return v;
}

void EnvConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidConfig(what);
  };
  require(contact.k_n > 0.0, "contact stiffness must be positive");
  require(contact.mu >= 0.0, "friction coefficient must be non-negative");
  require((contact.full_scale.array() > 0.0).all(), "sensor full scale must be positive");
  require(contact.wrench_noise >= 0.0, "sensor noise must be non-negative");
  require(contact.wall_compliance > 0.0, "wall compliance must be positive");
  require(hole_xy_range >= 0.0 && std::isfinite(hole_xy_range),
          "hole randomization domain is empty");
  require(hole_yaw_max >= hole_yaw_min, "hole yaw domain is empty");
  require(hole_depth >= 10.0, "hole depth must be at least 10 mm");
  require(obs_noise >= 0.0, "observation noise must be non-negative");
  require(max_step_xyz > 0.0 && max_step_theta > 0.0, "action limits must be positive");
  require(horizon >= 1, "horizon must be at least 1");
  require(success_depth > 0.0 && success_depth < hole_depth, "success depth out of range");
  require(contact_samples >= 3, "need at least 3 contact samples");
  require(penetration_rate > 0.0, "penetration rate must be positive");
  require(estop_fz >= 0.0, "emergency-stop threshold must be non-negative");
  require(start_position.z() > contact.surface_z, "start pose must be above the plate");
  if (!(hole.area() > peg.area())) throw NonPositiveClearance("hole must be larger than the peg");
}

void normalize_wrench(Wrench& w, const Vec6& full_scale) {
  w.normalized = (w.raw().array() / full_scale.array()).cwiseMax(-1.0).cwiseMin(1.0);
}

bool in_hole(const CrossSection& peg, const EefState& eef, const HoleTarget& hole,
             const ContactParams& params) {
  if (!(eef.p_ee.z() < params.surface_z)) return false;
  const PlanarPose pose(eef.p_ee.x(), eef.p_ee.y(), eef.theta_z);
  return geometry::overlap_depth(hole.shape, hole.planar_pose(), peg, pose) <=
         params.wall_compliance;
}

Wrench compute_wrench(const CrossSection& peg, const std::vector<Vec2>& local_samples,
                      const EefState& eef, const HoleTarget& hole,
                      const Vec2& lateral_motion, double rotation_motion,
                      const ContactParams& params, std::mt19937_64* rng) {
  Wrench w;
  const double z = eef.p_ee.z();
  if (z >= params.surface_z) {
    normalize_wrench(w, params.full_scale);
    return w;
  }
  const PlanarPose pose(eef.p_ee.x(), eef.p_ee.y(), eef.theta_z);
  const Vec2 centre(eef.p_ee.x(), eef.p_ee.y());
  const PlanarPose hole_pose = hole.planar_pose();
  bool touching = false;

  if (in_hole(peg, eef, hole, params)) {
    // Elastic wall reaction shared across the exiting points by depth.
    const auto exits = geometry::wall_exits(hole.shape, hole_pose, peg, pose);
    double total_depth = 0.0;
    for (const auto& e : exits) total_depth += e.depth;
    if (!exits.empty() && total_depth > 0.0) {
      touching = true;
      const double budget =
          params.k_n * geometry::overlap_depth(hole.shape, hole_pose, peg, pose);
      const double lever_z = 0.5 * (params.surface_z - z);
      for (const auto& e : exits) {
        const Vec2 f = budget * (e.depth / total_depth) * e.normal;
        const Vec2 r = e.point - centre;
        w.force.x() += f.x();
        w.force.y() += f.y();
        w.torque.x() += -lever_z * f.y();
        w.torque.y() += lever_z * f.x();
        w.torque.z() += r.x() * f.y() - r.y() * f.x();
      }
    }
  } else {
    // Peg resting on the plate: the penetration is shared by the samples that
    // are not over the hole, so F_z = k_n d for any non-empty support.
    const double d = params.surface_z - z;
    std::vector<Vec2> support;
    for (const Vec2& s : local_samples) {
      const Vec2 p = pose.apply(s);
      if (!hole.shape.contains_point(hole_pose.inverse_apply(p), 0.0)) {
        support.push_back(p - centre);
      }
    }
    if (!support.empty() && d > 0.0) {
      touching = true;
      const double f = params.k_n * d / static_cast<double>(support.size());
      for (const Vec2& r : support) {
        w.force.z() += f;
        w.torque.x() += r.y() * f;
        w.torque.y() += -r.x() * f;
        // Kinetic friction opposes the sample's own displacement.
        const Vec2 v(lateral_motion.x() - rotation_motion * r.y(),
                     lateral_motion.y() + rotation_motion * r.x());
        const double speed = v.norm();
        if (speed > 1e-12) {
          const Vec2 ff = -params.mu * f * v / speed;
          w.force.x() += ff.x();
          w.force.y() += ff.y();
          w.torque.z() += r.x() * ff.y() - r.y() * ff.x();
        }
      }
    }
  }

  if (touching && rng != nullptr && params.wrench_noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 3; ++i) {
      w.force(i) += gauss(*rng) * params.wrench_noise * params.full_scale(i);
    }
    for (int i = 0; i < 3; ++i) {
      w.torque(i) += gauss(*rng) * params.wrench_noise * params.full_scale(3 + i);
    }
  }
  normalize_wrench(w, params.full_scale);
  return w;
}

bool success(const CrossSection& peg, const EefState& eef, const HoleTarget& hole,
             double success_depth) {
  const PlanarPose pose(eef.p_ee.x(), eef.p_ee.y(), eef.theta_z);
  return eef.p_ee.z() <= hole.p_h.z() - success_depth &&
         geometry::contains(hole.shape, hole.planar_pose(), peg, pose);
}

PegInHoleEnv::PegInHoleEnv(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  samples_ = geometry::bottom_face_contact_samples(config_.peg, PlanarPose(),
                                                   config_.contact_samples);
  hole_.shape = config_.hole;
  hole_.depth = config_.hole_depth;
}

double PegInHoleEnv::overlap_at(const PlanarPose& pose) const {
  return geometry::overlap_depth(hole_.shape, hole_.planar_pose(), config_.peg, pose);
}

bool PegInHoleEnv::below_surface(double z) const { return z < config_.contact.surface_z; }

Observation PegInHoleEnv::observe(const Wrench& wrench) {
  Observation obs;
  obs.p_ee = eef_.p_ee;
  obs.wrench_normalized = wrench.normalized;
  obs.theta_z = eef_.theta_z;
  obs.p_h_observed = hole_.p_h;
  if (config_.obs_noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, config_.obs_noise);
    for (int i = 0; i < 3; ++i) obs.p_h_observed(i) += gauss(rng_);
  }
  obs.mask = ObservationMask::kVFTM;
  last_obs_ = obs;
  return apply_mask(obs, config_.mask);
}

Observation PegInHoleEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  std::uniform_real_distribution<double> xy(-config_.hole_xy_range, config_.hole_xy_range);
  std::uniform_real_distribution<double> yaw(config_.hole_yaw_min, config_.hole_yaw_max);
  hole_.shape = config_.hole;
  hole_.depth = config_.hole_depth;
  const double hx = config_.hole_x + xy(rng_);
  const double hy = config_.hole_y + xy(rng_);
  hole_.p_h = Vec3(hx, hy, config_.contact.surface_z);
  hole_.yaw = geometry::normalize_angle(yaw(rng_));
  eef_.p_ee = config_.start_position;
  eef_.theta_z = geometry::normalize_angle(config_.start_theta_z);
  steps_ = 0;
  done_ = false;
  estop_ = false;
  last_wrench_ = compute_wrench(config_.peg, samples_, eef_, hole_, Vec2::Zero(), 0.0,
                                config_.contact, &rng_);
  return observe(last_wrench_);
}

void PegInHoleEnv::set_eef(const EefState& eef) {
  eef_ = eef;
  eef_.theta_z = geometry::normalize_angle(eef.theta_z);
  last_wrench_ = compute_wrench(config_.peg, samples_, eef_, hole_, Vec2::Zero(), 0.0,
                                config_.contact, nullptr);
}

void PegInHoleEnv::set_hole(const HoleTarget& hole) { hole_ = hole; }

StepResult PegInHoleEnv::step(const Action& action) {
  if (done_) throw EpisodeFinished("step called after the episode ended; call reset");
  if (!action.vector().allFinite()) throw InvalidConfig("non-finite action");

  const double lim = config_.max_step_xyz;
  Action a;
  for (int i = 0; i < 3; ++i) a.delta(i) = std::clamp(action.delta(i), -lim, lim);
  a.delta_theta_z =
      std::clamp(action.delta_theta_z, -config_.max_step_theta, config_.max_step_theta);
  if (estop_) a = Action();

  const ContactParams& cp = config_.contact;
  const Vec3 p = eef_.p_ee;
  const PlanarPose from(p.x(), p.y(), eef_.theta_z);
  const double wx = config_.workspace_xy;
  auto planar_at = [&](double t) {
    return PlanarPose(std::clamp(p.x() + t * a.delta.x(), -wx, wx),
                      std::clamp(p.y() + t * a.delta.y(), -wx, wx),
                      eef_.theta_z + t * a.delta_theta_z);
  };

  // Planar motion. Inside the hole the walls stop the peg once its overlap
  // reaches the compliance limit.
  PlanarPose to = planar_at(1.0);
  if (below_surface(p.z())) {
    const double current = overlap_at(from);
    if (current <= cp.wall_compliance) {
      const double allowed = std::max(cp.wall_compliance, current);
      if (overlap_at(to) > allowed) {
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 40; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (overlap_at(planar_at(mid)) <= allowed) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        to = planar_at(lo);
      }
    }
  }

  // Vertical motion: free above the plate, free inside the hole down to its
  // floor, and limited penetration on the plate.
  const double zs = cp.surface_z;
  const double z_target = p.z() + a.delta.z();
  double z_new;
  double penetration = 0.0;
  if (z_target >= zs) {
    z_new = std::min(z_target, config_.workspace_z_max);
  } else if (overlap_at(to) <= cp.wall_compliance) {
    z_new = std::max(z_target, zs - hole_.depth);
  } else {
    const double current = std::max(0.0, zs - p.z());
    penetration = std::min({zs - z_target, current + config_.penetration_rate,
                            config_.max_penetration()});
    z_new = zs - penetration;
  }

  const Vec2 lateral(to.x() - from.x(), to.y() - from.y());
  const double rotation = geometry::normalize_angle(to.yaw() - from.yaw());
  eef_.p_ee = Vec3(to.x(), to.y(), z_new);
  eef_.theta_z = to.yaw();
  ++steps_;

  StepResult out;
  out.info.wrench_raw_noise_free =
      compute_wrench(config_.peg, samples_, eef_, hole_, lateral, rotation, cp, nullptr);
  last_wrench_ =
      compute_wrench(config_.peg, samples_, eef_, hole_, lateral, rotation, cp, &rng_);
  if (config_.estop_fz > 0.0 && last_wrench_.normalized(2) >= config_.estop_fz) {
    estop_ = true;
  }

  out.obs = observe(last_wrench_);
  out.wrench = last_wrench_;
  out.info.eef = eef_;
  out.info.p_h_true = hole_.p_h;
  out.info.hole_yaw = hole_.yaw;
  out.info.applied = Action();
  out.info.applied.delta = eef_.p_ee - p;
  out.info.applied.delta_theta_z = rotation;
  out.info.penetration = penetration;
  out.info.in_hole = in_hole(config_.peg, eef_, hole_, cp);
  out.info.success = success(config_.peg, eef_, hole_, config_.success_depth);
  out.info.estop = estop_;
  out.info.step = steps_;
  out.done = out.info.success || steps_ >= config_.horizon;
  out.info.truncated = out.done && !out.info.success;
  done_ = out.done;
  return out;
}

}  // namespace pegsafe::env
