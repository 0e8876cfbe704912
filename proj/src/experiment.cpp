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

#include "pegsafe/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pegsafe/checkpoint.hpp"
#include "pegsafe/errors.hpp"

namespace pegsafe::harness {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

template <typename Derived>
std::string join(const Eigen::MatrixBase<Derived>& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v(i));
  }
  return s;
}

// Reads keys into a spec, leaving absent keys at their current value.
struct Reader {
  const KeyValueConfig& cfg;

  void real(const std::string& k, double& x) const { x = cfg.get_double(k, x); }
  void integer(const std::string& k, int& x) const {
    x = static_cast<int>(cfg.get_int(k, x));
  }
  void integer(const std::string& k, std::int64_t& x) const { x = cfg.get_int(k, x); }
  void unsigned_int(const std::string& k, std::uint64_t& x) const {
    x = static_cast<std::uint64_t>(cfg.get_int(k, static_cast<std::int64_t>(x)));
  }
  template <typename Derived>
  void vec(const std::string& k, Eigen::MatrixBase<Derived>& v) const {
    if (!cfg.has(k)) return;
    const std::vector<double> xs = cfg.get_doubles(k, {});
    if (static_cast<Eigen::Index>(xs.size()) != v.size()) {
      throw InvalidConfig("key '" + k + "' needs " + std::to_string(v.size()) + " values");
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = xs[static_cast<std::size_t>(i)];
  }
  void ints(const std::string& k, std::vector<int>& xs) const {
    if (!cfg.has(k)) return;
    xs.clear();
    for (double d : cfg.get_doubles(k, {})) {
      if (d != std::floor(d)) throw InvalidConfig("key '" + k + "' needs integers");
      xs.push_back(static_cast<int>(d));
    }
  }
  void text(const std::string& k, std::string& s) const { s = cfg.get_string(k, s); }
};

struct Writer {
  KeyValueConfig& cfg;

  void real(const std::string& k, double& x) const { cfg.set(k, fmt(x)); }
  void integer(const std::string& k, int& x) const { cfg.set(k, std::to_string(x)); }
  void integer(const std::string& k, std::int64_t& x) const { cfg.set(k, std::to_string(x)); }
  void unsigned_int(const std::string& k, std::uint64_t& x) const {
    cfg.set(k, std::to_string(x));
  }
  template <typename Derived>
  void vec(const std::string& k, Eigen::MatrixBase<Derived>& v) const {
    cfg.set(k, join(v));
  }
  void ints(const std::string& k, std::vector<int>& xs) const {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + std::to_string(xs[i]);
    cfg.set(k, s);
  }
  void text(const std::string& k, std::string& s) const { cfg.set(k, s); }
};

// Every plain key of the format, shared by reading and writing.
template <typename V>
void visit(ExperimentSpec& s, const V& v) {
  v.text("experiment.name", s.name);
  v.text("experiment.shape", s.shape);
  v.text("experiment.catalogue", s.catalogue);
  v.integer("experiment.eval_episodes", s.eval_episodes);
  v.integer("experiment.checkpoint_every", s.checkpoint_every);
  v.integer("experiment.selection_episodes", s.selection_episodes);
  v.unsigned_int("experiment.eval_seed", s.eval_seed);
  v.integer("experiment.trajectory_samples", s.trajectory_samples);

  env::EnvConfig& e = s.env;
  v.real("env.surface_z", e.contact.surface_z);
  v.real("env.k_n", e.contact.k_n);
  v.real("env.mu", e.contact.mu);
  v.vec("env.full_scale", e.contact.full_scale);
  v.real("env.wrench_noise", e.contact.wrench_noise);
  v.real("env.wall_compliance", e.contact.wall_compliance);
  v.vec("env.start_position", e.start_position);
  v.real("env.start_theta_z", e.start_theta_z);
  v.real("env.hole_depth", e.hole_depth);
  v.real("env.hole_x", e.hole_x);
  v.real("env.hole_y", e.hole_y);
  v.real("env.hole_xy_range", e.hole_xy_range);
  v.real("env.hole_yaw_min", e.hole_yaw_min);
  v.real("env.hole_yaw_max", e.hole_yaw_max);
  v.real("env.obs_noise", e.obs_noise);
  v.real("env.max_step_xyz", e.max_step_xyz);
  v.integer("env.horizon", e.horizon);
  v.real("env.success_depth", e.success_depth);
  v.integer("env.contact_samples", e.contact_samples);
  v.real("env.penetration_rate", e.penetration_rate);
  v.real("env.estop_fz", e.estop_fz);
  v.real("env.workspace_xy", e.workspace_xy);
  v.real("env.workspace_z_max", e.workspace_z_max);

  v.vec("reward.alpha", s.reward.alpha);
  v.real("reward.delta1", s.reward.delta1);
  v.real("reward.delta2", s.reward.delta2);

  v.vec("dsl.beta1", s.dsl.beta1);
  v.vec("dsl.beta2", s.dsl.beta2);
  v.vec("dsl.delta_f", s.dsl.delta_f);
  v.real("dsl.probe_increment", s.dsl.probe_increment);
  v.real("dsl.contact_threshold", s.dsl.contact_threshold);
  v.real("dsl.release_threshold", s.dsl.release_threshold);
  v.integer("dsl.history", s.dsl.history);

  rl::PpoConfig& p = s.ppo;
  v.integer("ppo.total_steps", p.total_steps);
  v.integer("ppo.rollout_length", p.rollout_length);
  v.integer("ppo.n_envs", p.n_envs);
  v.real("ppo.gamma", p.gamma);
  v.real("ppo.lambda", p.lambda);
  v.real("ppo.clip", p.clip);
  v.integer("ppo.epochs", p.epochs);
  v.integer("ppo.minibatch", p.minibatch);
  v.real("ppo.learning_rate", p.learning_rate);
  v.real("ppo.entropy_coef", p.entropy_coef);
  v.real("ppo.value_coef", p.value_coef);
  v.real("ppo.max_grad_norm", p.max_grad_norm);
  v.real("ppo.init_log_std", p.init_log_std);
  v.ints("ppo.hidden", p.hidden);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(root) ^ a) ^ (b * 0xd1342543de82ef95ULL + 1));
}

safety::SafetyVariant ExperimentSpec::effective_safety() const {
  if (model == env::ObservationMask::kVM && safety == safety::SafetyVariant::kDsl &&
      dsl.beta2.isZero(0.0)) {
    return safety::SafetyVariant::kNone;
  }
  return safety;
}

rl::Architecture ExperimentSpec::architecture() const {
  rl::Architecture a;
  a.hidden = ppo.hidden;
  return a;
}

KeyValueConfig ExperimentSpec::resolved() const {
  KeyValueConfig cfg;
  ExperimentSpec copy = *this;
  visit(copy, Writer{cfg});
  cfg.set("experiment.model", env::to_string(model));
  cfg.set("experiment.safety", safety::to_string(safety));
  if (clearance) cfg.set("experiment.clearance", fmt(*clearance));
  if (gap_proportion) cfg.set("experiment.gap_proportion", fmt(*gap_proportion));
  std::string seeds_text;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    seeds_text += (i ? ", " : "") + std::to_string(seeds[i]);
  }
  cfg.set("experiment.seeds", seeds_text);
  cfg.set("env.max_step_theta_deg", fmt(env.max_step_theta * kDegPerRad));
  cfg.set("reward.distance_sign", reward::to_string(reward.distance_sign));
  cfg.set("reward.reference",
          reward_reference == RewardReference::kHoleBottom ? "hole_bottom" : "surface");
  return cfg;
}

std::string ExperimentSpec::hash() const {
  return rl::hash_hex(rl::fnv1a64(resolved().to_string()));
}

void ExperimentSpec::validate() const {
  if (clearance.has_value() == gap_proportion.has_value()) {
    throw InvalidConfig("set exactly one of clearance and gap_proportion");
  }
  if (clearance && !(*clearance > 0.0)) throw NonPositiveClearance("clearance must be positive");
  if (eval_episodes < 1) throw InvalidConfig("eval_episodes must be at least 1");
  if (checkpoint_every < 1) throw InvalidConfig("checkpoint_every must be positive");
  if (selection_episodes < 1) throw InvalidConfig("selection_episodes must be at least 1");
  if (seeds.empty()) throw InvalidConfig("need at least one seed");
  if (model == env::ObservationMask::kVM && safety == safety::SafetyVariant::kDsl &&
      !dsl.beta2.isZero(0.0)) {
    throw InvalidConfig("VM cannot run the safety lock; set dsl.beta2 = 0, 0, 0 to disable it");
  }
  if (model == env::ObservationMask::kVM && safety == safety::SafetyVariant::kSliding) {
    throw InvalidConfig("the sliding filter needs the wrench, which VM hides");
  }
  env.validate();
  reward.validate();
  dsl.validate();
  ppo.validate();
}

void resolve_geometry(ExperimentSpec& spec) {
  const geometry::ShapeCatalogue loaded =
      spec.catalogue.empty() ? geometry::ShapeCatalogue()
                             : geometry::ShapeCatalogue::load(spec.catalogue);
  const geometry::ShapeCatalogue& cat =
      spec.catalogue.empty() ? geometry::ShapeCatalogue::builtin() : loaded;
  const geometry::CrossSection& peg = cat.get(spec.shape);
  double clearance = 0.0;
  if (spec.clearance) {
    clearance = *spec.clearance;
  } else if (spec.gap_proportion) {
    clearance = geometry::clearance_for_gap_proportion(peg, *spec.gap_proportion);
  }
  if (!(clearance > 0.0)) throw NonPositiveClearance("clearance must be positive");
  spec.env.peg = peg;
  spec.env.hole = peg.dilated(clearance);
}

ExperimentSpec spec_from_config(const KeyValueConfig& cfg, const std::filesystem::path& base_dir) {
  ExperimentSpec s;
  visit(s, Reader{cfg});
  if (cfg.has("experiment.model")) s.model = env::parse_mask(cfg.get_string("experiment.model"));
  if (cfg.has("experiment.safety")) {
    s.safety = safety::parse_safety(cfg.get_string("experiment.safety"));
  }
  const bool has_clearance = cfg.has("experiment.clearance");
  const bool has_gap = cfg.has("experiment.gap_proportion");
  if (has_clearance && has_gap) {
    throw InvalidConfig("set only one of experiment.clearance and experiment.gap_proportion");
  }
  if (has_clearance) s.clearance = cfg.get_double("experiment.clearance");
  if (has_gap) {
    s.clearance.reset();
    s.gap_proportion = cfg.get_double("experiment.gap_proportion");
  }
  if (cfg.has("experiment.seeds")) {
    s.seeds.clear();
    for (const std::string& item : cfg.get_list("experiment.seeds")) {
      try {
        s.seeds.push_back(std::stoull(item));
      } catch (const std::exception&) {
        throw InvalidConfig("bad seed '" + item + "'");
      }
    }
  }
  s.run_dir = cfg.get_string("experiment.run_dir", "");
  if (cfg.has("env.max_step_theta_deg")) {
    s.env.max_step_theta = cfg.get_double("env.max_step_theta_deg") / kDegPerRad;
  }
  s.env.mask = s.model;
  if (cfg.has("reward.distance_sign")) {
    s.reward.distance_sign = reward::parse_distance_sign(cfg.get_string("reward.distance_sign"));
  }
  if (cfg.has("reward.reference")) {
    const std::string ref = lower(cfg.get_string("reward.reference"));
    if (ref == "hole_bottom") {
      s.reward_reference = RewardReference::kHoleBottom;
    } else if (ref == "surface") {
      s.reward_reference = RewardReference::kSurface;
    } else {
      throw InvalidConfig("reward.reference must be hole_bottom or surface");
    }
  }
  s.ppo.horizon = s.env.horizon;
  if (!s.catalogue.empty() && std::filesystem::path(s.catalogue).is_relative() &&
      !base_dir.empty()) {
    s.catalogue = (base_dir / s.catalogue).lexically_normal().string();
  }
  const auto unused = cfg.unused_keys();
  if (!unused.empty()) throw InvalidConfig("unknown key '" + unused.front() + "'");
  resolve_geometry(s);
  s.validate();
  return s;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  return spec_from_config(KeyValueConfig::load(path), path.parent_path());
}

std::filesystem::path run_root(const ExperimentSpec& spec) {
  if (!spec.run_dir.empty()) return spec.run_dir;
  if (const char* env_dir = std::getenv("PEGSAFE_RUN_DIR"); env_dir && *env_dir) {
    return env_dir;
  }
  return "runs";
}

rl::Vector policy_input(const env::Observation& full, const rl::ObsNormalizer& normalizer,
                        env::ObservationMask mask) {
  env::Observation unmasked = full;
  unmasked.mask = env::ObservationMask::kVFTM;
  const env::ObsVector x = normalizer.normalize(unmasked.vector());
  return env::apply_mask(x, mask);
}

PolicyController::PolicyController(const rl::PolicyParams& params,
                                   const rl::ObsNormalizer& normalizer,
                                   env::ObservationMask mask, std::mt19937_64* rng)
    : params_(params), normalizer_(normalizer), mask_(mask), rng_(rng) {}

env::Action PolicyController::propose(const env::Observation&, const env::Observation& full,
                                      const env::PegInHoleEnv&) {
  last_ = rl::act(params_, policy_input(full, normalizer_, mask_), rng_);
  return last_.action;
}

env::Vec3 reward_target(const env::HoleTarget& hole, RewardReference ref) {
  env::Vec3 p = hole.p_h;
  if (ref == RewardReference::kHoleBottom) p.z() -= hole.depth;
  return p / 1000.0;
}

SafeEnv::SafeEnv(const ExperimentSpec& spec)
    : variant_(spec.effective_safety()),
      dsl_(spec.dsl),
      reward_(spec.reward),
      reference_(spec.reward_reference),
      env_([&] {
        env::EnvConfig c = spec.env;
        c.mask = spec.model;
        return c;
      }()) {}

env::Observation SafeEnv::reset(std::uint64_t seed) {
  obs_ = env_.reset(seed);
  lock_ = safety::DslState();
  return obs_;
}

double SafeEnv::reward_of(const env::EefState& eef, const env::Vec3& p_h) const {
  env::HoleTarget h = env_.hole();
  h.p_h = p_h;
  return reward::reward(eef.p_ee / 1000.0, reward_target(h, reference_), reward_);
}

SafeEnv::Outcome SafeEnv::step(const env::Action& proposed) {
  Outcome out;
  out.proposed = proposed;
  safety::FilterOutput filtered = safety::apply_filter(variant_, lock_, dsl_, proposed, obs_);
  lock_ = std::move(filtered.state);
  out.command = filtered.action;
  out.result = env_.step(out.command);
  obs_ = out.result.obs;
  out.reward = reward_of(out.result.info.eef, out.result.info.p_h_true);
  out.lock = lock_;
  return out;
}

EpisodeResult run_episode(SafeEnv& env, Controller& controller, std::uint64_t seed,
                          bool keep_records) {
  EpisodeResult res;
  env.reset(seed);
  auto record = [&](int step, const env::Action& proposed, const env::Action& command,
                    double reward, bool done, bool success) {
    const env::PegInHoleEnv& e = env.env();
    StepRecord r;
    r.step = step;
    r.proposed = proposed;
    r.command = command;
    r.eef = e.eef();
    r.wrench = e.last_wrench();
    r.p_h_true = e.hole().p_h;
    r.p_h_obs = e.full_observation().p_h_observed;
    r.hole_yaw = e.hole().yaw;
    r.reward = reward;
    r.done = done;
    r.success = success;
    r.estop = e.stopped();
    r.lock = env.lock();
    res.records.push_back(std::move(r));
  };
  if (keep_records) record(0, env::Action(), env::Action(), 0.0, false, false);
  res.peak_fz = env.env().last_wrench().normalized(2);
  while (!env.env().done()) {
    const env::Action proposed =
        controller.propose(env.observation(), env.env().full_observation(), env.env());
    const SafeEnv::Outcome o = env.step(proposed);
    res.total_reward += o.reward;
    res.peak_fz = std::max(res.peak_fz, o.result.wrench.normalized(2));
    ++res.steps;
    if (keep_records) {
      record(res.steps, o.proposed, o.command, o.reward, o.result.done, o.result.info.success);
    }
    if (o.result.done) {
      res.success = o.result.info.success;
      res.estop = o.result.info.estop;
    }
  }
  return res;
}

std::vector<std::string> trajectory_columns() {
  return {"step",        "action_dx",   "action_dy",   "action_dz",   "action_dtheta",
          "p_ee_x",      "p_ee_y",      "p_ee_z",      "theta_z",     "wrench_raw_fx",
          "wrench_raw_fy", "wrench_raw_fz", "wrench_raw_tx", "wrench_raw_ty", "wrench_raw_tz",
          "wrench_norm_fx", "wrench_norm_fy", "wrench_norm_fz", "wrench_norm_tx",
          "wrench_norm_ty", "wrench_norm_tz", "p_h_true_x", "p_h_true_y", "p_h_true_z",
          "p_h_obs_x",   "p_h_obs_y",   "p_h_obs_z",   "reward",      "done",
          "success",     "hole_yaw",    "estop",       "policy_dx",   "policy_dy",
          "policy_dz",   "policy_dtheta", "phase",     "z_c",         "branch",
          "inc_x",       "inc_y",       "inc_z"};
}

void write_trajectory(const std::filesystem::path& path, const std::vector<StepRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  const auto cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const StepRecord& r : records) {
    std::vector<std::string> f;
    f.push_back(std::to_string(r.step));
    for (int i = 0; i < 4; ++i) f.push_back(fmt(r.command.vector()(i)));
    for (int i = 0; i < 3; ++i) f.push_back(fmt(r.eef.p_ee(i)));
    f.push_back(fmt(r.eef.theta_z));
    const env::Vec6 raw = r.wrench.raw();
    for (int i = 0; i < 6; ++i) f.push_back(fmt(raw(i)));
    for (int i = 0; i < 6; ++i) f.push_back(fmt(r.wrench.normalized(i)));
    for (int i = 0; i < 3; ++i) f.push_back(fmt(r.p_h_true(i)));
    for (int i = 0; i < 3; ++i) f.push_back(fmt(r.p_h_obs(i)));
    f.push_back(fmt(r.reward));
    f.push_back(r.done ? "1" : "0");
    f.push_back(r.success ? "1" : "0");
    f.push_back(fmt(r.hole_yaw));
    f.push_back(r.estop ? "1" : "0");
    for (int i = 0; i < 4; ++i) f.push_back(fmt(r.proposed.vector()(i)));
    f.push_back(safety::to_string(r.lock.phase));
    f.push_back(fmt(r.lock.z_c));
    f.push_back(safety::to_string(r.lock.branch));
    for (int i = 0; i < 3; ++i) f.push_back(fmt(r.lock.increments(i)));
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
    out << "\n";
  }
}

}  // namespace pegsafe::harness
