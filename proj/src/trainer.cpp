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

#include "pegsafe/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pegsafe/checkpoint.hpp"
#include "pegsafe/errors.hpp"
#include "pegsafe/evaluate.hpp"

namespace pegsafe::harness {

namespace fs = std::filesystem;

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kEpisodeStream = 2;
constexpr std::uint64_t kActionStream = 3;
constexpr std::uint64_t kShuffleStream = 4;
constexpr std::uint64_t kSelectionStream = 5;
constexpr std::uint64_t kSampleStream = 6;

struct Resume {
  rl::Checkpoint ckpt;
  rl::CheckpointMeta meta;
  fs::path path;
};

std::vector<fs::path> list_checkpoints(const fs::path& run_dir) {
  std::vector<fs::path> out;
  const fs::path dir = run_dir / "checkpoints";
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& p = entry.path();
    if (p.extension() == ".ckpt" && p.filename().string().rfind("ckpt_", 0) == 0) {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Resume> find_resume(const fs::path& run_dir, const std::string& hash,
                                  std::uint64_t seed) {
  std::optional<Resume> best;
  for (const fs::path& p : list_checkpoints(run_dir)) {
    const rl::CheckpointMeta meta = rl::load_checkpoint_meta(p);
    if (meta.config_hash != hash || meta.seed != seed) {
      throw InvalidConfig("run directory " + run_dir.string() +
                          " holds checkpoints of a different experiment");
    }
    if (!best || meta.step > best->meta.step) {
      best.emplace();
      best->meta = meta;
      best->path = p;
    }
  }
  if (best) best->ckpt = rl::load_checkpoint(best->path);
  return best;
}

std::string metrics_row(std::int64_t update, std::int64_t steps, double reward, double success,
                        const rl::UpdateDiagnostics& d) {
  std::ostringstream s;
  s << update << "," << steps << "," << fmt(reward) << "," << fmt(success) << ","
    << fmt(d.policy_loss) << "," << fmt(d.value_loss) << "," << fmt(d.entropy) << ","
    << fmt(d.clip_fraction) << "," << fmt(d.approx_kl);
  return s.str();
}

// Keeps the header and rows up to `last_update`.
void truncate_metrics(const fs::path& path, std::int64_t last_update) {
  std::ifstream in(path);
  std::vector<std::string> kept;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      kept.push_back(line);
      header = false;
      continue;
    }
    if (line.empty()) continue;
    if (std::stoll(line.substr(0, line.find(','))) <= last_update) kept.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::trunc);
  for (const std::string& l : kept) out << l << "\n";
}

void write_selection(const fs::path& path, const std::vector<CheckpointScore>& scores) {
  std::ofstream out(path, std::ios::trunc);
  out << "checkpoint,step,success_rate,mean_reward\n";
  for (const CheckpointScore& s : scores) {
    out << s.path.filename().string() << "," << s.step << "," << fmt(s.success_rate) << ","
        << fmt(s.mean_reward) << "\n";
  }
}

}  // namespace

fs::path seed_run_dir(const ExperimentSpec& spec, std::uint64_t seed) {
  return run_root(spec) / spec.name / ("seed_" + std::to_string(seed));
}

fs::path checkpoint_path(const fs::path& run_dir, std::int64_t step) {
  char name[48];
  std::snprintf(name, sizeof(name), "ckpt_%010lld.ckpt", static_cast<long long>(step));
  return run_dir / "checkpoints" / name;
}

std::vector<std::string> metrics_columns() {
  return {"update",  "steps",   "mean_episode_reward", "success_rate", "policy_loss",
          "value_loss", "entropy", "clip_frac",        "approx_kl"};
}

TrainResult train_one(const ExperimentSpec& spec, std::uint64_t seed, const fs::path& run_dir,
                      const ProgressFn& progress) {
  spec.validate();
  const rl::PpoConfig& cfg = spec.ppo;
  const std::string hash = spec.hash();
  fs::create_directories(run_dir);
  // Throws before touching anything if the directory belongs to another spec.
  std::optional<Resume> resume = find_resume(run_dir, hash, seed);
  {
    std::ofstream out(run_dir / "config.resolved", std::ios::trunc);
    out << spec.resolved().to_string();
  }

  rl::PolicyParams params(spec.architecture());
  params.init(derive_seed(seed, kInitStream), cfg.init_log_std);
  params.action_limits() << spec.env.max_step_xyz, spec.env.max_step_xyz,
      spec.env.max_step_xyz, spec.env.max_step_theta;
  rl::ObsNormalizer normalizer(env::kObsDim);
  rl::Adam adam(static_cast<int>(params.flat().size()), cfg.learning_rate);

  TrainResult result;
  result.seed = seed;
  result.run_dir = run_dir;
  std::int64_t steps = 0;
  std::int64_t update = 0;
  std::int64_t episodes = 0;

  const fs::path metrics = run_dir / "metrics.csv";
  if (std::optional<Resume>& r = resume) {
    rl::check_compatible(r->ckpt, spec.architecture(), spec.model);
    params = r->ckpt.params;
    normalizer = r->ckpt.normalizer;
    if (r->ckpt.has_optimizer) adam.set_state(r->ckpt.adam_m, r->ckpt.adam_v, r->ckpt.adam_t);
    steps = r->meta.step;
    update = r->meta.update;
    episodes = r->meta.episodes;
    result.resumed = true;
    truncate_metrics(metrics, update);
  } else {
    std::ofstream out(metrics, std::ios::trunc);
    const auto cols = metrics_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
  }

  const int n_envs = cfg.n_envs;
  const int T = cfg.rollout_length;
  std::vector<SafeEnv> envs;
  envs.reserve(static_cast<std::size_t>(n_envs));
  std::vector<double> running_reward(static_cast<std::size_t>(n_envs), 0.0);
  for (int e = 0; e < n_envs; ++e) {
    envs.emplace_back(spec);
    envs.back().reset(derive_seed(seed, kEpisodeStream, static_cast<std::uint64_t>(episodes++)));
  }

  rl::TrajectoryBuffer buf;
  buf.resize(env::kObsDim, env::kActDim, n_envs * T);
  rl::Matrix raw_obs(env::kObsDim, n_envs * T);

  while (steps < cfg.total_steps) {
    std::mt19937_64 action_rng(derive_seed(seed, kActionStream, static_cast<std::uint64_t>(update)));
    std::vector<double> finished_rewards;
    int finished_successes = 0;
    rl::Vector bootstrap = rl::Vector::Zero(n_envs);

    for (int t = 0; t < T; ++t) {
      for (int e = 0; e < n_envs; ++e) {
        SafeEnv& env = envs[static_cast<std::size_t>(e)];
        const int i = e * T + t;
        env::Observation full = env.env().full_observation();
        full.mask = env::ObservationMask::kVFTM;
        raw_obs.col(i) = full.vector();
        const rl::Vector x = policy_input(full, normalizer, spec.model);
        const rl::ActResult a = rl::act(params, x, &action_rng);
        buf.obs.col(i) = x;
        buf.raw_actions.col(i) = a.raw;
        buf.log_probs(i) = a.log_prob;
        buf.values(i) = a.value;

        const SafeEnv::Outcome o = env.step(a.action);
        double r = o.reward;
        running_reward[static_cast<std::size_t>(e)] += o.reward;
        buf.dones(i) = o.result.done ? 1.0 : 0.0;
        if (o.result.done) {
          if (!o.result.info.success) {
            // Horizon cut, not a terminal state: bootstrap through it.
            r += cfg.gamma *
                 rl::value(params, policy_input(env.env().full_observation(), normalizer,
                                                spec.model));
          }
          finished_rewards.push_back(running_reward[static_cast<std::size_t>(e)]);
          finished_successes += o.result.info.success ? 1 : 0;
          running_reward[static_cast<std::size_t>(e)] = 0.0;
          env.reset(derive_seed(seed, kEpisodeStream, static_cast<std::uint64_t>(episodes++)));
        }
        buf.rewards(i) = r;
      }
    }
    for (int e = 0; e < n_envs; ++e) {
      bootstrap(e) = rl::value(
          params, policy_input(envs[static_cast<std::size_t>(e)].env().full_observation(),
                               normalizer, spec.model));
      rl::Vector adv, ret;
      rl::compute_gae(buf.rewards.segment(e * T, T), buf.values.segment(e * T, T),
                  buf.dones.segment(e * T, T), bootstrap(e), cfg.gamma, cfg.lambda, adv, ret);
      buf.advantages.segment(e * T, T) = adv;
      buf.returns.segment(e * T, T) = ret;
    }

    std::mt19937_64 shuffle_rng(derive_seed(seed, kShuffleStream, static_cast<std::uint64_t>(update)));
    const rl::UpdateDiagnostics diag = rl::ppo_update(params, adam, buf, cfg, shuffle_rng);
    normalizer.update(raw_obs);

    const std::int64_t prev = steps;
    steps += n_envs * T;
    ++update;
    double mean_reward = 0.0;
    for (double r : finished_rewards) mean_reward += r;
    const double n_done = static_cast<double>(finished_rewards.size());
    if (n_done > 0) mean_reward /= n_done;
    const double success_rate = n_done > 0 ? finished_successes / n_done : 0.0;
    {
      std::ofstream out(metrics, std::ios::app);
      out << metrics_row(update, steps, mean_reward, success_rate, diag) << "\n";
    }
    if (progress) progress(update, steps, mean_reward, success_rate);

    const std::int64_t every = spec.checkpoint_every;
    for (std::int64_t k = prev / every + 1; k * every <= std::min(steps, cfg.total_steps); ++k) {
      rl::Checkpoint ckpt;
      ckpt.params = params;
      ckpt.normalizer = normalizer;
      ckpt.mask = spec.model;
      ckpt.has_optimizer = true;
      ckpt.adam_m = adam.m();
      ckpt.adam_v = adam.v();
      ckpt.adam_t = adam.t();
      rl::CheckpointMeta meta;
      meta.step = steps;
      meta.update = update;
      meta.config_hash = hash;
      meta.seed = seed;
      meta.mask = env::to_string(spec.model);
      // Resuming restarts the episodes in flight, so count them as consumed.
      meta.episodes = episodes;
      rl::save_checkpoint(checkpoint_path(run_dir, k * every), ckpt, meta);
    }
  }
  result.steps = steps;

  // Best checkpoint by success rate, then mean reward, then earliest.
  const std::uint64_t selection_root = derive_seed(seed, kSelectionStream);
  for (const fs::path& p : list_checkpoints(run_dir)) {
    const rl::Checkpoint ckpt = rl::load_checkpoint(p);
    const EvalReport rep = evaluate_policy(spec, ckpt.params, ckpt.normalizer,
                                           spec.selection_episodes, selection_root);
    result.scores.push_back({p, rl::load_checkpoint_meta(p).step, rep.success_mean,
                             rep.reward_mean});
  }
  write_selection(run_dir / "selection.csv", result.scores);
  if (result.scores.empty()) {
    throw InvalidConfig("total_steps below checkpoint_every: no checkpoint to select");
  }
  result.best = result.scores.front();
  for (const CheckpointScore& s : result.scores) {
    if (s.success_rate > result.best.success_rate ||
        (s.success_rate == result.best.success_rate && s.mean_reward > result.best.mean_reward)) {
      result.best = s;
    }
  }
  result.best_checkpoint = run_dir / "best.ckpt";
  fs::copy_file(result.best.path, result.best_checkpoint, fs::copy_options::overwrite_existing);
  fs::copy_file(rl::sidecar_path(result.best.path), rl::sidecar_path(result.best_checkpoint),
                fs::copy_options::overwrite_existing);

  const rl::Checkpoint best = rl::load_checkpoint(result.best_checkpoint);
  SafeEnv env(spec);
  PolicyController controller(best.params, best.normalizer, spec.model, nullptr);
  for (int i = 0; i < spec.trajectory_samples; ++i) {
    const EpisodeResult r = run_episode(
        env, controller, derive_seed(seed, kSampleStream, static_cast<std::uint64_t>(i)), true);
    write_trajectory(run_dir / "trajectories" / ("episode_" + std::to_string(i) + ".csv"),
                     r.records);
  }
  return result;
}

std::vector<TrainResult> train(const ExperimentSpec& spec, const ProgressFn& progress) {
  std::vector<TrainResult> out;
  for (std::uint64_t seed : spec.seeds) {
    out.push_back(train_one(spec, seed, seed_run_dir(spec, seed), progress));
  }
  return out;
}

}  // namespace pegsafe::harness
