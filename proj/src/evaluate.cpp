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

#include "pegsafe/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "pegsafe/errors.hpp"

namespace pegsafe::harness {

namespace {

double population_variance(const std::vector<double>& xs, double mean) {
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

}  // namespace

EvalReport evaluate_policy(const ExperimentSpec& spec, const rl::PolicyParams& params,
                           const rl::ObsNormalizer& normalizer, int episodes,
                           std::uint64_t seed_root) {
  if (episodes < 1) throw InvalidConfig("need at least one evaluation episode");
  EvalReport report;
  report.model = env::to_string(spec.model);
  report.safety = safety::to_string(spec.effective_safety());
  report.shape = spec.shape;
  report.clearance = spec.clearance ? *spec.clearance
                                    : geometry::clearance_for_gap_proportion(
                                          spec.env.peg, *spec.gap_proportion);
  report.gap_proportion = geometry::gap_proportion(spec.env.peg, spec.env.hole);
  report.episodes = episodes;
  report.spec_hash = spec.hash();

  SafeEnv env(spec);
  PolicyController controller(params, normalizer, spec.model, nullptr);
  std::vector<double> rewards, successes;
  int estops = 0;
  for (int i = 0; i < episodes; ++i) {
    const std::uint64_t seed = derive_seed(seed_root, static_cast<std::uint64_t>(i));
    const EpisodeResult r = run_episode(env, controller, seed, false);
    report.records.push_back({i, seed, r.total_reward, r.success, r.estop, r.steps, r.peak_fz});
    rewards.push_back(r.total_reward);
    successes.push_back(r.success ? 1.0 : 0.0);
    report.peak_fz = std::max(report.peak_fz, r.peak_fz);
    estops += r.estop ? 1 : 0;
  }
  const double n = static_cast<double>(episodes);
  for (double r : rewards) report.reward_mean += r;
  report.reward_mean /= n;
  for (double s : successes) report.success_mean += s;
  report.success_mean /= n;
  report.reward_var = population_variance(rewards, report.reward_mean);
  report.success_var = population_variance(successes, report.success_mean);
  report.estop_rate = estops / n;
  return report;
}

std::string checkpoint_identity(const std::filesystem::path& checkpoint) {
  std::ifstream in(checkpoint, std::ios::binary);
  if (!in) throw IncompatibleCheckpoint("cannot open " + checkpoint.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return checkpoint.filename().string() + "@" + rl::hash_hex(rl::fnv1a64(bytes));
}

EvalReport evaluate(const std::filesystem::path& checkpoint, const ExperimentSpec& spec) {
  const rl::Checkpoint ckpt = rl::load_checkpoint(checkpoint);
  rl::check_compatible(ckpt, spec.architecture(), spec.model);
  EvalReport report =
      evaluate_policy(spec, ckpt.params, ckpt.normalizer, spec.eval_episodes, spec.eval_seed);
  report.checkpoint_id = checkpoint_identity(checkpoint);
  return report;
}

std::vector<std::string> summary_columns() {
  return {"model",          "safety",      "shape",       "clearance_mm", "gap_proportion",
          "episodes",       "reward_mean", "reward_var",  "success_mean", "success_var",
          "peak_fz",        "estop_rate",  "spec_hash",   "checkpoint"};
}

std::string summary_row(const EvalReport& r) {
  return join({r.model, r.safety, r.shape, fmt(r.clearance), fmt(r.gap_proportion),
               std::to_string(r.episodes), fmt(r.reward_mean), fmt(r.reward_var),
               fmt(r.success_mean), fmt(r.success_var), fmt(r.peak_fz), fmt(r.estop_rate),
               r.spec_hash, r.checkpoint_id});
}

void write_eval_outputs(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "episodes.csv", std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "episodes.csv").string());
    out << "episode,seed,reward,success,estop,steps,peak_fz\n";
    for (const EpisodeSummary& e : report.records) {
      out << e.index << "," << e.seed << "," << fmt(e.reward) << "," << (e.success ? 1 : 0)
          << "," << (e.estop ? 1 : 0) << "," << e.steps << "," << fmt(e.peak_fz) << "\n";
    }
  }
  std::ofstream out(dir / "summary.csv", std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "summary.csv").string());
  out << join(summary_columns()) << "\n" << summary_row(report) << "\n";
}

}  // namespace pegsafe::harness
