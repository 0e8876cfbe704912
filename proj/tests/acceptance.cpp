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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// selected criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "pegsafe/ablation.hpp"
#include "pegsafe/errors.hpp"
#include "pegsafe/evaluate.hpp"
#include "pegsafe/experiment.hpp"
#include "pegsafe/geometry.hpp"
#include "pegsafe/policy.hpp"
#include "pegsafe/ppo.hpp"
#include "pegsafe/reward.hpp"
#include "pegsafe/safety.hpp"
#include "pegsafe/trainer.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
namespace ph = pegsafe::harness;
using pegsafe::geometry::CrossSection;
using pegsafe::geometry::PlanarPose;
using pegsafe::geometry::Vec2;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string printf_str(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------- reward

Verdict reward_arithmetic() {
  const double alpha[5] = {2.30, 2.30, 1.23, 2.0, 0.5};
  const pegsafe::reward::RewardParams params;
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> cases = {
      {{0, 0, 0}, {0, 0, 0}},
      {{0.1, 0, 0}, {0, 0, 0}},
      {{0, 0, 0.005}, {0, 0, 0}},
      {{0, 0, -0.005}, {0, 0, 0}},
      {{0, 0.02, 0}, {0, 0, 0}},
      {{0.00005, 0, 0}, {0, 0, 0}},
      {{0.0001, 0, 0}, {0, 0, 0}},
      {{0, 0, -0.00999}, {0, 0, 0}},
      {{0, 0, -0.01}, {0, 0, 0}},
      {{0.003, -0.004, 0}, {0, 0, 0}},
      {{0.012, -0.015, -0.020}, {0.01, -0.01, -0.02}},
      {{-0.03, 0.04, 0.02}, {0.0, 0.0, -0.02}},
      {{0.001, 0.001, -0.021}, {0.001, 0.001, -0.02}},
      {{0.001, 0.001, -0.019}, {0.001, 0.001, -0.02}},
      {{0.00003, -0.00004, -0.02}, {0, 0, -0.02}},
      {{0.015, 0.0, 0.02}, {0.0, 0.015, -0.02}},
      {{0.2, -0.1, 0.05}, {-0.1, 0.1, 0.0}},
      {{0.004, 0.004, -0.0245}, {0.0, 0.0, -0.02}},
      {{-0.0051, 0.0, -0.0205}, {0.0, 0.0, -0.02}},
      {{0.0, 0.0, 0.0}, {0.0, 0.0, -0.02}},
  };
  double worst = 0.0;
  bool exact = pegsafe::reward::reward(cases[0].first, cases[0].second, params) == 2.0;
  for (const auto& [pe, ph_] : cases) {
    worst = std::max(worst, std::abs(pegsafe::reward::reward(pe, ph_, params) -
                                     oracle::reward(pe, ph_, alpha, 1e-4, 0.01)));
  }
  return {worst < 1e-9 && exact,
          printf_str("20 vectors, max |diff| %.3g, identity case %s", worst) + (exact ? "2.0" : "wrong")};
}

// ---------------------------------------------------------------- lock

struct TraceStep {
  std::array<double, 6> f{};
  Eigen::Vector3d lateral = Eigen::Vector3d::Zero();  // mm
  double proposed_dz = -1.0;                             // mm
};

// Feeds the trace to both implementations closing the loop on the commanded
// motion; returns the largest disagreement of z_c and command.
double compare_trace(const std::vector<TraceStep>& trace, int* limited_steps) {
  using namespace pegsafe::safety;
  DslParams params;
  DslState state;
  oracle::LockTranscript transcript;
  Eigen::Vector3d pos(0.0, 0.0, 0.004);  // metres
  double worst = 0.0;
  *limited_steps = 0;
  for (const TraceStep& s : trace) {
    pegsafe::env::Observation obs;
    obs.p_ee = pos * 1000.0;
    for (int i = 0; i < 6; ++i) obs.wrench_normalized(i) = s.f[static_cast<std::size_t>(i)];
    pegsafe::env::Action proposed;
    proposed.delta = Eigen::Vector3d(s.lateral.x(), s.lateral.y(), s.proposed_dz);
    const FilterOutput out = dsl_filter(state, params, proposed, obs);
    const double expected = transcript.step(s.f, pos, s.proposed_dz);
    worst = std::max(worst, std::abs(out.action.delta.z() - expected) / 1000.0);
    const bool limited = out.state.phase == Phase::kLimited;
    if (limited != transcript.limited) return INFINITY;
    if (limited) {
      ++*limited_steps;
      worst = std::max(worst, std::abs(out.state.z_c - transcript.z_c));
      if (to_string(out.state.branch) != transcript.branch) return INFINITY;
    }
    state = out.state;
    pos += Eigen::Vector3d(s.lateral.x(), s.lateral.y(), out.action.delta.z()) / 1000.0;
  }
  return worst;
}

std::array<double, 6> wrench(double fz, double fx = 0, double tx = 0, double fy = 0, double ty = 0) {
  return {fx, fy, fz, tx, ty, 0.0};
}

Verdict lock_transcripts() {
  std::map<std::string, std::vector<TraceStep>> traces;
  {
    auto& t = traces["flat press"];
    for (int k = 0; k < 5; ++k) t.push_back({wrench(0.05 * k), {}, -1.0});
    for (int k = 0; k < 6; ++k) t.push_back({wrench(0.7), {}, -2.0});
  }
  {
    auto& t = traces["edge contact"];
    for (int k = 0; k < 4; ++k) t.push_back({wrench(0.1), {}, -1.0});
    t.push_back({wrench(0.3, 0.25, 0.12, -0.05, 0.02), {}, -1.0});
    for (int k = 0; k < 5; ++k) t.push_back({wrench(0.65, 0.3, 0.15), {}, -2.0});
  }
  {
    auto& t = traces["sub-threshold press"];
    for (int k = 0; k < 12; ++k) t.push_back({wrench(0.04 * k, 0.02 * k), {}, -0.5});
  }
  {
    auto& t = traces["lift and re-press"];
    for (int k = 0; k < 4; ++k) t.push_back({wrench(0.0), {}, -1.0});
    t.push_back({wrench(0.6), {}, -1.0});
    t.push_back({wrench(0.55), {}, 1.5});
    t.push_back({wrench(0.0), {}, 1.0});
    for (int k = 0; k < 3; ++k) t.push_back({wrench(0.1 * k), {}, -0.5});
    t.push_back({wrench(0.2, 0.2, 0.0), {}, -0.5});
    t.push_back({wrench(0.62, 0.1, 0.05), {}, -2.0});
    t.push_back({wrench(0.7), {}, -2.0});
  }
  {
    auto& t = traces["lateral slide"];
    for (int k = 0; k < 4; ++k) t.push_back({wrench(0.0), {0.5, 0.0, 0.0}, -1.0});
    for (int k = 0; k < 12; ++k) {
      const double fz = k % 3 == 0 ? 0.2 : 0.58;
      t.push_back({wrench(fz, 0.05 * (k % 2), 0.03), {1.0, -0.5, 0.0}, -1.5});
    }
  }
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, trace] : traces) {
    int limited = 0;
    const double d = compare_trace(trace, &limited);
    worst = std::max(worst, d);
    detail += name + " (" + std::to_string(limited) + " locked) ";
  }
  return {worst < 1e-12, detail + printf_str("max |diff| %.3g", worst)};
}

// ---------------------------------------------------------------- geometry

oracle::Poly world_outline(const CrossSection& s, const PlanarPose& pose) {
  oracle::Poly out;
  for (const Vec2& v : s.vertices()) out.push_back(oracle::rigid(v, pose.x(), pose.y(), pose.yaw()));
  return out;
}

CrossSection random_convex(std::mt19937_64& rng, double radius) {
  std::uniform_int_distribution<int> nv(3, 9);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI), rad(0.6, 1.0);
  for (;;) {
    std::vector<double> a(static_cast<std::size_t>(nv(rng)));
    for (double& x : a) x = ang(rng);
    std::sort(a.begin(), a.end());
    std::vector<Vec2> v;
    const double r = radius * rad(rng);
    for (double x : a) v.emplace_back(r * std::cos(x), r * std::sin(x));
    try {
      return CrossSection::polygon(v);
    } catch (const pegsafe::InvalidShape&) {
    }
  }
}

Verdict geometry_sampling() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int judged = 0, banded = 0, wrong = 0;
  double worst_depth = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const CrossSection peg = random_convex(rng, 10.0);
    const CrossSection hole =
        k % 2 == 0 ? peg.dilated(0.5 + 3.0 * (u(rng) + 1.0)) : random_convex(rng, 13.0);
    const PlanarPose h(3 * u(rng), 3 * u(rng), 3 * u(rng));
    const PlanarPose p(h.x() + 2.5 * u(rng), h.y() + 2.5 * u(rng), k % 2 == 0 ? h.yaw() + 0.2 * u(rng) : 3 * u(rng));
    const oracle::Poly outline = world_outline(peg, p);
    std::vector<Vec2> pts = oracle::sample_region(outline, 50000, 50000 - static_cast<int>(outline.size()), rng);
    pts.insert(pts.end(), outline.begin(), outline.end());
    const auto o = oracle::sampled_overlap(world_outline(hole, h), pts);
    if (o.depth > 0.0 && o.depth <= 0.05) {
      ++banded;
      continue;
    }
    ++judged;
    const bool fits = pegsafe::geometry::contains(hole, h, peg, p);
    const double d = pegsafe::geometry::overlap_depth(hole, h, peg, p);
    if (o.depth == 0.0) {
      if (!fits && d > 0.05) ++wrong;
    } else {
      if (fits) ++wrong;
      worst_depth = std::max(worst_depth, std::abs(d - o.depth));
    }
  }
  // Concentric circles against the closed form.
  double worst_circle = 0.0;
  int circle_wrong = 0;
  std::uniform_real_distribution<double> r(1.0, 30.0), f(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double rp = r(rng), rh = rp + 5.0 * f(rng) + 0.01;
    const double off = (rh - rp) * 2.0 * f(rng), a = M_PI * u(rng);
    const PlanarPose pose(off * std::cos(a), off * std::sin(a), M_PI * u(rng));
    const double offset = std::hypot(pose.x(), pose.y());
    const CrossSection hc = CrossSection::circle(rh), pc = CrossSection::circle(rp);
    if (pegsafe::geometry::contains(hc, PlanarPose(), pc, pose) != (offset <= rh - rp)) ++circle_wrong;
    worst_circle = std::max(worst_circle, std::abs(pegsafe::geometry::overlap_depth(hc, PlanarPose(), pc, pose) -
                                                   std::max(0.0, offset - (rh - rp))));
  }
  const bool pass = wrong == 0 && worst_depth < 0.05 && circle_wrong == 0 && worst_circle < 1e-12 &&
                    judged >= 900;
  return {pass, printf_str("%.0f judged, %.0f in band, %.0f disagreements, max depth diff %.3g mm", judged, banded,
                           wrong, worst_depth) +
                    printf_str("; circles: %.0f wrong, max diff %.3g", circle_wrong, worst_circle)};
}

// ---------------------------------------------------------------- ppo

Verdict ppo_numerics() {
  using namespace pegsafe::rl;
  double worst_rel = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    PolicyParams params(Architecture{13, 4, {5, 3}});
    params.init(seed, -0.4);
    std::mt19937_64 rng(seed * 31);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Eigen::Index i = 0; i < params.flat().size(); ++i) params.flat()(i) += 0.2 * g(rng);
    const int n = 16;
    Matrix obs(13, n), raw(4, n);
    Vector old_lp(n), adv(n), ret(n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < 13; ++i) obs(i, j) = g(rng);
      const ActResult a = act(params, obs.col(j), &rng);
      raw.col(j) = a.raw;
      old_lp(j) = a.log_prob + 0.05 * g(rng);
      adv(j) = g(rng);
      ret(j) = g(rng);
    }
    PpoConfig cfg;
    cfg.entropy_coef = 0.01;
    cfg.clip = 5.0;
    Vector grad;
    ppo_loss(params, obs, raw, old_lp, adv, ret, cfg, &grad);
    PolicyParams probe = params;
    const Vector fd = oracle::numeric_gradient(
        [&](const Eigen::VectorXd& x) {
          probe.flat() = x;
          return ppo_loss(probe, obs, raw, old_lp, adv, ret, cfg, nullptr).total;
        },
        params.flat());
    worst_rel = std::max(worst_rel, (grad - fd).norm() / fd.norm());
  }
  double worst_gae = 0.0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const int n = 1 + k % 10;
    std::vector<double> r(n), v(n), d(n);
    for (int t = 0; t < n; ++t) {
      r[t] = u(rng);
      v[t] = u(rng);
      d[t] = u(rng) > 0.5 ? 1.0 : 0.0;
    }
    const double boot = u(rng), gamma = 0.9 + 0.1 * std::abs(u(rng)), lambda = std::abs(u(rng));
    std::vector<double> a_ref, r_ref;
    oracle::brute_gae(r, v, d, boot, gamma, lambda, a_ref, r_ref);
    Vector adv, ret;
    compute_gae(Eigen::Map<Vector>(r.data(), n), Eigen::Map<Vector>(v.data(), n),
                Eigen::Map<Vector>(d.data(), n), boot, gamma, lambda, adv, ret);
    for (int t = 0; t < n; ++t) worst_gae = std::max(worst_gae, std::abs(adv(t) - a_ref[static_cast<std::size_t>(t)]));
  }
  return {worst_rel < 1e-4 && worst_gae < 1e-10,
          printf_str("gradient max rel err %.3g, advantage max |diff| %.3g", worst_rel, worst_gae)};
}

// ---------------------------------------------------------------- force bound

Verdict force_bound() {
  ph::ExperimentSpec spec;
  ph::resolve_geometry(spec);
  const double bound = spec.dsl.contact_threshold +
                       spec.env.contact.k_n * spec.env.max_step_xyz / spec.env.contact.full_scale(2);
  ph::SafeEnv dsl_env(spec);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    testing::RandomController ctl(ph::derive_seed(900, i));
    worst = std::max(worst, ph::run_episode(dsl_env, ctl, ph::derive_seed(901, i), false).peak_fz);
  }
  ph::ExperimentSpec sliding = spec;
  sliding.safety = pegsafe::safety::SafetyVariant::kSliding;
  ph::SafeEnv slide_env(sliding);
  int higher = 0;
  for (int i = 0; i < 100; ++i) {
    testing::PressingController a(ph::derive_seed(902, i)), b(ph::derive_seed(902, i));
    const double p_dsl = ph::run_episode(dsl_env, a, ph::derive_seed(903, i), false).peak_fz;
    const double p_slide = ph::run_episode(slide_env, b, ph::derive_seed(903, i), false).peak_fz;
    higher += p_slide > p_dsl;
  }
  return {worst <= bound && higher >= 95,
          printf_str("random policy peak F_z %.4f (bound %.4f); sliding above lock in %.0f/100 pressing pairs",
                     worst, bound, higher)};
}

// ---------------------------------------------------------------- training

struct Training {
  fs::path matrix_file;
  ph::AblationMatrix matrix;
  std::vector<std::map<std::string, std::string>> cells;  // ablation.csv rows
  std::vector<std::map<std::string, std::string>> generalization;
  std::string error;
  bool loaded = false;
};

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::istringstream in(testing::slurp(path));
  std::vector<std::map<std::string, std::string>> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char c : s) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        out.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    out.push_back(cell);
    return out;
  };
  const auto header = split(line);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(row);
  }
  return rows;
}

// Runs the matrix, reusing finished seeds found under the run root.
Training& training(const fs::path& matrix_file) {
  static Training t;
  if (t.loaded) return t;
  t.loaded = true;
  t.matrix_file = matrix_file;
  try {
    t.matrix = ph::load_matrix(matrix_file);
    const auto start = std::chrono::steady_clock::now();
    const ph::AblationResult res = ph::run_ablation(t.matrix);
    const double minutes =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
    std::printf("ablation finished in %.1f min, results in %s\n", minutes, res.dir.string().c_str());
    t.cells = read_csv(res.dir / "ablation.csv");
    t.generalization = read_csv(res.dir / "generalization.csv");
  } catch (const std::exception& e) {
    t.error = e.what();
  }
  return t;
}

double median_success(const Training& t, const std::string& cell) {
  std::vector<double> xs;
  for (const auto& row : t.cells) {
    if (row.at("cell") == cell && row.at("status") == "ok") xs.push_back(std::stod(row.at("success_mean")));
  }
  return xs.empty() ? NAN : ph::median(xs);
}

double median_generalization(const Training& t, const std::string& shape) {
  std::vector<double> xs;
  for (const auto& row : t.generalization) {
    if (row.at("shape") == shape && row.at("status") == "ok") xs.push_back(std::stod(row.at("success_mean")));
  }
  return xs.empty() ? NAN : ph::median(xs);
}

Verdict training_outcome(const fs::path& matrix_file) {
  const Training& t = training(matrix_file);
  if (!t.error.empty()) return {false, "ablation failed: " + t.error};
  const double vftm4 = median_success(t, "VFTM-DSL-4mm"), ftm4 = median_success(t, "FTM-DSL-4mm"),
               vm4 = median_success(t, "VM-DSL-4mm"), slide4 = median_success(t, "VFTM-Sliding-4mm"),
               vftm1 = median_success(t, "VFTM-DSL-1mm"), slide1 = median_success(t, "VFTM-Sliding-1mm");
  const bool a = vftm4 >= 0.70;
  const bool b = vftm4 > ftm4 && ftm4 > vm4;
  const bool c = vftm4 > slide4 && vftm1 > slide1;
  std::string detail = printf_str("(a) VFTM-DSL 4mm %.4f %s; ", vftm4) + (a ? "ok" : "below 0.70") +
                       printf_str("; (b) VFTM %.4f / FTM %.4f / VM %.4f ", vftm4, ftm4, vm4) +
                       (b ? "ordered" : "not ordered") +
                       printf_str("; (c) 4mm DSL %.4f vs Sliding %.4f, 1mm DSL %.4f vs Sliding %.4f ", vftm4,
                                  slide4, vftm1, slide1) +
                       (c ? "ok" : "not ok");
  return {a && b && c, detail};
}

Verdict determinism(const fs::path& matrix_file, const fs::path& scratch_root) {
  Training& t = training(matrix_file);
  if (!t.error.empty()) return {false, "ablation failed: " + t.error};
  ph::ExperimentSpec spec = t.matrix.cell_spec(t.matrix.cells.front());
  spec.seeds = {spec.seeds.front()};
  std::vector<std::string> metrics, evals;
  for (int run = 0; run < 2; ++run) {
    spec.run_dir = (scratch_root / ("determinism_" + std::to_string(run))).string();
    fs::remove_all(spec.run_dir);
    const ph::TrainResult r = ph::train(spec).front();
    metrics.push_back(testing::slurp(r.run_dir / "metrics.csv"));
    const ph::EvalReport rep = ph::evaluate(r.best_checkpoint, spec);
    ph::write_eval_outputs(rep, r.run_dir / "eval");
    evals.push_back(testing::slurp(r.run_dir / "eval" / "episodes.csv") +
                    testing::slurp(r.run_dir / "eval" / "summary.csv"));
  }
  // The ablation's own copy of the same cell and seed.
  spec.run_dir.clear();
  const fs::path original = ph::seed_run_dir(spec, spec.seeds.front()) / "metrics.csv";
  const bool same_as_ablation = fs::exists(original) && testing::slurp(original) == metrics[0];
  const bool pass = metrics[0] == metrics[1] && evals[0] == evals[1] && !metrics[0].empty();
  return {pass, std::string("metrics.csv ") + (metrics[0] == metrics[1] ? "identical" : "differs") +
                    ", eval CSVs " + (evals[0] == evals[1] ? "identical" : "differ") +
                    ", ablation copy " + (same_as_ablation ? "identical" : "not compared equal")};
}

Verdict shape_generalization(const fs::path& matrix_file) {
  const Training& t = training(matrix_file);
  if (!t.error.empty()) return {false, "ablation failed: " + t.error};
  const double tr = median_generalization(t, "tr"), rtr = median_generalization(t, "rtr"),
               trm = median_generalization(t, "trm"), cir = median_generalization(t, "cir");
  const bool pass = rtr >= 0.5 * tr && trm >= 0.5 * tr && cir < rtr && cir < trm;
  return {pass, printf_str("tr %.4f, rtr %.4f, trm %.4f, cir %.4f", tr, rtr, trm, cir)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pegsafe acceptance criteria"};
  std::vector<int> selected = {1, 2, 3, 4, 5, 6, 7, 8};
  std::string matrix = PEGSAFE_SOURCE_DIR "/configs/table1.cfg";
  std::string scratch = (fs::temp_directory_path() / "pegsafe_acceptance").string();
  app.add_option("--criteria", selected, "Criteria to run")->delimiter(',');
  app.add_option("--matrix", matrix, "Ablation matrix for the training criteria");
  app.add_option("--scratch", scratch, "Scratch directory for repeat runs");
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria = {
      {1, {"reward arithmetic", reward_arithmetic}},
      {2, {"lock transcript equivalence", lock_transcripts}},
      {3, {"geometry against sampling", geometry_sampling}},
      {4, {"PPO numerics", ppo_numerics}},
      {5, {"force bound", force_bound}},
      {6, {"training outcome", [&] { return training_outcome(matrix); }}},
      {7, {"determinism", [&] { return determinism(matrix, scratch); }}},
      {8, {"shape generalization", [&] { return shape_generalization(matrix); }}},
  };
  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::printf("criterion %d: FAIL  unknown criterion\n", id);
      ++failures;
      continue;
    }
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d (%s): %s  %s  [%.1f s]\n", id, it->second.first.c_str(), v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
