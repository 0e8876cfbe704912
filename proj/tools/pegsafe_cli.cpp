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

// pegsafe: train, evaluate, ablate and replay peg-in-hole experiments.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pegsafe/ablation.hpp"
#include "pegsafe/errors.hpp"
#include "pegsafe/evaluate.hpp"
#include "pegsafe/experiment.hpp"
#include "pegsafe/replay.hpp"
#include "pegsafe/trainer.hpp"

namespace ph = pegsafe::harness;
namespace fs = std::filesystem;

namespace {

int run_train(const std::string& spec_path, bool quiet) {
  const ph::ExperimentSpec spec = ph::load_spec(spec_path);
  ph::ProgressFn progress;
  if (!quiet) {
    progress = [](std::int64_t update, std::int64_t steps, double reward, double success) {
      std::fprintf(stderr, "update %lld  steps %lld  reward %.3f  success %.3f\n",
                   static_cast<long long>(update), static_cast<long long>(steps), reward,
                   success);
    };
  }
  for (const ph::TrainResult& r : ph::train(spec, progress)) {
    std::printf("seed %llu: %s  best %s (step %lld, selection success %.4f)\n",
                static_cast<unsigned long long>(r.seed), r.run_dir.string().c_str(),
                r.best.path.filename().string().c_str(), static_cast<long long>(r.best.step),
                r.best.success_rate);
  }
  return 0;
}

int run_eval(const std::string& checkpoint, const std::string& spec_path, std::string out_dir,
             int episodes) {
  ph::ExperimentSpec spec = ph::load_spec(spec_path);
  if (episodes > 0) spec.eval_episodes = episodes;
  const ph::EvalReport report = ph::evaluate(checkpoint, spec);
  if (out_dir.empty()) {
    out_dir = (fs::path(checkpoint).parent_path() / ("eval_" + fs::path(spec_path).stem().string()))
                  .string();
  }
  ph::write_eval_outputs(report, out_dir);
  const auto cols = ph::summary_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) std::printf("%s%s", i ? "," : "", cols[i].c_str());
  std::printf("\n%s\n", ph::summary_row(report).c_str());
  return 0;
}

int run_ablate(const std::string& matrix_path) {
  const ph::AblationMatrix matrix = ph::load_matrix(matrix_path);
  const ph::AblationResult res = ph::run_ablation(matrix);
  for (const ph::CellResult& c : res.cells) {
    if (c.ok) {
      std::printf("%-22s success %.4f  reward %.3f  peak F_z %.3f\n", c.cell.id().c_str(),
                  c.median_success, c.median_reward, c.peak_fz);
    } else {
      std::printf("%-22s FAILED: %s\n", c.cell.id().c_str(), c.error.c_str());
    }
  }
  for (const ph::GeneralizationRow& g : res.generalization) {
    if (g.ok) {
      std::printf("generalize %s@%g seed %llu: success %.4f\n", g.shape.c_str(), g.gap_proportion,
                  static_cast<unsigned long long>(g.seed), g.report.success_mean);
    } else {
      std::printf("generalize %s@%g FAILED: %s\n", g.shape.c_str(), g.gap_proportion,
                  g.error.c_str());
    }
  }
  std::printf("results in %s\n", res.dir.string().c_str());
  return res.all_ok() ? 0 : 1;
}

int run_replay(const std::string& csv, std::string config, std::string svg) {
  if (config.empty()) config = ph::find_run_config(csv).string();
  const ph::ExperimentSpec spec = ph::load_spec(config);
  const ph::ReplaySummary sum = ph::replay(ph::TrajectoryTable::read(csv), spec);
  if (svg.empty()) svg = fs::path(csv).replace_extension(".svg").string();
  std::ofstream(svg) << sum.svg;
  std::printf("%schart: %s\n", sum.text.c_str(), svg.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peg-in-hole insertion with a force-feedback safety lock"};
  app.require_subcommand(1);

  std::string spec_path, checkpoint, matrix_path, csv, config, svg, out_dir;
  bool quiet = false;
  int episodes = 0;

  CLI::App* train = app.add_subcommand("train", "Train every seed of a spec");
  train->add_option("spec", spec_path, "Experiment spec file")->required()->check(CLI::ExistingFile);
  train->add_flag("-q,--quiet", quiet, "No per-update progress");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint with mean actions");
  eval->add_option("checkpoint", checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("spec", spec_path, "Experiment spec file")->required()->check(CLI::ExistingFile);
  eval->add_option("-o,--out", out_dir, "Output directory");
  eval->add_option("-n,--episodes", episodes, "Override eval_episodes");

  CLI::App* ablate = app.add_subcommand("ablate", "Train and evaluate a matrix of cells");
  ablate->add_option("matrix", matrix_path, "Matrix file")->required()->check(CLI::ExistingFile);

  CLI::App* rep = app.add_subcommand("replay", "Verify and chart a trajectory log");
  rep->add_option("csv", csv, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  rep->add_option("-c,--config", config, "Spec (default: config.resolved of the run)");
  rep->add_option("--svg", svg, "Chart output (default: next to the CSV)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(spec_path, quiet);
    if (*eval) return run_eval(checkpoint, spec_path, out_dir, episodes);
    if (*ablate) return run_ablate(matrix_path);
    if (*rep) return run_replay(csv, config, svg);
  } catch (const pegsafe::ReplayDivergence& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const pegsafe::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
