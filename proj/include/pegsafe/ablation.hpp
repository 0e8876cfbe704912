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

#ifndef PEGSAFE_ABLATION_HPP_
#define PEGSAFE_ABLATION_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "pegsafe/evaluate.hpp"
#include "pegsafe/experiment.hpp"
#include "pegsafe/keyvalue.hpp"

namespace pegsafe::harness {

struct MatrixCell {
  std::string model;    // VFTM | FTM | VM
  std::string safety;   // DSL | Sliding | None
  double clearance = 0.0;  // mm

  std::string id() const;  // e.g. "VFTM-DSL-4mm"
};

struct GeneralizationTarget {
  std::string shape;
  double gap_proportion = 0.0;
};

// Matrix file: a [matrix] section plus base overrides in the usual spec
// sections.
//   [matrix]
//   name = table1
//   models = VFTM, FTM, VM         (crossed with safety and clearance)
//   safety = DSL, Sliding
//   clearance = 4, 1
//   cells = VFTM/DSL/4, VM/None/4  (instead of the three lists)
//   generalize = rtr@0.247, cir@0.1378
//   generalize_from = VFTM/DSL/4   (default: first cell)
struct AblationMatrix {
  std::string name = "ablation";
  std::vector<MatrixCell> cells;
  std::vector<GeneralizationTarget> generalize;
  int generalize_from = 0;  // index into cells
  KeyValueConfig base;      // spec keys shared by every cell
  std::filesystem::path base_dir;

  // Spec for one cell. VM paired with DSL gets beta2 = 0, which disables the
  // lock. Throws InvalidConfig for combinations that cannot run.
  ExperimentSpec cell_spec(const MatrixCell& cell) const;
};

AblationMatrix matrix_from_config(const KeyValueConfig& cfg,
                                  const std::filesystem::path& base_dir = {});
AblationMatrix load_matrix(const std::filesystem::path& path);

struct CellResult {
  MatrixCell cell;
  std::string spec_hash;
  bool ok = false;
  std::string error;
  std::vector<std::uint64_t> seeds;
  std::vector<EvalReport> reports;  // one per seed, best checkpoint
  double median_success = 0.0;
  double median_reward = 0.0;
  double peak_fz = 0.0;  // max over seeds
};

struct GeneralizationRow {
  std::string source;
  std::uint64_t seed = 0;
  std::string shape;
  double gap_proportion = 0.0;
  bool ok = false;
  std::string error;
  EvalReport report;
};

struct AblationResult {
  std::filesystem::path dir;
  std::vector<CellResult> cells;
  std::vector<GeneralizationRow> generalization;

  bool all_ok() const;
};

// Trains and evaluates every cell, then the generalization targets. Writes
// ablation.csv, generalization.csv and summary.md under
// run_root / <matrix name>. A failing cell is recorded and skipped.
AblationResult run_ablation(const AblationMatrix& matrix);

double median(std::vector<double> xs);

}  // namespace pegsafe::harness

#endif  // PEGSAFE_ABLATION_HPP_
