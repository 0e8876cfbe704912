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

#include "pegsafe/ablation.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "pegsafe/errors.hpp"
#include "pegsafe/trainer.hpp"

namespace pegsafe::harness {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("bad " + what + " '" + s + "'");
  }
}

// Canonical spellings, so "vftm" and "VFTM" name the same cell.
MatrixCell make_cell(const std::string& model, const std::string& safety, double clearance) {
  MatrixCell c;
  c.model = env::to_string(env::parse_mask(model));
  c.safety = safety::to_string(safety::parse_safety(safety));
  c.clearance = clearance;
  return c;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * x);
  return buf;
}

std::string num(double x, const char* f = "%.4f") {
  char buf[32];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

int model_rank(const std::string& m) { return m == "VFTM" ? 0 : m == "FTM" ? 1 : 2; }
int safety_rank(const std::string& s) { return s == "DSL" ? 0 : s == "Sliding" ? 1 : 2; }

void write_outputs(const AblationResult& res) {
  fs::create_directories(res.dir);
  {
    std::ofstream out(res.dir / "ablation.csv", std::ios::trunc);
    out << "cell,seed,status,error";
    for (const std::string& c : summary_columns()) out << "," << c;
    out << "\n";
    for (const CellResult& c : res.cells) {
      if (!c.ok) {
        out << c.cell.id() << ",,failed," << csv_escape(c.error);
        for (std::size_t i = 0; i < summary_columns().size(); ++i) out << ",";
        out << "\n";
        continue;
      }
      for (std::size_t i = 0; i < c.reports.size(); ++i) {
        out << c.cell.id() << "," << c.seeds[i] << ",ok,," << summary_row(c.reports[i]) << "\n";
      }
    }
  }
  {
    std::ofstream out(res.dir / "generalization.csv", std::ios::trunc);
    out << "source,seed,shape,gap_proportion,status,error,clearance_mm,episodes,success_mean,"
           "success_var,reward_mean,reward_var,peak_fz\n";
    for (const GeneralizationRow& g : res.generalization) {
      out << g.source << "," << g.seed << "," << g.shape << "," << fmt(g.gap_proportion) << ","
          << (g.ok ? "ok" : "failed") << "," << csv_escape(g.error) << ",";
      if (g.ok) {
        const EvalReport& r = g.report;
        out << fmt(r.clearance) << "," << r.episodes << "," << fmt(r.success_mean) << ","
            << fmt(r.success_var) << "," << fmt(r.reward_mean) << "," << fmt(r.reward_var)
            << "," << fmt(r.peak_fz);
      } else {
        out << ",,,,,,";
      }
      out << "\n";
    }
  }

  // Table I layout: one row per model/safety pair, one column group per
  // clearance, medians over seeds.
  std::vector<double> clearances;
  std::vector<std::pair<std::string, std::string>> rows;
  for (const CellResult& c : res.cells) {
    if (std::find(clearances.begin(), clearances.end(), c.cell.clearance) == clearances.end()) {
      clearances.push_back(c.cell.clearance);
    }
    const auto key = std::make_pair(c.cell.model, c.cell.safety);
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
  }
  std::sort(clearances.begin(), clearances.end(), std::greater<>());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::make_pair(model_rank(a.first), safety_rank(a.second)) <
           std::make_pair(model_rank(b.first), safety_rank(b.second));
  });
  std::ofstream md(res.dir / "summary.md", std::ios::trunc);
  md << "# " << res.dir.filename().string() << "\n\n";
  md << "Medians over seeds of the best checkpoint per seed. sr: success rate; "
        "rew: episode reward; peak F_z: largest normalized vertical force.\n\n";
  md << "| model | safety |";
  for (double c : clearances) md << " sr " << fmt(c) << " mm | rew " << fmt(c) << " mm | peak F_z " << fmt(c) << " mm |";
  md << "\n|---|---|";
  for (std::size_t i = 0; i < clearances.size(); ++i) md << "---|---|---|";
  md << "\n";
  for (const auto& [model, safety] : rows) {
    md << "| " << model << " | " << safety << " |";
    for (double cl : clearances) {
      const auto it = std::find_if(res.cells.begin(), res.cells.end(), [&](const CellResult& c) {
        return c.cell.model == model && c.cell.safety == safety && c.cell.clearance == cl;
      });
      if (it == res.cells.end()) {
        md << " | | |";
      } else if (!it->ok) {
        md << " failed | | |";
      } else {
        md << " " << pct(it->median_success) << " | " << num(it->median_reward, "%.2f") << " | "
           << num(it->peak_fz, "%.3f") << " |";
      }
    }
    md << "\n";
  }
  if (!res.generalization.empty()) {
    md << "\n## Shape generalization\n\n| shape | gap proportion | sr (median) | seeds |\n"
          "|---|---|---|---|\n";
    std::vector<std::pair<std::string, double>> targets;
    for (const GeneralizationRow& g : res.generalization) {
      const auto key = std::make_pair(g.shape, g.gap_proportion);
      if (std::find(targets.begin(), targets.end(), key) == targets.end()) targets.push_back(key);
    }
    for (const auto& [shape, gp] : targets) {
      std::vector<double> sr;
      for (const GeneralizationRow& g : res.generalization) {
        if (g.ok && g.shape == shape && g.gap_proportion == gp) sr.push_back(g.report.success_mean);
      }
      md << "| " << shape << " | " << num(gp) << " | " << (sr.empty() ? "failed" : pct(median(sr)))
         << " | " << sr.size() << " |\n";
    }
  }
}

}  // namespace

std::string MatrixCell::id() const { return model + "-" + safety + "-" + fmt(clearance) + "mm"; }

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

bool AblationResult::all_ok() const {
  for (const CellResult& c : cells) {
    if (!c.ok) return false;
  }
  for (const GeneralizationRow& g : generalization) {
    if (!g.ok) return false;
  }
  return true;
}

ExperimentSpec AblationMatrix::cell_spec(const MatrixCell& cell) const {
  KeyValueConfig cfg = base;
  cfg.set("experiment.name", name + "/" + cell.id());
  cfg.set("experiment.model", cell.model);
  cfg.set("experiment.safety", cell.safety);
  cfg.erase("experiment.gap_proportion");
  cfg.set("experiment.clearance", fmt(cell.clearance));
  if (cell.model == "VM" && cell.safety == "DSL") cfg.set("dsl.beta2", "0, 0, 0");
  return spec_from_config(cfg, base_dir);
}

AblationMatrix matrix_from_config(const KeyValueConfig& cfg, const fs::path& base_dir) {
  AblationMatrix m;
  m.base_dir = base_dir;
  const KeyValueConfig sec = cfg.section("matrix");
  m.name = sec.get_string("name", m.name);
  if (sec.has("cells")) {
    if (sec.has("models") || sec.has("safety") || sec.has("clearance")) {
      throw InvalidConfig("matrix: give either cells or models/safety/clearance");
    }
    for (const std::string& item : sec.get_list("cells")) {
      const auto parts = split(item, '/');
      if (parts.size() != 3) throw InvalidConfig("matrix cell '" + item + "' is not model/safety/mm");
      m.cells.push_back(make_cell(parts[0], parts[1], parse_number(parts[2], "clearance")));
    }
  } else {
    const auto models = sec.has("models") ? sec.get_list("models") : std::vector<std::string>{"VFTM"};
    const auto safeties = sec.has("safety") ? sec.get_list("safety") : std::vector<std::string>{"DSL"};
    const std::vector<double> clearances = sec.get_doubles("clearance", {4.0});
    for (const std::string& mo : models) {
      for (const std::string& sa : safeties) {
        for (double cl : clearances) m.cells.push_back(make_cell(mo, sa, cl));
      }
    }
  }
  if (m.cells.empty()) throw InvalidConfig("matrix has no cells");
  if (sec.has("generalize")) {
    for (const std::string& item : sec.get_list("generalize")) {
      const auto parts = split(item, '@');
      if (parts.size() != 2) throw InvalidConfig("generalize entry '" + item + "' is not shape@proportion");
      m.generalize.push_back({parts[0], parse_number(parts[1], "gap proportion")});
    }
  }
  if (sec.has("generalize_from")) {
    const auto parts = split(sec.get_string("generalize_from"), '/');
    if (parts.size() != 3) throw InvalidConfig("generalize_from is not model/safety/mm");
    const MatrixCell from = make_cell(parts[0], parts[1], parse_number(parts[2], "clearance"));
    const auto it = std::find_if(m.cells.begin(), m.cells.end(),
                                 [&](const MatrixCell& c) { return c.id() == from.id(); });
    if (it == m.cells.end()) throw InvalidConfig("generalize_from names no cell of the matrix");
    m.generalize_from = static_cast<int>(it - m.cells.begin());
  }
  const auto unused = sec.unused_keys();
  if (!unused.empty()) throw InvalidConfig("unknown matrix key '" + unused.front() + "'");
  for (const auto& [k, v] : cfg.entries()) {
    if (k.rfind("matrix.", 0) != 0) m.base.set(k, v);
  }
  // Catch typos in the shared keys before any training starts.
  for (const MatrixCell& c : m.cells) {
    try {
      m.cell_spec(c);
    } catch (const InvalidConfig&) {
      // Combination-specific rejections are reported per cell at run time;
      // only key errors are fatal here.
      KeyValueConfig probe = m.base;
      probe.set("experiment.clearance", fmt(c.clearance));
      probe.erase("experiment.gap_proportion");
      spec_from_config(probe, base_dir);
    }
  }
  return m;
}

AblationMatrix load_matrix(const fs::path& path) {
  return matrix_from_config(KeyValueConfig::load(path), path.parent_path());
}

AblationResult run_ablation(const AblationMatrix& matrix) {
  AblationResult res;
  ExperimentSpec probe = spec_from_config(
      [&] {
        KeyValueConfig c = matrix.base;
        c.erase("experiment.gap_proportion");
        c.set("experiment.clearance", "1");
        return c;
      }(),
      matrix.base_dir);
  res.dir = run_root(probe) / matrix.name;

  for (const MatrixCell& cell : matrix.cells) {
    CellResult cr;
    cr.cell = cell;
    try {
      const ExperimentSpec spec = matrix.cell_spec(cell);
      cr.spec_hash = spec.hash();
      const std::vector<TrainResult> runs = train(spec);
      std::vector<double> sr, rw;
      for (const TrainResult& t : runs) {
        EvalReport rep = evaluate(t.best_checkpoint, spec);
        write_eval_outputs(rep, t.run_dir / "eval");
        sr.push_back(rep.success_mean);
        rw.push_back(rep.reward_mean);
        cr.peak_fz = std::max(cr.peak_fz, rep.peak_fz);
        cr.seeds.push_back(t.seed);
        cr.reports.push_back(std::move(rep));
      }
      cr.median_success = median(sr);
      cr.median_reward = median(rw);
      cr.ok = true;
    } catch (const std::exception& e) {
      cr.ok = false;
      cr.error = e.what();
    }
    res.cells.push_back(std::move(cr));
    write_outputs(res);
  }

  if (!matrix.generalize.empty()) {
    const CellResult& src = res.cells[static_cast<std::size_t>(matrix.generalize_from)];
    for (const GeneralizationTarget& target : matrix.generalize) {
      if (!src.ok) {
        GeneralizationRow g;
        g.source = src.cell.id();
        g.shape = target.shape;
        g.gap_proportion = target.gap_proportion;
        g.error = "source cell failed";
        res.generalization.push_back(g);
        continue;
      }
      for (std::size_t i = 0; i < src.seeds.size(); ++i) {
        GeneralizationRow g;
        g.source = src.cell.id();
        g.seed = src.seeds[i];
        g.shape = target.shape;
        g.gap_proportion = target.gap_proportion;
        try {
          const ExperimentSpec base_spec = matrix.cell_spec(src.cell);
          KeyValueConfig cfg = base_spec.resolved();
          cfg.set("experiment.shape", target.shape);
          cfg.erase("experiment.clearance");
          cfg.set("experiment.gap_proportion", fmt(target.gap_proportion));
          const ExperimentSpec spec = spec_from_config(cfg, matrix.base_dir);
          const fs::path run_dir = seed_run_dir(base_spec, src.seeds[i]);
          g.report = evaluate(run_dir / "best.ckpt", spec);
          write_eval_outputs(g.report, run_dir / "generalize" /
                                           (target.shape + "@" + fmt(target.gap_proportion)));
          g.ok = true;
        } catch (const std::exception& e) {
          g.error = e.what();
        }
        res.generalization.push_back(std::move(g));
      }
    }
    write_outputs(res);
  }
  return res;
}

}  // namespace pegsafe::harness
