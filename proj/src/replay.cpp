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

#include "pegsafe/replay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pegsafe/errors.hpp"

namespace pegsafe::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-12;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool same(double a, double b) {
  if (a == b) return true;  // covers equal infinities
  return std::abs(a - b) <= kTol;
}

void check(int step, const std::string& column, double logged, double recomputed) {
  if (!same(logged, recomputed)) {
    std::ostringstream s;
    s.precision(17);
    s << column << " logged " << logged << ", recomputed " << recomputed;
    throw ReplayDivergence(step, s.str());
  }
}

void check_text(int step, const std::string& column, const std::string& logged,
                const std::string& recomputed) {
  if (logged != recomputed) {
    throw ReplayDivergence(step, column + " logged '" + logged + "', recomputed '" +
                                     recomputed + "'");
  }
}

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys, double x0,
                     double y0, double w, double h, double xmax, double ylo, double yhi) {
  std::ostringstream s;
  s.precision(6);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = x0 + w * xs[i] / std::max(xmax, 1.0);
    const double py = y0 + h * (1.0 - (ys[i] - ylo) / std::max(yhi - ylo, 1e-9));
    s << (i ? " " : "") << px << "," << py;
  }
  return s.str();
}

std::string render_svg(const std::vector<double>& steps, const std::vector<double>& depth,
                       const std::vector<double>& fz, double surface) {
  const double w = 560, h = 180, left = 60, top1 = 30, top2 = 260;
  const double xmax = steps.empty() ? 1.0 : steps.back();
  double zlo = *std::min_element(depth.begin(), depth.end());
  double zhi = *std::max_element(depth.begin(), depth.end());
  zlo = std::min(zlo, surface) - 1.0;
  zhi = std::max(zhi, surface) + 1.0;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  for (double top : {top1, top2}) {
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  }
  s << "<text x=\"" << left << "\" y=\"" << top1 - 8 << "\">peg bottom z (mm) vs step</text>\n";
  s << "<text x=\"" << left << "\" y=\"" << top2 - 8
    << "\">normalized F_z vs step</text>\n";
  const double sy = top1 + h * (1.0 - (surface - zlo) / (zhi - zlo));
  s << "<line x1=\"" << left << "\" y1=\"" << sy << "\" x2=\"" << left + w << "\" y2=\"" << sy
    << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\""
    << polyline(steps, depth, left, top1, w, h, xmax, zlo, zhi) << "\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\""
    << polyline(steps, fz, left, top2, w, h, xmax, -1.0, 1.0) << "\"/>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top1 + 12 << "\" text-anchor=\"end\">"
    << std::lround(zhi) << "</text>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top1 + h << "\" text-anchor=\"end\">"
    << std::lround(zlo) << "</text>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top2 + 12 << "\" text-anchor=\"end\">1</text>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top2 + h << "\" text-anchor=\"end\">-1</text>\n";
  s << "<text x=\"" << left + w << "\" y=\"" << top2 + h + 16 << "\" text-anchor=\"end\">step "
    << static_cast<long>(xmax) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace

TrajectoryTable TrajectoryTable::parse(const std::string& text) {
  TrajectoryTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch("empty trajectory file");
  const auto header = split_csv_line(line);
  const auto expected = trajectory_columns();
  if (header != expected) {
    throw SchemaMismatch("trajectory header does not match the " +
                         std::to_string(expected.size()) + "-column schema");
  }
  for (std::size_t i = 0; i < header.size(); ++i) t.index_[header[i]] = static_cast<int>(i);
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw SchemaMismatch("row " + std::to_string(row) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(header.size()));
    }
    t.cells_.push_back(std::move(cells));
    ++row;
  }
  if (t.cells_.empty()) throw SchemaMismatch("trajectory has no rows");
  return t;
}

TrajectoryTable TrajectoryTable::read(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaMismatch("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const std::string& TrajectoryTable::text(int row, const std::string& column) const {
  const auto it = index_.find(column);
  if (it == index_.end()) throw SchemaMismatch("no column '" + column + "'");
  return cells_.at(static_cast<std::size_t>(row)).at(static_cast<std::size_t>(it->second));
}

double TrajectoryTable::number(int row, const std::string& column) const {
  const std::string& s = text(row, column);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw SchemaMismatch("row " + std::to_string(row) + " column " + column +
                         ": not a number '" + s + "'");
  }
  return v;
}

fs::path find_run_config(const fs::path& csv) {
  const fs::path dir = csv.has_parent_path() ? csv.parent_path() : fs::path(".");
  for (const fs::path& p : {dir / "config.resolved", dir.parent_path() / "config.resolved"}) {
    if (!p.empty() && fs::exists(p)) return p;
  }
  throw InvalidConfig("no config.resolved next to " + csv.string() + "; pass --config");
}

ReplaySummary replay(const TrajectoryTable& t, const ExperimentSpec& spec) {
  const safety::SafetyVariant variant = spec.effective_safety();
  auto vec3 = [&](int row, const std::string& prefix) {
    return env::Vec3(t.number(row, prefix + "_x"), t.number(row, prefix + "_y"),
                     t.number(row, prefix + "_z"));
  };
  const char* wrench_names[6] = {"fx", "fy", "fz", "tx", "ty", "tz"};
  auto observation = [&](int row) {
    env::Observation o;
    o.p_ee = vec3(row, "p_ee");
    o.theta_z = t.number(row, "theta_z");
    for (int i = 0; i < 6; ++i) {
      o.wrench_normalized(i) = t.number(row, std::string("wrench_norm_") + wrench_names[i]);
    }
    o.p_h_observed = vec3(row, "p_h_obs");
    return env::apply_mask(o, spec.model);
  };
  auto action = [&](int row, const std::string& prefix) {
    env::Action a;
    a.delta = env::Vec3(t.number(row, prefix + "_dx"), t.number(row, prefix + "_dy"),
                        t.number(row, prefix + "_dz"));
    a.delta_theta_z = t.number(row, prefix + "_dtheta");
    return a;
  };

  ReplaySummary sum;
  std::vector<double> steps, depth, fz;
  safety::DslState lock;
  for (int row = 0; row < t.rows(); ++row) {
    const int step = static_cast<int>(t.number(row, "step"));
    if (step != row) throw SchemaMismatch("row " + std::to_string(row) + " has step " +
                                          std::to_string(step));
    const env::Vec3 p_ee = vec3(row, "p_ee");
    steps.push_back(step);
    depth.push_back(p_ee.z());
    fz.push_back(t.number(row, "wrench_norm_fz"));
    sum.deepest_z = row == 0 ? p_ee.z() : std::min(sum.deepest_z, p_ee.z());
    sum.peak_fz = row == 0 ? fz.back() : std::max(sum.peak_fz, fz.back());
    if (row == 0) continue;

    const safety::FilterOutput f =
        safety::apply_filter(variant, lock, spec.dsl, action(row, "policy"), observation(row - 1));
    lock = f.state;
    const Eigen::Vector4d logged_cmd = action(row, "action").vector();
    const char* cmd_names[4] = {"action_dx", "action_dy", "action_dz", "action_dtheta"};
    for (int i = 0; i < 4; ++i) check(step, cmd_names[i], logged_cmd(i), f.action.vector()(i));
    check_text(step, "phase", t.text(row, "phase"), safety::to_string(lock.phase));
    check_text(step, "branch", t.text(row, "branch"), safety::to_string(lock.branch));
    check(step, "z_c", t.number(row, "z_c"), lock.z_c);
    check(step, "inc_x", t.number(row, "inc_x"), lock.increments.x());
    check(step, "inc_y", t.number(row, "inc_y"), lock.increments.y());
    check(step, "inc_z", t.number(row, "inc_z"), lock.increments.z());

    env::HoleTarget hole;
    hole.p_h = vec3(row, "p_h_true");
    hole.yaw = t.number(row, "hole_yaw");
    hole.shape = spec.env.hole;
    hole.depth = spec.env.hole_depth;
    env::EefState eef;
    eef.p_ee = p_ee;
    eef.theta_z = t.number(row, "theta_z");
    const double r = reward::reward(p_ee / 1000.0, reward_target(hole, spec.reward_reference),
                                    spec.reward);
    check(step, "reward", t.number(row, "reward"), r);
    const bool ok = env::success(spec.env.peg, eef, hole, spec.env.success_depth);
    check(step, "success", t.number(row, "success"), ok ? 1.0 : 0.0);
    const bool done = ok || step >= spec.env.horizon;
    check(step, "done", t.number(row, "done"), done ? 1.0 : 0.0);
    if (done && row + 1 != t.rows()) {
      throw ReplayDivergence(step, "rows continue after the episode ended");
    }
    sum.total_reward += r;
    sum.success = ok;
    sum.estop = t.number(row, "estop") != 0.0;
    sum.limited_steps += lock.phase == safety::Phase::kLimited ? 1 : 0;
    sum.steps = step;
  }

  std::ostringstream s;
  s << "steps: " << sum.steps << "\n"
    << "total reward: " << fmt(sum.total_reward) << "\n"
    << "success: " << (sum.success ? "yes" : "no") << "\n"
    << "e-stop: " << (sum.estop ? "yes" : "no") << "\n"
    << "deepest z (mm): " << fmt(sum.deepest_z) << "\n"
    << "peak normalized F_z: " << fmt(sum.peak_fz) << "\n"
    << "steps with the lock engaged: " << sum.limited_steps << "\n"
    << "recomputed commands, lock states, rewards and success: all match\n";
  sum.text = s.str();
  sum.svg = render_svg(steps, depth, fz, spec.env.contact.surface_z);
  return sum;
}

}  // namespace pegsafe::harness
