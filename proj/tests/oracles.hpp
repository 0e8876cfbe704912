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

// Independent reference implementations used by the tests. Nothing here
// calls into the library's geometry, reward, lock or GAE code.

#ifndef PEGSAFE_TESTS_ORACLES_HPP_
#define PEGSAFE_TESTS_ORACLES_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using P2 = Eigen::Vector2d;
using Poly = std::vector<P2>;

inline P2 rigid(const P2& p, double x, double y, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * p.x() - s * p.y() + x, s * p.x() + c * p.y() + y};
}

inline Poly place(const Poly& local, double x, double y, double yaw) {
  Poly out;
  for (const P2& p : local) out.push_back(rigid(p, x, y, yaw));
  return out;
}

// Even-odd ray casting.
inline bool inside(const Poly& poly, const P2& q) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const P2& a = poly[i];
    const P2& b = poly[j];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (q.x() < x) in = !in;
    }
  }
  return in;
}

inline double segment_distance(const P2& q, const P2& a, const P2& b) {
  const P2 ab = b - a;
  const double t = std::clamp((q - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (q - (a + t * ab)).norm();
}

inline double boundary_distance(const Poly& poly, const P2& q) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    d = std::min(d, segment_distance(q, poly[i], poly[(i + 1) % poly.size()]));
  }
  return d;
}

// Distance from q to the polygon region (0 inside).
inline double outside_distance(const Poly& poly, const P2& q) {
  return inside(poly, q) ? 0.0 : boundary_distance(poly, q);
}

inline double shoelace_area(const Poly& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P2& p = poly[i];
    const P2& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(a);
}

// Points of the peg region: `boundary` spread by arclength along the outline
// plus `interior` uniform points from rejection sampling.
inline std::vector<P2> sample_region(const Poly& poly, int boundary, int interior,
                                     std::mt19937_64& rng) {
  std::vector<P2> pts;
  double perim = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) perim += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < boundary; ++k) {
    double s = perim * u(rng);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const P2 a = poly[i], b = poly[(i + 1) % poly.size()];
      const double len = (b - a).norm();
      if (s <= len || i + 1 == poly.size()) {
        pts.push_back(a + (b - a) * std::min(1.0, s / len));
        break;
      }
      s -= len;
    }
  }
  P2 lo = poly[0], hi = poly[0];
  for (const P2& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  while (static_cast<int>(pts.size()) < boundary + interior) {
    const P2 q(lo.x() + (hi.x() - lo.x()) * u(rng), lo.y() + (hi.y() - lo.y()) * u(rng));
    if (inside(poly, q)) pts.push_back(q);
  }
  return pts;
}

struct SampledOverlap {
  double depth = 0.0;   // largest sampled distance outside the hole
  bool contained = true;
};

inline SampledOverlap sampled_overlap(const Poly& hole, const std::vector<P2>& peg_points) {
  SampledOverlap out;
  for (const P2& q : peg_points) {
    const double d = outside_distance(hole, q);
    out.depth = std::max(out.depth, d);
  }
  out.contained = out.depth == 0.0;
  return out;
}

// Outline builders written out directly.
inline Poly triangle(double side) {
  const double r = side / std::sqrt(3.0);
  Poly p;
  for (int k = 0; k < 3; ++k) {
    const double a = M_PI / 2 + 2 * M_PI * k / 3;
    p.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return p;
}

inline Poly regular(int n, double r, double phase = 0.0) {
  Poly p;
  for (int k = 0; k < n; ++k) {
    const double a = phase + 2 * M_PI * k / n;
    p.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return p;
}

// Reward written straight from the formula, positions in metres.
inline double reward(const Eigen::Vector3d& pe, const Eigen::Vector3d& ph,
                     const double alpha[5], double d1, double d2, double sign = -1.0) {
  const double dx = pe.x() - ph.x(), dy = pe.y() - ph.y(), dz = pe.z() - ph.z();
  const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
  const double weighted = std::sqrt(alpha[0] * dx * dx + alpha[1] * dy * dy + alpha[2] * dz * dz);
  const double arrive = d < d1 ? 1.0 : 0.0;
  const double zdist = d < d2 ? ph.z() - pe.z() : 0.0;
  return sign * weighted + alpha[3] * arrive + alpha[4] * zdist;
}

// Advantages by the nested sum over future TD errors, episode-aware.
inline void brute_gae(const std::vector<double>& r, const std::vector<double>& v,
                      const std::vector<double>& done, double bootstrap, double gamma,
                      double lambda, std::vector<double>& adv, std::vector<double>& ret) {
  const std::size_t n = r.size();
  std::vector<double> delta(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double next = t + 1 < n ? v[t + 1] : bootstrap;
    delta[t] = r[t] + gamma * next * (1.0 - done[t]) - v[t];
  }
  adv.assign(n, 0.0);
  ret.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double coef = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      adv[t] += coef * delta[k];
      if (done[k] != 0.0) break;
      coef *= gamma * lambda;
    }
    ret[t] = adv[t] + v[t];
  }
}

// Central differences of f at x, step h.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        Eigen::VectorXd x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    x(i) = xi + h;
    const double fp = f(x);
    x(i) = xi - h;
    const double fm = f(x);
    x(i) = xi;
    g(i) = (fp - fm) / (2 * h);
  }
  return g;
}

// Hand transcript of the lock's state machine: one call per control step.
// Positions in metres, wrench normalized; returns the commanded dz in mm.
struct LockTranscript {
  Eigen::Vector3d beta1{1e-3, 1e-3, 5e-4};
  Eigen::Vector3d beta2{1e-7, 1e-7, 1e-3};
  double df[6] = {0.15, 0.15, 0.45, 0.1, 0.1, 0.2};
  double probe = 5e-4;
  bool limited = false;
  double z_c = 0.0;
  std::string branch = "none";
  std::vector<std::array<double, 6>> forces;
  std::vector<Eigen::Vector3d> positions;

  double step(const std::array<double, 6>& f, const Eigen::Vector3d& p, double proposed_dz_mm) {
    if (limited) {
      if (f[2] < 0.25 && p.z() >= z_c - 1e-9) {
        limited = false;
      } else {
        return std::max(proposed_dz_mm, (z_c - p.z()) * 1000.0);
      }
    }
    if (f[2] < 0.5) {
      forces.push_back(f);
      positions.push_back(p);
      return proposed_dz_mm - probe * 1000.0;
    }
    const std::size_t n = positions.size();
    if (n >= 2) {
      bool edge = false;
      for (int i = 0; i < 6; ++i) edge |= std::abs(forces[n - 1][i] - forces[n - 2][i]) > df[i];
      double add = 0.0;
      if (edge) {
        for (int i = 0; i < 3; ++i) {
          const double dF = forces[n - 1][i] - forces[n - 2][i];
          const double dT = forces[n - 1][i + 3] - forces[n - 2][i + 3];
          add += beta1(i) * std::abs(dF + dT);
        }
        branch = "edge";
      } else {
        for (int i = 0; i < 3; ++i) add += beta2(i) * std::abs(positions[n - 1](i) - positions[n - 2](i));
        branch = "flat";
      }
      z_c = positions[n - 1].z() + add;
    } else {
      z_c = n == 1 ? positions[0].z() : p.z();
      branch = "short";
    }
    limited = true;
    return std::max(proposed_dz_mm, (z_c - p.z()) * 1000.0);
  }
};

}  // namespace oracle

#endif  // PEGSAFE_TESTS_ORACLES_HPP_
