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

#include "pegsafe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pegsafe/errors.hpp"

namespace pegsafe::geometry {

namespace {

constexpr double kPi = std::numbers::pi;
// Closed-set tolerance for membership and overlap tests (mm).
constexpr double kTol = 1e-9;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Vec2 closest_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace

double normalize_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

PlanarPose::PlanarPose(double x, double y, double yaw)
    : x_(x), y_(y), yaw_(normalize_angle(yaw)) {}

Vec2 PlanarPose::apply(const Vec2& local) const {
  return rotate(local, yaw_) + Vec2(x_, y_);
}

Vec2 PlanarPose::inverse_apply(const Vec2& world) const {
  return rotate(world - Vec2(x_, y_), -yaw_);
}

PlanarPose PlanarPose::relative(const PlanarPose& other) const {
  const Vec2 p = inverse_apply(Vec2(other.x_, other.y_));
  return {p.x(), p.y(), other.yaw_ - yaw_};
}

PlanarPose PlanarPose::compose(const PlanarPose& local) const {
  const Vec2 p = apply(Vec2(local.x_, local.y_));
  return {p.x(), p.y(), yaw_ + local.yaw_};
}

CrossSection CrossSection::polygon(std::vector<Vec2> vertices) {
  // Drop repeated points, including the wrap-around pair.
  std::vector<Vec2> pts;
  pts.reserve(vertices.size());
  for (const Vec2& v : vertices) {
    if (!v.allFinite()) throw InvalidShape("non-finite vertex");
    if (pts.empty() || (v - pts.back()).norm() > kTol) pts.push_back(v);
  }
  while (pts.size() > 1 && (pts.front() - pts.back()).norm() <= kTol) {
    pts.pop_back();
  }
  if (pts.size() < 3) throw InvalidShape("polygon needs at least 3 vertices");

  const std::size_t n = pts.size();
  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice_area += cross(pts[i], pts[(i + 1) % n]);
  if (std::abs(twice_area) < 1e-12) throw InvalidShape("zero-area polygon");
  if (twice_area < 0.0) {
    std::reverse(pts.begin(), pts.end());
    twice_area = -twice_area;
  }

  // Convex and simple: every turn is to the left and the turns sum to 2 pi.
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = pts[(i + 1) % n] - pts[i];
    const Vec2 e1 = pts[(i + 2) % n] - pts[(i + 1) % n];
    const double c = cross(e0, e1);
    if (c < -1e-9 * e0.norm() * e1.norm()) {
      throw InvalidShape("polygon is not convex");
    }
    turning += std::atan2(c, e0.dot(e1));
  }
  if (std::abs(turning - 2.0 * kPi) > 1e-6) {
    throw InvalidShape("polygon is self-intersecting");
  }

  Vec2 centroid = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    centroid += (a + b) * cross(a, b);
  }
  centroid /= 3.0 * twice_area;

  CrossSection shape;
  shape.kind_ = Kind::kConvexPolygon;
  shape.vertices_.reserve(n);
  for (const Vec2& v : pts) shape.vertices_.push_back(v - centroid);
  shape.normals_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = shape.vertices_[(i + 1) % n] - shape.vertices_[i];
    shape.normals_.push_back(Vec2(e.y(), -e.x()).normalized());
  }
  return shape;
}

CrossSection CrossSection::circle(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidShape("circle radius must be positive");
  }
  CrossSection shape;
  shape.kind_ = Kind::kCircle;
  shape.radius_ = radius;
  return shape;
}

double CrossSection::area() const {
  if (is_circle()) return kPi * radius_ * radius_;
  double twice_area = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    twice_area += cross(vertices_[i], vertices_[(i + 1) % n]);
  }
  return 0.5 * twice_area;
}

double CrossSection::perimeter() const {
  if (is_circle()) return 2.0 * kPi * radius_;
  double p = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) p += (vertices_[(i + 1) % n] - vertices_[i]).norm();
  return p;
}

double CrossSection::circumradius() const {
  if (is_circle()) return radius_;
  double r = 0.0;
  for (const Vec2& v : vertices_) r = std::max(r, v.norm());
  return r;
}

CrossSection CrossSection::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidShape("scale factor must be positive");
  if (is_circle()) return circle(radius_ * factor);
  std::vector<Vec2> pts;
  pts.reserve(vertices_.size());
  for (const Vec2& v : vertices_) pts.push_back(v * factor);
  return polygon(std::move(pts));
}

CrossSection CrossSection::dilated(double clearance, int segments_per_corner) const {
  if (clearance < 0.0) throw InvalidShape("negative clearance");
  if (clearance == 0.0) return *this;
  if (is_circle()) return circle(radius_ + clearance);

  const std::size_t n = vertices_.size();
  std::vector<Vec2> pts;
  pts.reserve(n * static_cast<std::size_t>(segments_per_corner + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& n_prev = normals_[(i + n - 1) % n];
    const Vec2& n_cur = normals_[i];
    const double a0 = std::atan2(n_prev.y(), n_prev.x());
    double sweep = std::atan2(n_cur.y(), n_cur.x()) - a0;
    while (sweep < 0.0) sweep += 2.0 * kPi;
    if (sweep >= 2.0 * kPi) sweep -= 2.0 * kPi;
    if (sweep < 1e-12) {
      pts.push_back(vertices_[i] + clearance * n_cur);
      continue;
    }
    const int segs = std::max(
        1, static_cast<int>(std::ceil(segments_per_corner * sweep / (2.0 * kPi / 3.0) - 1e-9)));
    for (int k = 0; k <= segs; ++k) {
      const double a = a0 + sweep * k / segs;
      pts.push_back(vertices_[i] + clearance * Vec2(std::cos(a), std::sin(a)));
    }
  }
  return polygon(std::move(pts));
}

double CrossSection::signed_distance(const Vec2& local) const {
  if (is_circle()) return local.norm() - radius_;
  const std::size_t n = vertices_.size();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, normals_[i].dot(local - vertices_[i]));
  }
  if (worst <= 0.0) return worst;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = closest_on_segment(local, vertices_[i], vertices_[(i + 1) % n]);
    best = std::min(best, (local - c).squaredNorm());
  }
  return std::sqrt(best);
}

Vec2 CrossSection::closest_boundary_point(const Vec2& local) const {
  if (is_circle()) {
    const double r = local.norm();
    if (r == 0.0) return {radius_, 0.0};
    return local * (radius_ / r);
  }
  const std::size_t n = vertices_.size();
  Vec2 best_point = vertices_[0];
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = closest_on_segment(local, vertices_[i], vertices_[(i + 1) % n]);
    const double d = (local - c).squaredNorm();
    if (d < best) {
      best = d;
      best_point = c;
    }
  }
  return best_point;
}

bool CrossSection::contains_point(const Vec2& local, double tol) const {
  if (is_circle()) return local.norm() <= radius_ + tol;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (normals_[i].dot(local - vertices_[i]) > tol) return false;
  }
  return true;
}

double overlap_depth(const CrossSection& hole, const PlanarPose& hole_pose,
                     const CrossSection& peg, const PlanarPose& peg_pose) {
  const PlanarPose rel = hole_pose.relative(peg_pose);
  double depth = 0.0;
  if (peg.is_circle()) {
    // The farthest point of a disc from a convex set sits at radius + signed
    // distance of the centre, for points inside as well as outside.
    depth = peg.radius() + hole.signed_distance(Vec2(rel.x(), rel.y()));
  } else {
    for (const Vec2& v : peg.vertices()) {
      depth = std::max(depth, hole.signed_distance(rel.apply(v)));
    }
  }
  return depth <= kTol ? 0.0 : depth;
}

bool contains(const CrossSection& hole, const PlanarPose& hole_pose,
              const CrossSection& peg, const PlanarPose& peg_pose) {
  return overlap_depth(hole, hole_pose, peg, peg_pose) == 0.0;
}

std::vector<WallExit> wall_exits(const CrossSection& hole,
                                 const PlanarPose& hole_pose,
                                 const CrossSection& peg,
                                 const PlanarPose& peg_pose) {
  std::vector<WallExit> exits;
  const PlanarPose rel = hole_pose.relative(peg_pose);
  auto to_world = [&](const Vec2& point, const Vec2& normal, double depth) {
    exits.push_back({hole_pose.apply(point), rotate(normal, hole_pose.yaw()), depth});
  };

  if (peg.is_circle()) {
    const Vec2 c(rel.x(), rel.y());
    const double sd = hole.signed_distance(c);
    const double depth = peg.radius() + sd;
    if (depth <= kTol) return exits;
    Vec2 outward;
    if (hole.is_circle()) {
      outward = c.norm() > 0.0 ? Vec2(c.normalized()) : Vec2(1.0, 0.0);
    } else if (sd > 0.0) {
      outward = (c - hole.closest_boundary_point(c)).normalized();
    } else {
      std::size_t best = 0;
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < hole.vertices().size(); ++i) {
        const double d = hole.normals()[i].dot(c - hole.vertices()[i]);
        if (d > worst) {
          worst = d;
          best = i;
        }
      }
      outward = hole.normals()[best];
    }
    to_world(c + peg.radius() * outward, -outward, depth);
    return exits;
  }

  for (const Vec2& v : peg.vertices()) {
    const Vec2 q = rel.apply(v);
    const double sd = hole.signed_distance(q);
    if (sd <= kTol) continue;
    const Vec2 inward = (hole.closest_boundary_point(q) - q).normalized();
    to_world(q, inward, sd);
  }
  return exits;
}

double area(const CrossSection& shape) { return shape.area(); }

double gap_proportion(const CrossSection& peg, const CrossSection& hole) {
  const double a_peg = peg.area();
  const double a_hole = hole.area();
  if (!(a_peg > 0.0) || !(a_hole > a_peg)) {
    throw NonPositiveClearance("hole area must exceed peg area");
  }
  return (a_hole - a_peg) / a_hole;
}

double clearance_for_gap_proportion(const CrossSection& peg, double proportion) {
  if (!(proportion > 0.0 && proportion < 1.0)) {
    throw NonPositiveClearance("gap proportion must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (gap_proportion(peg, peg.dilated(hi)) < proportion) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gap_proportion(peg, peg.dilated(mid)) < proportion) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

std::vector<Vec2> local_samples(const CrossSection& peg, int n) {
  std::vector<Vec2> boundary;
  if (peg.is_circle()) {
    const int ring = std::max(3, n / 3);
    for (int k = 0; k < ring; ++k) {
      const double a = 2.0 * kPi * k / ring;
      boundary.emplace_back(peg.radius() * std::cos(a), peg.radius() * std::sin(a));
    }
  } else {
    const auto& verts = peg.vertices();
    const int nv = static_cast<int>(verts.size());
    if (n <= nv) {
      for (int k = 0; k < n; ++k) boundary.push_back(verts[static_cast<std::size_t>(k * nv / n)]);
      return boundary;
    }
    boundary = verts;
    const int extra = (n - nv) / 3;
    const double perim = peg.perimeter();
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (int k = 0; k < extra; ++k) {
      const double s = (k + 0.5) * perim / extra;
      Vec2 e = verts[(edge + 1) % verts.size()] - verts[edge];
      while (s > edge_start + e.norm() && edge + 1 < verts.size()) {
        edge_start += e.norm();
        ++edge;
        e = verts[(edge + 1) % verts.size()] - verts[edge];
      }
      boundary.push_back(verts[edge] + e.normalized() * (s - edge_start));
    }
  }
  const int n_boundary = static_cast<int>(boundary.size());
  const int n_interior = n - n_boundary;
  if (n_interior <= 0) {
    boundary.resize(static_cast<std::size_t>(n));
    return boundary;
  }

  // Centred square grid, shrunk until enough points clear the boundary by a
  // quarter spacing.
  const double extent = peg.circumradius();
  double h = std::sqrt(peg.area() / n_interior);
  std::vector<Vec2> grid;
  for (int attempt = 0; attempt < 400; ++attempt) {
    grid.clear();
    const int half = static_cast<int>(std::ceil(extent / h));
    for (int i = -half; i <= half; ++i) {
      for (int j = -half; j <= half; ++j) {
        const Vec2 p(i * h, j * h);
        if (peg.signed_distance(p) <= -0.25 * h) grid.push_back(p);
      }
    }
    if (static_cast<int>(grid.size()) >= n_interior) break;
    h *= 0.97;
  }
  std::vector<Vec2> interior;
  interior.reserve(static_cast<std::size_t>(n_interior));
  const std::size_t g = grid.size();
  for (int k = 0; k < n_interior && g > 0; ++k) {
    interior.push_back(grid[static_cast<std::size_t>(k) * g / static_cast<std::size_t>(n_interior)]);
  }

  // Shift the interior so the whole set is centred on the centroid.
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : boundary) mean += p;
  for (const Vec2& p : interior) mean += p;
  mean /= static_cast<double>(boundary.size() + interior.size());
  if (!interior.empty()) {
    const Vec2 shift = -mean * static_cast<double>(boundary.size() + interior.size()) /
                       static_cast<double>(interior.size());
    bool fits = true;
    for (const Vec2& p : interior) fits = fits && peg.contains_point(p + shift, 0.0);
    if (fits) {
      for (Vec2& p : interior) p += shift;
    }
  }
  boundary.insert(boundary.end(), interior.begin(), interior.end());
  return boundary;
}

}  // namespace

std::vector<Vec2> bottom_face_contact_samples(const CrossSection& peg,
                                              const PlanarPose& peg_pose, int n) {
  if (n < 3) throw InvalidConfig("contact sample count must be at least 3");
  std::vector<Vec2> pts = local_samples(peg, n);
  for (Vec2& p : pts) p = peg_pose.apply(p);
  return pts;
}

CrossSection equilateral_triangle(double side) {
  const double r = side / std::sqrt(3.0);
  std::vector<Vec2> v;
  for (int k = 0; k < 3; ++k) {
    const double a = kPi / 2.0 + 2.0 * kPi * k / 3.0;
    v.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return CrossSection::polygon(std::move(v));
}

CrossSection reuleaux_triangle(double width, int vertices) {
  if (vertices < 3 || vertices % 3 != 0) {
    throw InvalidShape("Reuleaux vertex count must be a positive multiple of 3");
  }
  const double r = width / std::sqrt(3.0);
  Vec2 corner[3];
  for (int k = 0; k < 3; ++k) {
    const double a = kPi / 2.0 + 2.0 * kPi * k / 3.0;
    corner[k] = Vec2(r * std::cos(a), r * std::sin(a));
  }
  // The arc from corner k to corner k+1 is centred on corner k+2.
  const int per_arc = vertices / 3;
  std::vector<Vec2> v;
  for (int k = 0; k < 3; ++k) {
    const Vec2& from = corner[k];
    const Vec2& centre = corner[(k + 2) % 3];
    const double a0 = std::atan2(from.y() - centre.y(), from.x() - centre.x());
    for (int j = 0; j < per_arc; ++j) {
      const double a = a0 + (kPi / 3.0) * j / per_arc;
      v.push_back(centre + width * Vec2(std::cos(a), std::sin(a)));
    }
  }
  return CrossSection::polygon(std::move(v));
}

CrossSection truncated_triangle(double side, double cut) {
  if (!(cut > 0.0 && cut < side)) throw InvalidShape("corner cut must lie in (0, side)");
  const CrossSection tri = equilateral_triangle(side);
  const auto& t = tri.vertices();
  const Vec2 a_to_c = (t[2] - t[0]).normalized();
  const Vec2 a_to_b = (t[1] - t[0]).normalized();
  return CrossSection::polygon({t[0] + cut * a_to_c, t[0] + cut * a_to_b, t[1], t[2]});
}

}  // namespace pegsafe::geometry
