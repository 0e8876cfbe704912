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

#ifndef PEGSAFE_GEOMETRY_HPP_
#define PEGSAFE_GEOMETRY_HPP_

#include <Eigen/Core>

#include <vector>

namespace pegsafe::geometry {

using Vec2 = Eigen::Vector2d;

// Wraps an angle to (-pi, pi].
double normalize_angle(double angle);

// Rigid placement of a cross-section in the plate plane. Millimetres and
// radians; yaw is kept normalized.
class PlanarPose {
 public:
  PlanarPose() = default;
  PlanarPose(double x, double y, double yaw);

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }

  Vec2 apply(const Vec2& local) const;
  Vec2 inverse_apply(const Vec2& world) const;
  // Pose of `other` expressed in this pose's frame.
  PlanarPose relative(const PlanarPose& other) const;
  // This pose followed by `local` expressed in this frame.
  PlanarPose compose(const PlanarPose& local) const;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double yaw_ = 0.0;
};

// Convex planar shape centred on its area centroid. Polygons are stored
// counter-clockwise together with their outward edge normals.
class CrossSection {
 public:
  enum class Kind { kConvexPolygon, kCircle };

  // Throws InvalidShape for fewer than three distinct vertices, zero area
  // or a concave outline. Clockwise input is reversed.
  static CrossSection polygon(std::vector<Vec2> vertices);
  static CrossSection circle(double radius);

  Kind kind() const { return kind_; }
  bool is_circle() const { return kind_ == Kind::kCircle; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Vec2>& normals() const { return normals_; }
  double radius() const { return radius_; }

  double area() const;
  double perimeter() const;
  // Largest distance from the centroid to the boundary.
  double circumradius() const;

  CrossSection scaled(double factor) const;
  // Minkowski sum with a disc of radius `clearance`. Polygon corners become
  // arcs; a corner with the exterior angle of an equilateral triangle gets
  // `segments_per_corner` chords, others proportionally fewer.
  CrossSection dilated(double clearance, int segments_per_corner = 64) const;

  // Signed distance of a local-frame point to the boundary, negative inside.
  double signed_distance(const Vec2& local) const;
  // Closest boundary point to a local-frame point.
  Vec2 closest_boundary_point(const Vec2& local) const;
  // Closed point membership with tolerance `tol` (mm).
  bool contains_point(const Vec2& local, double tol = 1e-9) const;

 private:
  CrossSection() = default;

  Kind kind_ = Kind::kCircle;
  std::vector<Vec2> vertices_;
  std::vector<Vec2> normals_;
  double radius_ = 0.0;
};

// True iff the whole peg section lies inside the hole section (closed set).
bool contains(const CrossSection& hole, const PlanarPose& hole_pose,
              const CrossSection& peg, const PlanarPose& peg_pose);

// Largest distance by which any peg point leaves the hole; 0 when contained.
double overlap_depth(const CrossSection& hole, const PlanarPose& hole_pose,
                     const CrossSection& peg, const PlanarPose& peg_pose);

// A peg boundary point outside the hole, in world coordinates. `normal`
// points back into the hole (the minimal-translation direction for that
// point) and `depth` is its distance to the hole.
struct WallExit {
  Vec2 point;
  Vec2 normal;
  double depth = 0.0;
};

// Peg boundary points that leave the hole: every exiting vertex of a polygon
// peg, or the single deepest point of a circular peg.
std::vector<WallExit> wall_exits(const CrossSection& hole,
                                 const PlanarPose& hole_pose,
                                 const CrossSection& peg,
                                 const PlanarPose& peg_pose);

double area(const CrossSection& shape);

// (area(hole) - area(peg)) / area(hole). Throws NonPositiveClearance when the
// peg is not strictly smaller than the hole.
double gap_proportion(const CrossSection& peg, const CrossSection& hole);

// Uniform clearance whose dilated hole reaches `proportion`.
double clearance_for_gap_proportion(const CrossSection& peg,
                                    double proportion);

// Deterministic spread of `n` points over the peg bottom face in world
// coordinates: polygon vertices first, then boundary points, then an
// interior grid. The point mean coincides with the peg centroid.
std::vector<Vec2> bottom_face_contact_samples(const CrossSection& peg,
                                              const PlanarPose& peg_pose,
                                              int n);

// Shape builders used by the catalogue.
CrossSection equilateral_triangle(double side);
CrossSection reuleaux_triangle(double width, int vertices = 96);
// Equilateral triangle with one corner cut `cut` mm along both edges.
CrossSection truncated_triangle(double side, double cut);

}  // namespace pegsafe::geometry

#endif  // PEGSAFE_GEOMETRY_HPP_
