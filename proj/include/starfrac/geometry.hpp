// SPDX-License-Identifier: Apache-2.0
/**
 * Bounded domains and exact ray/visibility queries.
 *
 * A DomainSpec is one of
 *   - an open interval (a,b) on the line (dim 1),
 *   - an open disk (dim 2),
 *   - the interior of a simple counterclockwise polygon without holes (dim 2).
 *
 * All queries share one tolerance, kGeomTol: points within kGeomTol of the
 * boundary are classified as boundary (outside the open set).  Directions
 * passed to ray queries must be unit vectors; in 1D the only directions are
 * (+1,0) and (-1,0).  1D points are Vec2 with y == 0.
 */
#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace starfrac {

/// Boundary classification band for all geometric predicates.
inline constexpr double kGeomTol = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// First boundary hit of a ray: exit point and travelled distance.
struct RayHit {
  Vec2 point;
  double distance = 0.0;
};

class DomainSpec {
 public:
  enum class Kind { Interval, Disk, Polygon };

  static DomainSpec interval(double a, double b);
  static DomainSpec disk(const Vec2& center, double radius);
  /// Vertices must form a simple CCW polygon, >= 3 vertices, no repeated
  /// consecutive points.  Throws std::invalid_argument otherwise.
  static DomainSpec polygon(std::vector<Vec2> vertices);
  /// Plain-text polygon file: one "x y" vertex per line, '#' comments and
  /// blank lines ignored.  Parse errors throw std::runtime_error naming the
  /// offending line.
  static DomainSpec polygon_from_file(const std::string& path);

  Kind kind() const { return kind_; }
  int dim() const { return kind_ == Kind::Interval ? 1 : 2; }

  /// True iff p lies in the open domain, at distance > kGeomTol from the
  /// boundary.
  bool contains(const Vec2& p) const;

  /// Distance from an interior point to the boundary.  Throws
  /// std::invalid_argument if p is not interior.
  double boundary_distance(const Vec2& p) const;

  /// First boundary hit of the ray p + t*sigma, t > 0, for unit sigma and
  /// interior p.  Grazing contacts resolve to the smallest positive t.
  RayHit ray_exit(const Vec2& p, const Vec2& sigma) const;

  /// All boundary crossings of the ray p + t*sigma, sorted, deduplicated.
  /// Convex kinds return exactly one entry.  Interior p required.
  std::vector<double> ray_crossings(const Vec2& p, const Vec2& sigma) const;

  /// Time until the ray p + t*v leaves the domain (speed |v| along v).
  /// Homogeneous of degree -1 in v; throws std::invalid_argument on v == 0.
  double free_path(const Vec2& p, const Vec2& v) const;

  /// True iff the closed segment [a,b] stays inside the open domain.
  /// Requires contains(a); b == a counts as inside.
  bool segment_inside(const Vec2& a, const Vec2& b) const;

  Vec2 box_lo() const;
  Vec2 box_hi() const;
  double diameter() const;
  /// Radius of the largest inscribed ball.  Exact for interval/disk; for
  /// polygons a sampled lower bound, used only for resolution checks.
  double inradius() const { return inradius_; }

  double interval_a() const { return a_; }
  double interval_b() const { return b_; }
  const Vec2& disk_center() const { return center_; }
  double disk_radius() const { return radius_; }
  const std::vector<Vec2>& polygon_vertices() const { return verts_; }

 private:
  DomainSpec() = default;
  void finalize_polygon();

  Kind kind_ = Kind::Interval;
  double a_ = 0.0, b_ = 0.0;          // interval
  Vec2 center_;                        // disk
  double radius_ = 0.0;                // disk
  std::vector<Vec2> verts_;            // polygon, CCW
  double inradius_ = 0.0;
};

}  // namespace starfrac
