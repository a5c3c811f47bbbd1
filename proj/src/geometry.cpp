// SPDX-License-Identifier: Apache-2.0
#include "starfrac/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace starfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); }

/// Distance from p to the closed segment [a,b].
double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const double len2 = e.norm2();
  if (len2 == 0.0) return (p - a).norm();
  const double t = clamp01(dot(p - a, e) / len2);
  return (p - (a + t * e)).norm();
}

/// Even-odd crossing test; boundary handling is done by the caller.
bool crossing_inside(const Vec2& p, const std::vector<Vec2>& v) {
  bool inside = false;
  const size_t n = v.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = v[j];
    const Vec2& b = v[i];
    if ((b.y > p.y) != (a.y > p.y)) {
      const double xint = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

double polygon_boundary_distance(const Vec2& p, const std::vector<Vec2>& v) {
  double d = kInf;
  const size_t n = v.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    d = std::min(d, segment_distance(p, v[j], v[i]));
  return d;
}

void require_unit(const Vec2& sigma) {
  if (std::abs(sigma.norm2() - 1.0) > 1e-9)
    throw std::invalid_argument("ray direction must be a unit vector");
}

/// Proper or touching intersection test for segments [a,b] and [c,d],
/// used only by the polygon simplicity validator.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = cross(q - p, r - p);
    if (v > kGeomTol) return 1;
    if (v < -kGeomTol) return -1;
    return 0;
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  const auto on = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return segment_distance(r, p, q) <= kGeomTol;
  };
  return (o1 == 0 && on(a, b, c)) || (o2 == 0 && on(a, b, d)) ||
         (o3 == 0 && on(c, d, a)) || (o4 == 0 && on(c, d, b));
}

}  // namespace

DomainSpec DomainSpec::interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("interval requires a < b");
  DomainSpec d;
  d.kind_ = Kind::Interval;
  d.a_ = a;
  d.b_ = b;
  d.inradius_ = 0.5 * (b - a);
  return d;
}

DomainSpec DomainSpec::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk requires radius > 0");
  DomainSpec d;
  d.kind_ = Kind::Disk;
  d.center_ = center;
  d.radius_ = radius;
  d.inradius_ = radius;
  return d;
}

DomainSpec DomainSpec::polygon(std::vector<Vec2> vertices) {
  DomainSpec d;
  d.kind_ = Kind::Polygon;
  d.verts_ = std::move(vertices);
  d.finalize_polygon();
  return d;
}

void DomainSpec::finalize_polygon() {
  const size_t n = verts_.size();
  if (n < 3) throw std::invalid_argument("polygon requires at least 3 vertices");
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    if ((verts_[i] - verts_[j]).norm() <= kGeomTol)
      throw std::invalid_argument("polygon has a zero-length edge");
  double area2 = 0.0;
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    area2 += cross(verts_[j], verts_[i]);
  if (area2 <= 0.0)
    throw std::invalid_argument("polygon vertices must be counterclockwise");
  // Simplicity: non-adjacent edges must not touch.
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = verts_[i];
    const Vec2& b = verts_[(i + 1) % n];
    for (size_t k = i + 1; k < n; ++k) {
      if (k == i || (k + 1) % n == i || (i + 1) % n == k) continue;
      if (segments_intersect(a, b, verts_[k], verts_[(k + 1) % n]))
        throw std::invalid_argument("polygon edges intersect; must be simple");
    }
  }
  // Sampled inscribed radius, a lower bound used only for resolution checks.
  const Vec2 lo = box_lo(), hi = box_hi();
  double best = 0.0;
  const int m = 128;
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const Vec2 p{lo.x + (ix + 0.5) / m * (hi.x - lo.x),
                   lo.y + (iy + 0.5) / m * (hi.y - lo.y)};
      if (polygon_boundary_distance(p, verts_) > kGeomTol && crossing_inside(p, verts_))
        best = std::max(best, polygon_boundary_distance(p, verts_));
    }
  inradius_ = best;
}

DomainSpec DomainSpec::polygon_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open polygon file");
  std::vector<Vec2> verts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x)) {
      // Blank or comment-only line.
      std::string rest;
      ss.clear();
      ss >> rest;
      if (rest.empty()) continue;
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": expected two numbers");
    }
    std::string trailing;
    if (!(ss >> y) || (ss >> trailing && !trailing.empty()))
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": expected two numbers");
    verts.push_back({x, y});
  }
  try {
    return polygon(std::move(verts));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

bool DomainSpec::contains(const Vec2& p) const {
  switch (kind_) {
    case Kind::Interval:
      return p.x > a_ + kGeomTol && p.x < b_ - kGeomTol;
    case Kind::Disk:
      return (p - center_).norm() < radius_ - kGeomTol;
    case Kind::Polygon:
      if (polygon_boundary_distance(p, verts_) <= kGeomTol) return false;
      return crossing_inside(p, verts_);
  }
  return false;
}

double DomainSpec::boundary_distance(const Vec2& p) const {
  if (!contains(p))
    throw std::invalid_argument("boundary_distance requires an interior point");
  switch (kind_) {
    case Kind::Interval:
      return std::min(p.x - a_, b_ - p.x);
    case Kind::Disk:
      return radius_ - (p - center_).norm();
    case Kind::Polygon:
      return polygon_boundary_distance(p, verts_);
  }
  return 0.0;
}

RayHit DomainSpec::ray_exit(const Vec2& p, const Vec2& sigma) const {
  if (!contains(p))
    throw std::invalid_argument("ray_exit requires an interior point");
  require_unit(sigma);
  switch (kind_) {
    case Kind::Interval: {
      if (std::abs(sigma.y) > 1e-9)
        throw std::invalid_argument("1D directions are (+1,0) or (-1,0)");
      const double t = sigma.x > 0.0 ? b_ - p.x : p.x - a_;
      return {{sigma.x > 0.0 ? b_ : a_, 0.0}, t};
    }
    case Kind::Disk: {
      const Vec2 q = p - center_;
      const double b = dot(q, sigma);
      const double disc = b * b + radius_ * radius_ - q.norm2();
      const double t = -b + std::sqrt(disc);
      return {p + t * sigma, t};
    }
    case Kind::Polygon: {
      const auto ts = ray_crossings(p, sigma);
      return {p + ts.front() * sigma, ts.front()};
    }
  }
  return {};
}

std::vector<double> DomainSpec::ray_crossings(const Vec2& p, const Vec2& sigma) const {
  if (!contains(p))
    throw std::invalid_argument("ray_crossings requires an interior point");
  require_unit(sigma);
  if (kind_ != Kind::Polygon) return {ray_exit(p, sigma).distance};

  std::vector<double> ts;
  const size_t n = verts_.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = verts_[j];
    const Vec2 e = verts_[i] - a;
    const double denom = cross(sigma, e);
    if (std::abs(denom) < 1e-15 * e.norm()) continue;  // parallel edge
    const Vec2 w = a - p;
    const double t = cross(w, e) / denom;
    const double u = cross(w, sigma) / denom;
    if (t > kGeomTol && u >= -1e-12 && u <= 1.0 + 1e-12) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  // A crossing through a vertex is reported by both incident edges.
  std::vector<double> out;
  for (double t : ts)
    if (out.empty() || t - out.back() > 1e-9 * (1.0 + t)) out.push_back(t);
  if (out.empty())
    throw std::runtime_error("ray from interior point found no boundary hit");
  return out;
}

double DomainSpec::free_path(const Vec2& p, const Vec2& v) const {
  const double speed = v.norm();
  if (speed == 0.0) throw std::invalid_argument("free_path requires v != 0");
  return ray_exit(p, (1.0 / speed) * v).distance / speed;
}

bool DomainSpec::segment_inside(const Vec2& a, const Vec2& b) const {
  if (!contains(a))
    throw std::invalid_argument("segment_inside requires an interior base point");
  const Vec2 d = b - a;
  const double len = d.norm();
  if (len == 0.0) return true;
  return len < ray_exit(a, (1.0 / len) * d).distance - kGeomTol;
}

Vec2 DomainSpec::box_lo() const {
  switch (kind_) {
    case Kind::Interval: return {a_, 0.0};
    case Kind::Disk: return {center_.x - radius_, center_.y - radius_};
    case Kind::Polygon: {
      Vec2 lo{kInf, kInf};
      for (const auto& v : verts_) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
      }
      return lo;
    }
  }
  return {};
}

Vec2 DomainSpec::box_hi() const {
  switch (kind_) {
    case Kind::Interval: return {b_, 0.0};
    case Kind::Disk: return {center_.x + radius_, center_.y + radius_};
    case Kind::Polygon: {
      Vec2 hi{-kInf, -kInf};
      for (const auto& v : verts_) {
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
      }
      return hi;
    }
  }
  return {};
}

double DomainSpec::diameter() const {
  const Vec2 lo = box_lo(), hi = box_hi();
  return (hi - lo).norm();
}

}  // namespace starfrac
