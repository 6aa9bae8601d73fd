#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace mars {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;

// Absolute tolerance for geometric predicates; the domain is the unit cube.
inline constexpr double kGeomEps = 1e-12;

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Interior angle at `a` of triangle (a, b, c). Degenerate corners (a zero
// length edge) report 0 so that collapse candidates rank as worst quality.
inline double angle_at(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = b - a;
  const Vec3 v = c - a;
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu <= 0.0 || nv <= 0.0) return 0.0;
  return std::acos(clamp_unit(u.dot(v) / (nu * nv)));
}

inline std::array<double, 3> interior_angles(const Vec3& a, const Vec3& b,
                                             const Vec3& c) {
  return {angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)};
}

inline double min_interior_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const auto ang = interior_angles(a, b, c);
  return std::min({ang[0], ang[1], ang[2]});
}

// Unnormalized normal; orientation follows the vertex order.
inline Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  return (b - a).cross(c - a);
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * triangle_normal(a, b, c).norm();
}

inline double point_segment_distance(const Vec3& p, const Vec3& a,
                                     const Vec3& b) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

inline double cross2(const Vec2& u, const Vec2& v) {
  return u.x() * v.y() - u.y() * v.x();
}

// Barycentric coordinates of p with respect to (a, b, c) in the plane.
// A degenerate triangle yields non-finite coordinates; callers treat those
// as "not contained".
inline std::array<double, 3> barycentric_2d(const Vec2& p, const Vec2& a,
                                            const Vec2& b, const Vec2& c) {
  const double area = cross2(b - a, c - a);
  if (area == 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, -inf, -inf};
  }
  const double wa = cross2(b - p, c - p) / area;
  const double wb = cross2(c - p, a - p) / area;
  return {wa, wb, 1.0 - wa - wb};
}

inline bool barycentric_inside(const std::array<double, 3>& w,
                               double tol = 1e-12) {
  return w[0] >= -tol && w[1] >= -tol && w[2] >= -tol;
}

}  // namespace mars
