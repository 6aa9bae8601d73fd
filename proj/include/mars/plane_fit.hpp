#pragma once

#include <optional>
#include <span>

#include "mars/geometry.hpp"

namespace mars {

// Least-squares plane through a point set. The coordinate axis with the
// smallest span over the set is expressed in terms of the other two:
// dropped z  ->  z = a*x + b*y + c
// dropped y  ->  y = a*x + b*z + c
// dropped x  ->  x = a*y + b*z + c
struct FittedPlane {
  int dropped_axis = 2;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  Vec3 unit_normal() const;
  // Orthogonal (closest point) projection onto the plane.
  Vec3 project(const Vec3& q) const;
  double signed_distance(const Vec3& q) const;
};

// Fails (nullopt) when the points are coincident or collinear, i.e. the
// least-squares system is rank deficient.
std::optional<FittedPlane> fit_plane(std::span<const Vec3> points);

// Orthonormal in-plane coordinates; to_plane(q) are the coordinates of the
// orthogonal projection of q.
struct PlaneFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitY();
  Vec3 n = Vec3::UnitZ();

  Vec2 to_plane(const Vec3& q) const {
    const Vec3 d = q - origin;
    return {d.dot(u), d.dot(v)};
  }
  Vec3 from_plane(const Vec2& s) const {
    return origin + s.x() * u + s.y() * v;
  }
  Vec3 project(const Vec3& q) const { return q - (q - origin).dot(n) * n; }
};

PlaneFrame make_plane_frame(const FittedPlane& plane, const Vec3& origin_hint);

// Frame of the plane through `origin` orthogonal to `normal`.
PlaneFrame frame_from_normal(const Vec3& normal, const Vec3& origin);

}  // namespace mars
