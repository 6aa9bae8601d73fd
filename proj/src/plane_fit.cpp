#include "mars/plane_fit.hpp"

#include <Eigen/Dense>

namespace mars {

namespace {

// Axes kept when `dropped` is expressed through the others, ascending.
std::pair<int, int> kept_axes(int dropped) {
  switch (dropped) {
    case 0:
      return {1, 2};
    case 1:
      return {0, 2};
    default:
      return {0, 1};
  }
}

}  // namespace

Vec3 FittedPlane::unit_normal() const {
  const auto [u, v] = kept_axes(dropped_axis);
  Vec3 n = Vec3::Zero();
  n[u] = a;
  n[v] = b;
  n[dropped_axis] = -1.0;
  return n.normalized();
}

double FittedPlane::signed_distance(const Vec3& q) const {
  const auto [u, v] = kept_axes(dropped_axis);
  const double residual = a * q[u] + b * q[v] + c - q[dropped_axis];
  // residual = -(n_raw . q + c_raw) with |n_raw| = sqrt(a^2+b^2+1)
  return -residual / std::sqrt(a * a + b * b + 1.0);
}

Vec3 FittedPlane::project(const Vec3& q) const {
  return q - signed_distance(q) * unit_normal();
}

std::optional<FittedPlane> fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) return std::nullopt;

  Vec3 lo = points[0];
  Vec3 hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 span = hi - lo;
  int dropped = 2;
  if (span.x() < span[dropped]) dropped = 0;
  if (span.y() < span[dropped]) dropped = 1;
  if (span.z() <= span[dropped]) dropped = 2;

  const auto [u, v] = kept_axes(dropped);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd M(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, 0) = points[i][u];
    M(i, 1) = points[i][v];
    M(i, 2) = 1.0;
    rhs(i) = points[i][dropped];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) return std::nullopt;
  const Eigen::Vector3d coef = qr.solve(rhs);

  FittedPlane plane;
  plane.dropped_axis = dropped;
  plane.a = coef(0);
  plane.b = coef(1);
  plane.c = coef(2);
  return plane;
}

PlaneFrame make_plane_frame(const FittedPlane& plane,
                            const Vec3& origin_hint) {
  PlaneFrame frame;
  frame.n = plane.unit_normal();
  // A base axis never parallel to the normal: the normal has a nonzero
  // component along the dropped axis.
  Vec3 base = Vec3::Zero();
  switch (plane.dropped_axis) {
    case 0:
      base = Vec3::UnitY();
      break;
    case 1:
      base = Vec3::UnitZ();
      break;
    default:
      base = Vec3::UnitX();
      break;
  }
  frame.u = (base - base.dot(frame.n) * frame.n).normalized();
  frame.v = frame.n.cross(frame.u);
  frame.origin = plane.project(origin_hint);
  return frame;
}

PlaneFrame frame_from_normal(const Vec3& normal, const Vec3& origin) {
  PlaneFrame frame;
  frame.n = normal.normalized();
  int smallest = 0;
  for (int axis = 1; axis < 3; ++axis)
    if (std::abs(frame.n[axis]) < std::abs(frame.n[smallest])) smallest = axis;
  Vec3 base = Vec3::Zero();
  base[smallest] = 1.0;
  frame.u = (base - base.dot(frame.n) * frame.n).normalized();
  frame.v = frame.n.cross(frame.u);
  frame.origin = origin;
  return frame;
}

}  // namespace mars
