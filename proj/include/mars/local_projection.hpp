#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mars/plane_fit.hpp"
#include "mars/tri_mesh.hpp"

namespace mars {

// Projection of a neighborhood of a vertex onto its closed star: fit a plane
// to the adjacent vertices, orthogonally project the star triangles and the
// query point onto it, locate the containing planar triangle, and transfer
// the barycentric coordinates back to the 3D triangle. Queries outside every
// planar star triangle are outside the neighborhood and yield nullopt.
//
// The star geometry is captured at build time, so a projector keeps mapping
// onto the original surface while mesh vertices move.
class LocalProjector {
 public:
  static std::optional<LocalProjector> build(
      std::span<const Vec3> adjacent_points,
      std::vector<std::array<Vec3, 3>> star_triangles);

  // Star restricted to `patch_triangles` when given, otherwise the full star.
  static std::optional<LocalProjector> build(
      const TriMesh& mesh, int vertex,
      std::span<const int> patch_triangles = {});

  std::optional<Vec3> project(const Vec3& q) const;

  const PlaneFrame& frame() const { return frame_; }

 private:
  PlaneFrame frame_;
  std::vector<std::array<Vec3, 3>> tris3_;
  std::vector<std::array<Vec2, 3>> tris2_;
};

}  // namespace mars
