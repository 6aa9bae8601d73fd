#include "mars/local_projection.hpp"

#include <algorithm>

namespace mars {

std::optional<LocalProjector> LocalProjector::build(
    std::span<const Vec3> adjacent_points,
    std::vector<std::array<Vec3, 3>> star_triangles) {
  if (star_triangles.empty()) return std::nullopt;
  const auto plane = fit_plane(adjacent_points);
  if (!plane) return std::nullopt;

  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : adjacent_points) centroid += p;
  centroid /= static_cast<double>(adjacent_points.size());

  LocalProjector proj;
  proj.frame_ = make_plane_frame(*plane, centroid);
  proj.tris3_ = std::move(star_triangles);
  proj.tris2_.reserve(proj.tris3_.size());
  for (const auto& t : proj.tris3_)
    proj.tris2_.push_back({proj.frame_.to_plane(t[0]),
                           proj.frame_.to_plane(t[1]),
                           proj.frame_.to_plane(t[2])});
  return proj;
}

std::optional<LocalProjector> LocalProjector::build(
    const TriMesh& mesh, int vertex, std::span<const int> patch_triangles) {
  std::vector<int> star;
  for (int t : mesh.triangles_at(vertex)) {
    if (!patch_triangles.empty() &&
        !std::binary_search(patch_triangles.begin(), patch_triangles.end(), t))
      continue;
    star.push_back(t);
  }
  if (star.empty()) return std::nullopt;

  std::vector<int> ring;
  for (int t : star)
    for (int v : mesh.triangle(t))
      if (v != vertex) ring.push_back(v);
  std::sort(ring.begin(), ring.end());
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());

  std::vector<Vec3> adjacent;
  adjacent.reserve(ring.size());
  for (int v : ring) adjacent.push_back(mesh.position(v));

  std::vector<std::array<Vec3, 3>> tris;
  tris.reserve(star.size());
  for (int t : star) {
    const auto p = mesh.triangle_points(t);
    tris.push_back({p[0], p[1], p[2]});
  }
  return build(adjacent, std::move(tris));
}

std::optional<Vec3> LocalProjector::project(const Vec3& q) const {
  const Vec2 s = frame_.to_plane(q);
  // Ties on shared edges resolve to the first (lowest-index) triangle; the
  // transferred point agrees on either side.
  for (std::size_t i = 0; i < tris2_.size(); ++i) {
    const auto w = barycentric_2d(s, tris2_[i][0], tris2_[i][1], tris2_[i][2]);
    if (!barycentric_inside(w)) continue;
    return w[0] * tris3_[i][0] + w[1] * tris3_[i][1] + w[2] * tris3_[i][2];
  }
  return std::nullopt;
}

}  // namespace mars
