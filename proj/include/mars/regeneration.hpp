#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mars/local_projection.hpp"
#include "mars/relocation.hpp"
#include "mars/rng.hpp"
#include "mars/tri_mesh.hpp"

namespace mars {

// Closed planar polygon in fitted-plane coordinates; `source_vertices` are
// the 3D mesh vertices each corner came from (empty for synthetic polygons).
struct PlanarPolygon {
  std::vector<Vec2> points;
  std::vector<int> source_vertices;

  double signed_area() const;
};

// Enclosed area by the shoelace form of Green's formula.
double polygon_area(const PlanarPolygon& poly);

double average_edge_length(const PlanarPolygon& poly);

bool point_in_polygon(const PlanarPolygon& poly, const Vec2& q);

double boundary_distance(const PlanarPolygon& poly, const Vec2& q);

bool polygon_simple(const PlanarPolygon& poly);

// Number of interior vertices an ideal equilateral tiling of the polygon
// would use, given the target edge length.
int estimate_interior_points(const PlanarPolygon& poly, double h_tri);

// Uniform rejection sampling strictly inside the polygon, keeping every
// point at least 0.1*h_tri away from the boundary and from each other.
// nullopt when the retry budget runs out.
std::optional<std::vector<Vec2>> scatter_points(const PlanarPolygon& poly,
                                                int count, double h_tri,
                                                Rng& rng);

struct Triangulation2 {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
};

// Delaunay triangulation by incremental insertion. Cocircular ties resolve
// so that tie diagonals pass through the lexicographically smallest point
// involved. nullopt for fewer than 3 points, duplicates, or collinear input.
std::optional<Triangulation2> delaunay_triangulate(std::span<const Vec2> pts);

// Delaunay triangulation of the polygon corners plus interior points,
// clipped to the polygon (triangles whose centroid falls outside are
// dropped). Fails unless the clipped boundary is exactly the polygon cycle
// and every point is used.
std::optional<Triangulation2> delaunay_2d(const PlanarPolygon& poly,
                                          std::span<const Vec2> interior);

// Ordered boundary cycle of a patch (sorted triangle ids), directed as the
// patch triangles traverse it. Fails when the boundary is not one simple
// cycle or an off-cycle patch vertex still touches outside triangles.
std::optional<std::vector<int>> patch_boundary_cycle(
    const TriMesh& mesh, std::span<const int> patch_triangles);

// Local projections anchored at every patch vertex whose in-patch star
// supports a plane fit; used to pull planar points back to the surface.
class SurfaceAnchors {
 public:
  SurfaceAnchors(const TriMesh& mesh, std::span<const int> patch_triangles);

  // Image under the anchor with the shortest projection distance.
  std::optional<Vec3> lift(const Vec3& q) const;

 private:
  std::vector<LocalProjector> projectors_;
};

struct LiftedCandidate {
  TriMesh mesh;
  std::vector<int> parent_vertex;  // candidate vertex -> parent id, -1 if new
};

// Replace the planar triangulation's vertex positions by surface points:
// the first `polygon_parent_ids.size()` points keep their original 3D
// positions, the rest go through the anchors. Topology is preserved.
std::optional<LiftedCandidate> lift_to_surface(
    const Triangulation2& planar, const PlaneFrame& frame,
    const TriMesh& parent, std::span<const int> patch_triangles,
    std::span<const int> polygon_parent_ids, bool flip_orientation);

struct LtrTrial {
  int m_star = 0;
  int trial = 0;
  bool candidate_built = false;
  bool regular = false;
  double min_angle = 0.0;
  bool kept = false;
};

struct LtrResult {
  bool success = false;
  int rounds = 0;
  std::vector<LtrTrial> trials;
  std::vector<int> removed_triangles;
  std::vector<int> new_triangles;
};

// Regenerate the mesh around a violating triangle: project the patch
// boundary to a fitted plane, triangulate scattered points, lift back,
// polish with vertex relocation, and splice in the best regular candidate.
LtrResult ltr_run(TriMesh& mesh, const RegularityParams& params,
                  int seed_triangle, const CascadeLimits& limits,
                  const LineSearchParams& line_search, Rng& rng);

}  // namespace mars
