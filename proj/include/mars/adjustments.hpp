#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mars/tri_mesh.hpp"

namespace mars {

struct SplitResult {
  std::vector<int> new_vertices;   // along the edge, from e.a towards e.b
  std::vector<int> new_triangles;  // fan triangles replacing the incident ones
};

// Replace an edge by n_sub equidistant subedges; each incident triangle is
// fanned from its opposite vertex. n_sub == 1 leaves the mesh unchanged.
SplitResult edge_split(TriMesh& mesh, const VertexPair& e, int n_sub);

// Same topology change with caller-supplied interior points (ordered from
// e.a to e.b); used when the subdivision points come from another
// configuration of the same mesh.
SplitResult edge_split_at(TriMesh& mesh, const VertexPair& e,
                          std::span<const Vec3> interior_points);

enum class CollapseError {
  EdgeMissing,
  LinkCondition,
  BoundaryPinch,
  NormalFlip,
  EdgeTooLong,
};

struct CollapseResult {
  bool ok = false;
  CollapseError error = CollapseError::EdgeMissing;
  int kept_vertex = -1;
  int removed_vertex = -1;
  int removed_triangles = 0;
  int rehomed_triangles = 0;
};

// Rejects collapses that would break the simplicial complex (link condition,
// boundary pinch) or swing a surviving triangle's normal by more than pi/2.
// max_result_edge, when finite, additionally rejects collapses that would
// stretch a surviving edge beyond that length.
bool collapse_legal(const TriMesh& mesh, const VertexPair& e, int keep,
                    CollapseError* why = nullptr,
                    double max_result_edge =
                        std::numeric_limits<double>::infinity());

CollapseResult edge_collapse(TriMesh& mesh, const VertexPair& e, int keep,
                             double max_result_edge =
                                 std::numeric_limits<double>::infinity());

struct FlipDecision {
  bool applicable = false;
  double old_min_angle = 0.0;
  double new_min_angle = 0.0;
  VertexPair old_edge;
  VertexPair new_edge;
  int neighbor = -1;                    // triangle across old_edge
  std::array<int, 3> new_tri_a{-1, -1, -1};
  std::array<int, 3> new_tri_b{-1, -1, -1};
};

// Considers flipping the edge adjacent to the triangle's smallest interior
// angle (its longest edge). Applicable only when the two triangles project
// to a convex quadrilateral in their least-squares plane and the flip
// strictly increases the minimum of the six interior angles.
FlipDecision evaluate_edge_flip(const TriMesh& mesh, int tri);

struct FlipResult {
  FlipDecision decision;
  std::array<int, 2> new_triangles{-1, -1};
};

FlipResult edge_flip(TriMesh& mesh, int tri);

// Unconditional diagonal flip of an interior edge; no quality check. Fails
// when the edge is not interior or the new diagonal already exists. Two
// successive flips of the same quadrilateral restore the triangulation.
std::optional<std::array<int, 2>> flip_diagonal(TriMesh& mesh,
                                                const VertexPair& e);

}  // namespace mars
