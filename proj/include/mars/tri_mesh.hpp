#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mars/geometry.hpp"

namespace mars {

struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

// Unordered edge as a normalized (min, max) vertex-index pair.
struct VertexPair {
  int a = -1;
  int b = -1;

  VertexPair() = default;
  VertexPair(int i, int j) : a(i < j ? i : j), b(i < j ? j : i) {}

  bool valid() const { return a >= 0; }
  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }
  bool contains(int v) const { return v == a || v == b; }
  int other(int v) const { return v == a ? b : a; }

  friend bool operator==(const VertexPair& x, const VertexPair& y) {
    return x.a == y.a && x.b == y.b;
  }
  friend bool operator<(const VertexPair& x, const VertexPair& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  }
};

// Mesh admissibility bounds: edge lengths in [r_tiny*h_max, h_max] and
// interior angles no smaller than theta.
struct RegularityParams {
  double r_tiny = 0.1;
  double h_max = 0.0;
  double theta = kPi / 10.0;

  double min_edge() const { return r_tiny * h_max; }
};

// Indexed triangle set with derived edge->triangle and vertex->triangle
// incidence, updated incrementally by every local operation. Removed
// elements leave dead slots so indices stay stable; compacted() renumbers.
class TriMesh {
 public:
  TriMesh() = default;

  int add_vertex(const Vec3& p);
  int add_triangle(int a, int b, int c);
  void remove_triangle(int t);
  void remove_vertex(int v);  // vertex must have no incident triangle

  int vertex_count() const { return live_vertices_; }
  int triangle_count() const { return live_triangles_; }
  std::int64_t edge_count() const {
    return static_cast<std::int64_t>(edge_tris_.size());
  }
  int vertex_capacity() const { return static_cast<int>(positions_.size()); }
  int triangle_capacity() const { return static_cast<int>(tris_.size()); }

  bool vertex_alive(int v) const {
    return v >= 0 && v < vertex_capacity() && v_alive_[v];
  }
  bool triangle_alive(int t) const {
    return t >= 0 && t < triangle_capacity() && t_alive_[t];
  }

  const Vec3& position(int v) const { return positions_[v]; }
  void set_position(int v, const Vec3& p) { positions_[v] = p; }

  const std::array<int, 3>& triangle(int t) const { return tris_[t]; }
  const std::vector<int>& triangles_at(int v) const { return vtx_tris_[v]; }

  // Triangles incident to the edge, ascending; nullptr if the edge is absent.
  const std::vector<int>* edge_triangles(const VertexPair& e) const;
  bool has_edge(const VertexPair& e) const {
    return edge_tris_.count(e.key()) > 0;
  }

  std::vector<int> vertex_ids() const;
  std::vector<int> triangle_ids() const;
  std::vector<VertexPair> edges() const;  // sorted

  std::array<VertexPair, 3> triangle_edges(int t) const;
  std::array<Vec3, 3> triangle_points(int t) const;
  int opposite_vertex(int t, const VertexPair& e) const;
  bool triangle_has_directed_edge(int t, int from, int to) const;

  double edge_length(const VertexPair& e) const {
    return (positions_[e.a] - positions_[e.b]).norm();
  }
  double min_triangle_angle(int t) const {
    const auto p = triangle_points(t);
    return min_interior_angle(p[0], p[1], p[2]);
  }

  int euler_characteristic() const {
    return vertex_count() - static_cast<int>(edge_count()) + triangle_count();
  }

  TriMesh compacted(std::vector<int>* old_to_new_vertex = nullptr) const;

 private:
  std::vector<Vec3> positions_;
  std::vector<char> v_alive_;
  std::vector<std::vector<int>> vtx_tris_;  // sorted triangle ids
  std::vector<std::array<int, 3>> tris_;
  std::vector<char> t_alive_;
  std::unordered_map<std::uint64_t, std::vector<int>> edge_tris_;
  int live_vertices_ = 0;
  int live_triangles_ = 0;
};

// Partition into boundary/interior edges and vertices. A boundary edge has
// exactly one incident triangle; a boundary vertex touches a boundary edge.
struct MeshClassification {
  std::vector<VertexPair> boundary_edges;
  std::vector<VertexPair> interior_edges;
  std::vector<int> boundary_vertices;
  std::vector<int> interior_vertices;
};

MeshClassification classify(const TriMesh& mesh);

// Closed star and link of a vertex. For an interior vertex the link is a
// single closed cycle; for a boundary vertex an open chain with one more
// vertex than star triangles. Star triangles are ordered along the link.
struct StarLink {
  std::vector<int> star;
  std::vector<int> link;
  bool closed = false;
};

StarLink star_link(const TriMesh& mesh, int vertex);

struct QualityReport {
  double min_edge = std::numeric_limits<double>::infinity();
  double max_edge = 0.0;
  double min_angle = kPi;
  std::vector<VertexPair> long_edges;
  std::vector<VertexPair> tiny_edges;
  std::vector<int> small_angle_triangles;

  bool regular() const {
    return long_edges.empty() && tiny_edges.empty() &&
           small_angle_triangles.empty();
  }
};

QualityReport check_regularity(const TriMesh& mesh,
                               const RegularityParams& params);

// One breadth-first growth round: all triangles incident to a seed vertex,
// together with their vertices. Feeding the vertices back in expands ring
// by ring.
struct Patch {
  std::vector<int> triangles;
  std::vector<int> vertices;
};

Patch bfs_expand(const TriMesh& mesh, std::span<const int> seed_vertices);

struct MeshViolation {
  enum class Kind {
    NonManifoldEdge,
    InconsistentOrientation,
    DuplicateTriangle,
  };
  Kind kind;
  VertexPair edge;
  int tri_a = -1;
  int tri_b = -1;
};

std::vector<MeshViolation> validate(const TriMesh& mesh);

// Standalone copy of a triangle subset; `to_parent_vertex` maps the copy's
// vertex ids back to the source mesh.
TriMesh extract_submesh(const TriMesh& mesh, std::span<const int> triangles,
                        std::vector<int>* to_parent_vertex = nullptr);

}  // namespace mars
