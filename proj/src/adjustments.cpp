#include "mars/adjustments.hpp"

#include <algorithm>

#include "mars/plane_fit.hpp"

namespace mars {

namespace {

// Link vertices of v: every vertex sharing a triangle with v.
std::vector<int> link_vertices(const TriMesh& mesh, int v) {
  std::vector<int> out;
  for (int t : mesh.triangles_at(v))
    for (int w : mesh.triangle(t))
      if (w != v) out.push_back(w);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Link edges of v: opposite edges of its star triangles, sorted.
std::vector<VertexPair> link_edges(const TriMesh& mesh, int v) {
  std::vector<VertexPair> out;
  for (int t : mesh.triangles_at(v)) {
    const auto& tri = mesh.triangle(t);
    int i = 0;
    while (tri[i] != v) ++i;
    out.emplace_back(tri[(i + 1) % 3], tri[(i + 2) % 3]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool vertex_on_boundary(const TriMesh& mesh, int v) {
  for (int t : mesh.triangles_at(v)) {
    const auto& tri = mesh.triangle(t);
    int i = 0;
    while (tri[i] != v) ++i;
    for (const VertexPair& e : {VertexPair(v, tri[(i + 1) % 3]),
                                VertexPair(v, tri[(i + 2) % 3])})
      if (mesh.edge_triangles(e)->size() == 1) return true;
  }
  return false;
}

}  // namespace

SplitResult edge_split_at(TriMesh& mesh, const VertexPair& e,
                          std::span<const Vec3> interior_points) {
  const auto* inc = mesh.edge_triangles(e);
  if (!inc) throw MeshError("edge_split: edge not in mesh");
  SplitResult result;
  if (interior_points.empty()) return result;

  for (const Vec3& p : interior_points)
    result.new_vertices.push_back(mesh.add_vertex(p));

  // Chain of vertices from e.a to e.b through the new ones.
  std::vector<int> chain;
  chain.push_back(e.a);
  chain.insert(chain.end(), result.new_vertices.begin(),
               result.new_vertices.end());
  chain.push_back(e.b);

  const std::vector<int> old_tris = *inc;
  for (int t : old_tris) {
    const int opposite = mesh.opposite_vertex(t, e);
    const bool forward = mesh.triangle_has_directed_edge(t, e.a, e.b);
    mesh.remove_triangle(t);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const int u = chain[i];
      const int v = chain[i + 1];
      const int id = forward ? mesh.add_triangle(u, v, opposite)
                             : mesh.add_triangle(v, u, opposite);
      result.new_triangles.push_back(id);
    }
  }
  return result;
}

SplitResult edge_split(TriMesh& mesh, const VertexPair& e, int n_sub) {
  if (n_sub < 1) throw MeshError("edge_split: n_sub must be positive");
  if (!mesh.has_edge(e)) throw MeshError("edge_split: edge not in mesh");
  std::vector<Vec3> pts;
  const Vec3 pa = mesh.position(e.a);
  const Vec3 pb = mesh.position(e.b);
  for (int i = 1; i < n_sub; ++i) {
    const double t = static_cast<double>(i) / n_sub;
    pts.push_back((1.0 - t) * pa + t * pb);
  }
  return edge_split_at(mesh, e, pts);
}

bool collapse_legal(const TriMesh& mesh, const VertexPair& e, int keep,
                    CollapseError* why, double max_result_edge) {
  auto fail = [&](CollapseError err) {
    if (why) *why = err;
    return false;
  };

  const auto* inc = mesh.edge_triangles(e);
  if (!inc || !e.contains(keep)) return fail(CollapseError::EdgeMissing);
  const int gone = e.other(keep);

  // Link condition. Shared link vertices must be exactly the vertices
  // opposite the edge, and the endpoints must share no link edge.
  std::vector<int> opposite;
  for (int t : *inc) opposite.push_back(mesh.opposite_vertex(t, e));
  std::sort(opposite.begin(), opposite.end());

  const auto la = link_vertices(mesh, e.a);
  const auto lb = link_vertices(mesh, e.b);
  std::vector<int> shared;
  std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(),
                        std::back_inserter(shared));
  if (shared != opposite) return fail(CollapseError::LinkCondition);

  const auto ea = link_edges(mesh, e.a);
  const auto eb = link_edges(mesh, e.b);
  std::vector<VertexPair> shared_edges;
  std::set_intersection(ea.begin(), ea.end(), eb.begin(), eb.end(),
                        std::back_inserter(shared_edges));
  if (!shared_edges.empty()) return fail(CollapseError::LinkCondition);

  // An interior edge between two boundary vertices would pinch the surface.
  if (inc->size() == 2 && vertex_on_boundary(mesh, e.a) &&
      vertex_on_boundary(mesh, e.b))
    return fail(CollapseError::BoundaryPinch);

  // Geometric guard: surviving triangles keep their normal within pi/2 and
  // stay non-degenerate; optionally their edges stay short enough.
  const Vec3 target = mesh.position(keep);
  for (int t : mesh.triangles_at(gone)) {
    if (std::find(inc->begin(), inc->end(), t) != inc->end()) continue;
    const auto& tri = mesh.triangle(t);
    std::array<Vec3, 3> before, after;
    for (int i = 0; i < 3; ++i) {
      before[i] = mesh.position(tri[i]);
      after[i] = tri[i] == gone ? target : before[i];
    }
    const Vec3 n0 = triangle_normal(before[0], before[1], before[2]);
    const Vec3 n1 = triangle_normal(after[0], after[1], after[2]);
    if (n1.norm() <= kGeomEps * std::max(1.0, n0.norm()) || n0.dot(n1) <= 0.0)
      return fail(CollapseError::NormalFlip);
    if (std::isfinite(max_result_edge)) {
      for (int i = 0; i < 3; ++i)
        if ((after[i] - after[(i + 1) % 3]).norm() > max_result_edge)
          return fail(CollapseError::EdgeTooLong);
    }
  }
  return true;
}

CollapseResult edge_collapse(TriMesh& mesh, const VertexPair& e, int keep,
                             double max_result_edge) {
  CollapseResult result;
  if (!collapse_legal(mesh, e, keep, &result.error, max_result_edge))
    return result;
  const int gone = e.other(keep);

  const std::vector<int> removed = *mesh.edge_triangles(e);
  for (int t : removed) mesh.remove_triangle(t);
  result.removed_triangles = static_cast<int>(removed.size());

  const std::vector<int> rehome = mesh.triangles_at(gone);
  for (int t : rehome) {
    auto tri = mesh.triangle(t);
    for (int& v : tri)
      if (v == gone) v = keep;
    mesh.remove_triangle(t);
    mesh.add_triangle(tri[0], tri[1], tri[2]);
  }
  result.rehomed_triangles = static_cast<int>(rehome.size());
  mesh.remove_vertex(gone);

  result.ok = true;
  result.kept_vertex = keep;
  result.removed_vertex = gone;
  return result;
}

FlipDecision evaluate_edge_flip(const TriMesh& mesh, int tri) {
  FlipDecision d;
  if (!mesh.triangle_alive(tri)) return d;

  // The smallest interior angle sits opposite the shortest edge, so the
  // longest edge contains the smallest-angle vertex: that is the flip edge.
  const auto edges = mesh.triangle_edges(tri);
  d.old_edge = edges[0];
  double longest = mesh.edge_length(edges[0]);
  for (int i = 1; i < 3; ++i) {
    const double len = mesh.edge_length(edges[i]);
    if (len > longest) {
      longest = len;
      d.old_edge = edges[i];
    }
  }

  const auto* inc = mesh.edge_triangles(d.old_edge);
  if (inc->size() != 2) return d;  // boundary edge: not applicable
  d.neighbor = (*inc)[0] == tri ? (*inc)[1] : (*inc)[0];

  const int c = mesh.opposite_vertex(tri, d.old_edge);
  const int dd = mesh.opposite_vertex(d.neighbor, d.old_edge);
  if (c == dd) return d;
  d.new_edge = VertexPair(c, dd);
  if (mesh.has_edge(d.new_edge)) return d;  // flip would duplicate an edge

  // Orient so that `tri` traverses a -> b.
  int a = d.old_edge.a;
  int b = d.old_edge.b;
  if (!mesh.triangle_has_directed_edge(tri, a, b)) std::swap(a, b);

  const Vec3 pa = mesh.position(a);
  const Vec3 pb = mesh.position(b);
  const Vec3 pc = mesh.position(c);
  const Vec3 pd = mesh.position(dd);

  // The quadrilateral a -> d -> b -> c must be convex in the least-squares
  // plane of its corners, otherwise the flipped diagonal leaves the union.
  const std::array<Vec3, 4> corners = {pa, pd, pb, pc};
  const auto plane = fit_plane(corners);
  if (!plane) return d;
  const PlaneFrame frame = make_plane_frame(*plane, 0.25 * (pa + pb + pc + pd));
  std::array<Vec2, 4> q;
  for (int i = 0; i < 4; ++i) q[i] = frame.to_plane(corners[i]);
  double sign = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double cr =
        cross2(q[(i + 1) % 4] - q[i], q[(i + 2) % 4] - q[(i + 1) % 4]);
    if (cr == 0.0) return d;
    if (sign == 0.0)
      sign = cr;
    else if (sign * cr < 0.0)
      return d;  // reflex corner or self-intersection
  }

  d.old_min_angle = std::min(min_interior_angle(pa, pb, pc),
                             min_interior_angle(pb, pa, pd));
  d.new_min_angle = std::min(min_interior_angle(pa, pd, pc),
                             min_interior_angle(pd, pb, pc));
  if (d.new_min_angle <= d.old_min_angle) return d;

  d.new_tri_a = {a, dd, c};
  d.new_tri_b = {dd, b, c};
  d.applicable = true;
  return d;
}

FlipResult edge_flip(TriMesh& mesh, int tri) {
  FlipResult result;
  result.decision = evaluate_edge_flip(mesh, tri);
  if (!result.decision.applicable) return result;
  mesh.remove_triangle(tri);
  mesh.remove_triangle(result.decision.neighbor);
  const auto& ta = result.decision.new_tri_a;
  const auto& tb = result.decision.new_tri_b;
  result.new_triangles[0] = mesh.add_triangle(ta[0], ta[1], ta[2]);
  result.new_triangles[1] = mesh.add_triangle(tb[0], tb[1], tb[2]);
  return result;
}

std::optional<std::array<int, 2>> flip_diagonal(TriMesh& mesh,
                                                const VertexPair& e) {
  const auto* inc = mesh.edge_triangles(e);
  if (!inc || inc->size() != 2) return std::nullopt;
  const int t0 = (*inc)[0];
  const int t1 = (*inc)[1];
  const int c = mesh.opposite_vertex(t0, e);
  const int d = mesh.opposite_vertex(t1, e);
  if (c == d || mesh.has_edge(VertexPair(c, d))) return std::nullopt;

  int a = e.a;
  int b = e.b;
  if (!mesh.triangle_has_directed_edge(t0, a, b)) std::swap(a, b);
  mesh.remove_triangle(t0);
  mesh.remove_triangle(t1);
  return std::array<int, 2>{mesh.add_triangle(a, d, c),
                            mesh.add_triangle(d, b, c)};
}

}  // namespace mars
