#include "mars/tri_mesh.hpp"

#include <algorithm>
#include <map>

namespace mars {

namespace {

void insert_sorted(std::vector<int>& v, int x) {
  v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

void erase_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

}  // namespace

int TriMesh::add_vertex(const Vec3& p) {
  const int id = static_cast<int>(positions_.size());
  positions_.push_back(p);
  v_alive_.push_back(1);
  vtx_tris_.emplace_back();
  ++live_vertices_;
  return id;
}

int TriMesh::add_triangle(int a, int b, int c) {
  if (!vertex_alive(a) || !vertex_alive(b) || !vertex_alive(c))
    throw MeshError("add_triangle: vertex out of range or removed");
  if (a == b || b == c || a == c)
    throw MeshError("add_triangle: repeated vertex index");
  const int id = static_cast<int>(tris_.size());
  tris_.push_back({a, b, c});
  t_alive_.push_back(1);
  ++live_triangles_;
  for (int v : {a, b, c}) insert_sorted(vtx_tris_[v], id);
  for (const VertexPair& e :
       {VertexPair(a, b), VertexPair(b, c), VertexPair(c, a)}) {
    auto& inc = edge_tris_[e.key()];
    if (inc.empty()) inc.reserve(2);
    insert_sorted(inc, id);
  }
  return id;
}

void TriMesh::remove_triangle(int t) {
  if (!triangle_alive(t)) throw MeshError("remove_triangle: no such triangle");
  const auto [a, b, c] = tris_[t];
  for (int v : {a, b, c}) erase_sorted(vtx_tris_[v], t);
  for (const VertexPair& e :
       {VertexPair(a, b), VertexPair(b, c), VertexPair(c, a)}) {
    auto it = edge_tris_.find(e.key());
    erase_sorted(it->second, t);
    if (it->second.empty()) edge_tris_.erase(it);
  }
  t_alive_[t] = 0;
  --live_triangles_;
}

void TriMesh::remove_vertex(int v) {
  if (!vertex_alive(v)) throw MeshError("remove_vertex: no such vertex");
  if (!vtx_tris_[v].empty())
    throw MeshError("remove_vertex: vertex still has incident triangles");
  v_alive_[v] = 0;
  --live_vertices_;
}

const std::vector<int>* TriMesh::edge_triangles(const VertexPair& e) const {
  auto it = edge_tris_.find(e.key());
  return it == edge_tris_.end() ? nullptr : &it->second;
}

std::vector<int> TriMesh::vertex_ids() const {
  std::vector<int> ids;
  ids.reserve(live_vertices_);
  for (int v = 0; v < vertex_capacity(); ++v)
    if (v_alive_[v]) ids.push_back(v);
  return ids;
}

std::vector<int> TriMesh::triangle_ids() const {
  std::vector<int> ids;
  ids.reserve(live_triangles_);
  for (int t = 0; t < triangle_capacity(); ++t)
    if (t_alive_[t]) ids.push_back(t);
  return ids;
}

std::vector<VertexPair> TriMesh::edges() const {
  std::vector<VertexPair> out;
  out.reserve(edge_tris_.size());
  for (int t = 0; t < triangle_capacity(); ++t) {
    if (!t_alive_[t]) continue;
    for (const VertexPair& e : triangle_edges(t)) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::array<VertexPair, 3> TriMesh::triangle_edges(int t) const {
  const auto [a, b, c] = tris_[t];
  return {VertexPair(a, b), VertexPair(b, c), VertexPair(c, a)};
}

std::array<Vec3, 3> TriMesh::triangle_points(int t) const {
  const auto [a, b, c] = tris_[t];
  return {positions_[a], positions_[b], positions_[c]};
}

int TriMesh::opposite_vertex(int t, const VertexPair& e) const {
  for (int v : tris_[t])
    if (!e.contains(v)) return v;
  throw MeshError("opposite_vertex: edge not part of triangle");
}

bool TriMesh::triangle_has_directed_edge(int t, int from, int to) const {
  const auto& tri = tris_[t];
  for (int i = 0; i < 3; ++i)
    if (tri[i] == from && tri[(i + 1) % 3] == to) return true;
  return false;
}

TriMesh TriMesh::compacted(std::vector<int>* old_to_new_vertex) const {
  TriMesh out;
  std::vector<int> remap(positions_.size(), -1);
  for (int v = 0; v < vertex_capacity(); ++v)
    if (v_alive_[v]) remap[v] = out.add_vertex(positions_[v]);
  for (int t = 0; t < triangle_capacity(); ++t)
    if (t_alive_[t])
      out.add_triangle(remap[tris_[t][0]], remap[tris_[t][1]],
                       remap[tris_[t][2]]);
  if (old_to_new_vertex) *old_to_new_vertex = std::move(remap);
  return out;
}

MeshClassification classify(const TriMesh& mesh) {
  MeshClassification out;
  std::vector<char> on_boundary(mesh.vertex_capacity(), 0);
  for (const VertexPair& e : mesh.edges()) {
    const auto* inc = mesh.edge_triangles(e);
    if (inc->size() == 1) {
      out.boundary_edges.push_back(e);
      on_boundary[e.a] = 1;
      on_boundary[e.b] = 1;
    } else {
      out.interior_edges.push_back(e);
    }
  }
  for (int v = 0; v < mesh.vertex_capacity(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    (on_boundary[v] ? out.boundary_vertices : out.interior_vertices)
        .push_back(v);
  }
  return out;
}

StarLink star_link(const TriMesh& mesh, int vertex) {
  if (!mesh.vertex_alive(vertex)) throw MeshError("star_link: no such vertex");
  const auto& tris = mesh.triangles_at(vertex);
  if (tris.empty())
    throw MeshError("star_link: isolated vertex (non-manifold input)");

  // Directed link edge per star triangle, oriented by the triangle itself.
  std::map<int, std::pair<int, int>> next;  // head -> (tail, triangle)
  for (int t : tris) {
    const auto& tri = mesh.triangle(t);
    int i = 0;
    while (tri[i] != vertex) ++i;
    const int head = tri[(i + 1) % 3];
    const int tail = tri[(i + 2) % 3];
    if (!next.emplace(head, std::make_pair(tail, t)).second)
      throw MeshError("star_link: branching fan (non-manifold vertex)");
  }

  // A chain start is a head that never occurs as a tail; closed fans have
  // none and may start anywhere.
  StarLink out;
  int start = -1;
  for (const auto& [head, tail_tri] : next) {
    bool is_tail = false;
    for (const auto& [h2, tt2] : next)
      if (tt2.first == head) {
        is_tail = true;
        break;
      }
    if (!is_tail) {
      if (start != -1)
        throw MeshError("star_link: multiple chains (non-manifold vertex)");
      start = head;
    }
  }
  out.closed = (start == -1);
  int cur = out.closed ? next.begin()->first : start;
  out.link.push_back(cur);
  for (std::size_t step = 0; step < next.size(); ++step) {
    auto it = next.find(cur);
    if (it == next.end())
      throw MeshError("star_link: broken fan (non-manifold vertex)");
    out.star.push_back(it->second.second);
    cur = it->second.first;
    if (!(out.closed && step + 1 == next.size())) out.link.push_back(cur);
  }
  if (out.star.size() != tris.size())
    throw MeshError("star_link: disconnected fan (non-manifold vertex)");
  return out;
}

QualityReport check_regularity(const TriMesh& mesh,
                               const RegularityParams& params) {
  QualityReport report;
  for (const VertexPair& e : mesh.edges()) {
    const double len = mesh.edge_length(e);
    report.min_edge = std::min(report.min_edge, len);
    report.max_edge = std::max(report.max_edge, len);
    if (len > params.h_max) report.long_edges.push_back(e);
    if (len < params.min_edge()) report.tiny_edges.push_back(e);
  }
  for (int t = 0; t < mesh.triangle_capacity(); ++t) {
    if (!mesh.triangle_alive(t)) continue;
    const double ang = mesh.min_triangle_angle(t);
    report.min_angle = std::min(report.min_angle, ang);
    if (ang < params.theta) report.small_angle_triangles.push_back(t);
  }
  return report;
}

Patch bfs_expand(const TriMesh& mesh, std::span<const int> seed_vertices) {
  Patch patch;
  for (int v : seed_vertices) {
    if (!mesh.vertex_alive(v)) throw MeshError("bfs_expand: bad seed vertex");
    for (int t : mesh.triangles_at(v)) patch.triangles.push_back(t);
  }
  std::sort(patch.triangles.begin(), patch.triangles.end());
  patch.triangles.erase(
      std::unique(patch.triangles.begin(), patch.triangles.end()),
      patch.triangles.end());
  for (int t : patch.triangles)
    for (int v : mesh.triangle(t)) patch.vertices.push_back(v);
  std::sort(patch.vertices.begin(), patch.vertices.end());
  patch.vertices.erase(
      std::unique(patch.vertices.begin(), patch.vertices.end()),
      patch.vertices.end());
  return patch;
}

std::vector<MeshViolation> validate(const TriMesh& mesh) {
  std::vector<MeshViolation> out;

  for (const VertexPair& e : mesh.edges()) {
    const auto& inc = *mesh.edge_triangles(e);
    if (inc.size() > 2) {
      out.push_back({MeshViolation::Kind::NonManifoldEdge, e, inc[0], inc[1]});
      continue;
    }
    if (inc.size() == 2) {
      const bool fwd0 = mesh.triangle_has_directed_edge(inc[0], e.a, e.b);
      const bool fwd1 = mesh.triangle_has_directed_edge(inc[1], e.a, e.b);
      if (fwd0 == fwd1)
        out.push_back(
            {MeshViolation::Kind::InconsistentOrientation, e, inc[0], inc[1]});
    }
  }

  std::unordered_map<std::uint64_t, std::vector<int>> by_corner_set;
  for (int t = 0; t < mesh.triangle_capacity(); ++t) {
    if (!mesh.triangle_alive(t)) continue;
    auto tri = mesh.triangle(t);
    std::sort(tri.begin(), tri.end());
    const std::uint64_t key =
        (static_cast<std::uint64_t>(tri[0]) << 42) ^
        (static_cast<std::uint64_t>(tri[1]) << 21) ^
        static_cast<std::uint64_t>(tri[2]);
    by_corner_set[key].push_back(t);
  }
  std::vector<std::vector<int>> dup_groups;
  for (auto& [key, group] : by_corner_set)
    if (group.size() > 1) dup_groups.push_back(group);
  std::sort(dup_groups.begin(), dup_groups.end());
  for (const auto& group : dup_groups) {
    // Hash groups may merge distinct corner sets; confirm pairwise.
    for (std::size_t i = 0; i + 1 < group.size(); ++i) {
      auto ta = mesh.triangle(group[i]);
      auto tb = mesh.triangle(group[i + 1]);
      std::sort(ta.begin(), ta.end());
      std::sort(tb.begin(), tb.end());
      if (ta == tb)
        out.push_back({MeshViolation::Kind::DuplicateTriangle,
                       VertexPair(ta[0], ta[1]), group[i], group[i + 1]});
    }
  }
  return out;
}

TriMesh extract_submesh(const TriMesh& mesh, std::span<const int> triangles,
                        std::vector<int>* to_parent_vertex) {
  TriMesh out;
  std::vector<int> parent_of;
  std::unordered_map<int, int> local;
  auto local_id = [&](int v) {
    auto it = local.find(v);
    if (it != local.end()) return it->second;
    const int id = out.add_vertex(mesh.position(v));
    local.emplace(v, id);
    parent_of.push_back(v);
    return id;
  };
  std::vector<int> sorted(triangles.begin(), triangles.end());
  std::sort(sorted.begin(), sorted.end());
  for (int t : sorted) {
    const auto& tri = mesh.triangle(t);
    out.add_triangle(local_id(tri[0]), local_id(tri[1]), local_id(tri[2]));
  }
  if (to_parent_vertex) *to_parent_vertex = std::move(parent_of);
  return out;
}

}  // namespace mars
