#include "mars/regeneration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace mars {

namespace {

// Long-double predicates on coordinates normalized to O(1); cocircular and
// collinear cases fall inside the tolerance band and are handled explicitly.
constexpr double kPredicateTol = 1e-14;

long double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double abx = static_cast<long double>(b.x()) - a.x();
  const long double aby = static_cast<long double>(b.y()) - a.y();
  const long double acx = static_cast<long double>(c.x()) - a.x();
  const long double acy = static_cast<long double>(c.y()) - a.y();
  return abx * acy - aby * acx;
}

// > 0: p inside the circumcircle of counter-clockwise (a, b, c).
long double incircle(const Vec2& a, const Vec2& b, const Vec2& c,
                     const Vec2& p) {
  const long double ax = static_cast<long double>(a.x()) - p.x();
  const long double ay = static_cast<long double>(a.y()) - p.y();
  const long double bx = static_cast<long double>(b.x()) - p.x();
  const long double by = static_cast<long double>(b.y()) - p.y();
  const long double cx = static_cast<long double>(c.x()) - p.x();
  const long double cy = static_cast<long double>(c.y()) - p.y();
  const long double a2 = ax * ax + ay * ay;
  const long double b2 = bx * bx + by * by;
  const long double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
         a2 * (bx * cy - by * cx);
}

int wrap(int i, int n) { return (i % n + n) % n; }

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c,
                    const Vec2& d) {
  const auto o1 = orient2d(a, b, c);
  const auto o2 = orient2d(a, b, d);
  const auto o3 = orient2d(c, d, a);
  const auto o4 = orient2d(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

}  // namespace

double PlanarPolygon::signed_area() const {
  const int n = static_cast<int>(points.size());
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2& p = points[i];
    const Vec2& q = points[wrap(i + 1, n)];
    sum += (p.x() + q.x()) * (q.y() - p.y());
  }
  return 0.5 * sum;
}

double polygon_area(const PlanarPolygon& poly) {
  return std::abs(poly.signed_area());
}

double average_edge_length(const PlanarPolygon& poly) {
  const int n = static_cast<int>(poly.points.size());
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += (poly.points[wrap(i + 1, n)] - poly.points[i]).norm();
  return sum / n;
}

bool point_in_polygon(const PlanarPolygon& poly, const Vec2& q) {
  const int n = static_cast<int>(poly.points.size());
  bool inside = false;
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& pi = poly.points[i];
    const Vec2& pj = poly.points[j];
    if ((pi.y() > q.y()) != (pj.y() > q.y())) {
      const double x_cross =
          pj.x() + (q.y() - pj.y()) / (pi.y() - pj.y()) * (pi.x() - pj.x());
      if (q.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

double boundary_distance(const PlanarPolygon& poly, const Vec2& q) {
  const int n = static_cast<int>(poly.points.size());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.points[i];
    const Vec2& b = poly.points[wrap(i + 1, n)];
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    const double t =
        len2 > 0.0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (q - (a + t * d)).norm());
  }
  return best;
}

bool polygon_simple(const PlanarPolygon& poly) {
  const int n = static_cast<int>(poly.points.size());
  if (n < 3) return false;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || wrap(j + 1, n) == i || wrap(i + 1, n) == j) continue;
      if (segments_cross(poly.points[i], poly.points[wrap(i + 1, n)],
                         poly.points[j], poly.points[wrap(j + 1, n)]))
        return false;
    }
  }
  return true;
}

int estimate_interior_points(const PlanarPolygon& poly, double h_tri) {
  if (h_tri <= 0.0) throw MeshError("estimate_interior_points: h_tri <= 0");
  const double area = polygon_area(poly);
  const double m = static_cast<double>(poly.points.size());
  const double raw = 2.0 * area / (std::sqrt(3.0) * h_tri * h_tri) - 0.5 * m;
  const long rounded = std::lround(raw) + 1;
  return static_cast<int>(std::max(0L, rounded));
}

std::optional<std::vector<Vec2>> scatter_points(const PlanarPolygon& poly,
                                                int count, double h_tri,
                                                Rng& rng) {
  std::vector<Vec2> out;
  if (count <= 0) return out;

  Vec2 lo = poly.points[0];
  Vec2 hi = poly.points[0];
  for (const Vec2& p : poly.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double clearance = 0.1 * h_tri;

  int budget = 1000 + 500 * count;
  while (static_cast<int>(out.size()) < count && budget-- > 0) {
    const Vec2 q(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
    if (!point_in_polygon(poly, q)) continue;
    if (boundary_distance(poly, q) < clearance) continue;
    bool clear = true;
    for (const Vec2& p : out)
      if ((p - q).norm() < clearance) {
        clear = false;
        break;
      }
    if (clear) out.push_back(q);
  }
  if (static_cast<int>(out.size()) < count) return std::nullopt;
  return out;
}

namespace {

// Canonicalize cocircular ties: flip any cocircular quad whose other
// diagonal is lexicographically smaller (by point coordinates, then index).
// All triangulations of a cocircular cluster are Delaunay; this picks a
// deterministic one where tie diagonals pass through the smallest points.
void normalize_ties(std::vector<Vec2>& q, std::vector<std::array<int, 3>>& tris) {
  auto point_less = [&](int i, int j) {
    if (q[i].x() != q[j].x()) return q[i].x() < q[j].x();
    if (q[i].y() != q[j].y()) return q[i].y() < q[j].y();
    return i < j;
  };
  auto pair_less = [&](std::pair<int, int> e, std::pair<int, int> f) {
    if (point_less(e.second, e.first)) std::swap(e.first, e.second);
    if (point_less(f.second, f.first)) std::swap(f.first, f.second);
    if (e.first != f.first) return point_less(e.first, f.first);
    return point_less(e.second, f.second);
  };

  for (int sweep = 0; sweep < 64; ++sweep) {
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (std::size_t t = 0; t < tris.size(); ++t)
      for (int k = 0; k < 3; ++k) {
        const int a = tris[t][k];
        const int b = tris[t][(k + 1) % 3];
        edge_tris[{std::min(a, b), std::max(a, b)}].push_back(
            static_cast<int>(t));
      }
    bool flipped = false;
    for (const auto& [edge, owners] : edge_tris) {
      if (owners.size() != 2) continue;
      auto& ta = tris[owners[0]];
      auto& tb = tris[owners[1]];
      int c = -1, d = -1;
      for (int v : ta)
        if (v != edge.first && v != edge.second) c = v;
      for (int v : tb)
        if (v != edge.first && v != edge.second) d = v;
      if (c == d || c < 0 || d < 0) continue;
      if (std::abs(incircle(q[ta[0]], q[ta[1]], q[ta[2]], q[d])) >
          kPredicateTol)
        continue;  // not a tie
      if (!pair_less({c, d}, {edge.first, edge.second})) continue;
      // Flip within the cocircular (hence convex) quad, keeping CCW order.
      int a = edge.first;
      int b = edge.second;
      if (orient2d(q[a], q[b], q[c]) < 0.0) std::swap(a, b);
      ta = {a, d, c};
      tb = {d, b, c};
      flipped = true;
      break;  // edge map is stale; rebuild
    }
    if (!flipped) return;
  }
}

}  // namespace

std::optional<Triangulation2> delaunay_triangulate(std::span<const Vec2> pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) return std::nullopt;

  Vec2 lo = pts[0];
  Vec2 hi = pts[0];
  for (const Vec2& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-300});

  std::vector<Vec2> q(n + 3);
  for (int i = 0; i < n; ++i) q[i] = (pts[i] - lo) / scale;
  // Enclosing super-triangle, far enough that its circumcircles are huge.
  q[n] = Vec2(-40.0, -40.0);
  q[n + 1] = Vec2(90.0, -40.0);
  q[n + 2] = Vec2(-40.0, 90.0);

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (q[i] == q[j]) return std::nullopt;  // duplicate points

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (q[i].x() != q[j].x()) return q[i].x() > q[j].x();
    return q[i].y() > q[j].y();
  });

  std::vector<std::array<int, 3>> tris = {{n, n + 1, n + 2}};
  std::vector<char> dead = {0};

  for (int pi : order) {
    const Vec2& p = q[pi];
    // Cavity: triangles whose circumcircle strictly contains p; cocircular
    // points stay outside so the cavity remains star-shaped.
    std::vector<int> cavity;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (dead[t]) continue;
      if (incircle(q[tris[t][0]], q[tris[t][1]], q[tris[t][2]], p) >
          kPredicateTol)
        cavity.push_back(static_cast<int>(t));
    }
    if (cavity.empty()) return std::nullopt;

    // Boundary = cavity edges seen exactly once.
    std::map<std::pair<int, int>, int> edge_use;
    for (int t : cavity) {
      const auto& tri = tris[t];
      for (int k = 0; k < 3; ++k) {
        const int a = tri[k];
        const int b = tri[(k + 1) % 3];
        ++edge_use[{std::min(a, b), std::max(a, b)}];
      }
    }
    std::vector<std::array<int, 2>> boundary;
    for (int t : cavity) {
      const auto& tri = tris[t];
      for (int k = 0; k < 3; ++k) {
        const int a = tri[k];
        const int b = tri[(k + 1) % 3];
        if (edge_use[{std::min(a, b), std::max(a, b)}] == 1)
          boundary.push_back({a, b});
      }
      dead[t] = 1;
    }
    for (const auto& [a, b] : boundary) {
      if (orient2d(q[a], q[b], p) <= 0.0) return std::nullopt;
      tris.push_back({a, b, pi});
      dead.push_back(0);
    }
  }

  std::vector<std::array<int, 3>> keep;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (dead[t]) continue;
    if (tris[t][0] >= n || tris[t][1] >= n || tris[t][2] >= n) continue;
    keep.push_back(tris[t]);
  }
  if (keep.empty()) return std::nullopt;  // collinear input
  normalize_ties(q, keep);

  Triangulation2 out;
  out.points.assign(pts.begin(), pts.end());
  for (const auto& tri : keep) {
    // Rotate so the smallest index leads; deterministic output order.
    std::array<int, 3> rot = tri;
    while (!(rot[0] < rot[1] && rot[0] < rot[2]))
      rot = {rot[1], rot[2], rot[0]};
    out.triangles.push_back(rot);
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  return out;
}

std::optional<Triangulation2> delaunay_2d(const PlanarPolygon& poly,
                                          std::span<const Vec2> interior) {
  const int m = static_cast<int>(poly.points.size());
  std::vector<Vec2> pts(poly.points.begin(), poly.points.end());
  pts.insert(pts.end(), interior.begin(), interior.end());

  auto full = delaunay_triangulate(pts);
  if (!full) return std::nullopt;

  Triangulation2 clipped;
  clipped.points = std::move(full->points);
  for (const auto& tri : full->triangles) {
    const Vec2 centroid = (clipped.points[tri[0]] + clipped.points[tri[1]] +
                           clipped.points[tri[2]]) /
                          3.0;
    if (point_in_polygon(poly, centroid)) clipped.triangles.push_back(tri);
  }
  if (clipped.triangles.empty()) return std::nullopt;

  // The clipped boundary must be exactly the polygon cycle and no point may
  // be stranded, otherwise this candidate cannot be spliced back.
  std::map<std::pair<int, int>, int> edge_count;
  std::vector<char> used(clipped.points.size(), 0);
  for (const auto& tri : clipped.triangles) {
    for (int k = 0; k < 3; ++k) {
      used[tri[k]] = 1;
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<std::pair<int, int>> boundary_edges;
  for (const auto& [e, c] : edge_count) {
    if (c == 1) boundary_edges.push_back(e);
    if (c > 2) return std::nullopt;
  }
  std::vector<std::pair<int, int>> polygon_edges;
  for (int i = 0; i < m; ++i) {
    const int j = wrap(i + 1, m);
    polygon_edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(polygon_edges.begin(), polygon_edges.end());
  std::sort(boundary_edges.begin(), boundary_edges.end());
  if (boundary_edges != polygon_edges) return std::nullopt;
  for (char u : used)
    if (!u) return std::nullopt;
  return clipped;
}

std::optional<std::vector<int>> patch_boundary_cycle(
    const TriMesh& mesh, std::span<const int> patch_triangles) {
  std::map<int, int> next;  // directed boundary edge u -> v
  for (int t : patch_triangles) {
    const auto& tri = mesh.triangle(t);
    for (int k = 0; k < 3; ++k) {
      const int u = tri[k];
      const int v = tri[(k + 1) % 3];
      int inside = 0;
      for (int s : *mesh.edge_triangles(VertexPair(u, v)))
        if (std::binary_search(patch_triangles.begin(), patch_triangles.end(),
                               s))
          ++inside;
      if (inside == 1) {
        if (!next.emplace(u, v).second) return std::nullopt;  // pinched
      }
    }
  }
  if (next.empty()) return std::nullopt;  // closed patch, nothing to project

  std::vector<int> cycle;
  const int start = next.begin()->first;
  int cur = start;
  for (std::size_t step = 0; step < next.size(); ++step) {
    cycle.push_back(cur);
    auto it = next.find(cur);
    if (it == next.end()) return std::nullopt;
    cur = it->second;
  }
  if (cur != start || cycle.size() != next.size())
    return std::nullopt;  // more than one boundary loop

  // Off-cycle patch vertices must be fully interior so splicing them out is
  // safe.
  std::vector<int> on_cycle = cycle;
  std::sort(on_cycle.begin(), on_cycle.end());
  for (int t : patch_triangles) {
    for (int v : mesh.triangle(t)) {
      if (std::binary_search(on_cycle.begin(), on_cycle.end(), v)) continue;
      for (int s : mesh.triangles_at(v))
        if (!std::binary_search(patch_triangles.begin(),
                                patch_triangles.end(), s))
          return std::nullopt;
    }
  }
  return cycle;
}

SurfaceAnchors::SurfaceAnchors(const TriMesh& mesh,
                               std::span<const int> patch_triangles) {
  std::vector<int> vertices;
  for (int t : patch_triangles)
    for (int v : mesh.triangle(t)) vertices.push_back(v);
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()),
                 vertices.end());
  for (int v : vertices) {
    auto proj = LocalProjector::build(mesh, v, patch_triangles);
    if (proj) projectors_.push_back(std::move(*proj));
  }
}

std::optional<Vec3> SurfaceAnchors::lift(const Vec3& q) const {
  std::optional<Vec3> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& proj : projectors_) {
    const auto image = proj.project(q);
    if (!image) continue;
    const double dist = (*image - q).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = image;
    }
  }
  return best;
}

std::optional<LiftedCandidate> lift_to_surface(
    const Triangulation2& planar, const PlaneFrame& frame,
    const TriMesh& parent, std::span<const int> patch_triangles,
    std::span<const int> polygon_parent_ids, bool flip_orientation) {
  const SurfaceAnchors anchors(parent, patch_triangles);
  LiftedCandidate out;
  out.parent_vertex.reserve(planar.points.size());

  for (std::size_t i = 0; i < planar.points.size(); ++i) {
    if (i < polygon_parent_ids.size()) {
      const int pv = polygon_parent_ids[i];
      out.mesh.add_vertex(parent.position(pv));
      out.parent_vertex.push_back(pv);
    } else {
      const auto lifted = anchors.lift(frame.from_plane(planar.points[i]));
      if (!lifted) return std::nullopt;
      out.mesh.add_vertex(*lifted);
      out.parent_vertex.push_back(-1);
    }
  }
  for (const auto& tri : planar.triangles) {
    if (flip_orientation)
      out.mesh.add_triangle(tri[0], tri[2], tri[1]);
    else
      out.mesh.add_triangle(tri[0], tri[1], tri[2]);
  }
  return out;
}

namespace {

// A candidate may use a chord between two boundary-cycle vertices; if that
// edge (or an identical all-boundary triangle) already exists outside the
// patch, splicing would create a non-manifold edge or a duplicate simplex.
bool splice_safe(const TriMesh& mesh, std::span<const int> patch_triangles,
                 std::span<const int> cycle, const LiftedCandidate& cand) {
  const int m = static_cast<int>(cycle.size());
  std::set<std::pair<int, int>> cycle_edges;
  for (int i = 0; i < m; ++i) {
    const int a = cycle[i];
    const int b = cycle[(i + 1) % m];
    cycle_edges.insert({std::min(a, b), std::max(a, b)});
  }
  auto outside = [&](int t) {
    return !std::binary_search(patch_triangles.begin(), patch_triangles.end(),
                               t);
  };
  for (int t : cand.mesh.triangle_ids()) {
    const auto& tri = cand.mesh.triangle(t);
    std::array<int, 3> parent;
    for (int k = 0; k < 3; ++k) parent[k] = cand.parent_vertex[tri[k]];
    for (int k = 0; k < 3; ++k) {
      const int u = parent[k];
      const int v = parent[(k + 1) % 3];
      if (u < 0 || v < 0) continue;
      if (cycle_edges.count({std::min(u, v), std::max(u, v)})) continue;
      const auto* inc = mesh.edge_triangles(VertexPair(u, v));
      if (!inc) continue;
      for (int s : *inc)
        if (outside(s)) return false;  // chord collides with outside edge
    }
    if (parent[0] >= 0 && parent[1] >= 0 && parent[2] >= 0) {
      // All-boundary triangle: reject if the same corner set survives
      // outside the patch.
      std::array<int, 3> mine = parent;
      std::sort(mine.begin(), mine.end());
      const auto* inc = mesh.edge_triangles(VertexPair(parent[0], parent[1]));
      if (inc) {
        for (int s : *inc) {
          if (!outside(s)) continue;
          auto theirs = mesh.triangle(s);
          std::sort(theirs.begin(), theirs.end());
          if (theirs == mine) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

LtrResult ltr_run(TriMesh& mesh, const RegularityParams& params,
                  int seed_triangle, const CascadeLimits& limits,
                  const LineSearchParams& line_search, Rng& rng) {
  LtrResult result;
  if (!mesh.triangle_alive(seed_triangle))
    throw MeshError("ltr_run: seed triangle not in mesh");

  std::vector<int> seeds = {largest_angle_vertex(mesh, seed_triangle)};

  for (int round = 1; round <= limits.max_bfs_rounds; ++round) {
    result.rounds = round;
    const Patch patch = bfs_expand(mesh, seeds);
    seeds = patch.vertices;
    if (patch.triangles.empty()) break;

    const auto cycle = patch_boundary_cycle(mesh, patch.triangles);
    if (!cycle) continue;

    std::vector<Vec3> patch_points;
    patch_points.reserve(patch.vertices.size());
    for (int v : patch.vertices) patch_points.push_back(mesh.position(v));
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : patch_points) centroid += p;
    centroid /= static_cast<double>(patch_points.size());

    // Candidate projection planes: the least-squares fit of the patch
    // vertices first; if the boundary projects to a self-intersecting
    // polygon (sharply bent patches), fall back to the area-weighted
    // normal direction, then to a fit of the cycle vertices alone.
    std::vector<PlaneFrame> frames;
    if (const auto plane = fit_plane(patch_points))
      frames.push_back(make_plane_frame(*plane, centroid));
    Vec3 area_normal = Vec3::Zero();
    for (int t : patch.triangles) {
      const auto p = mesh.triangle_points(t);
      area_normal += triangle_normal(p[0], p[1], p[2]);
    }
    if (area_normal.norm() > kGeomEps)
      frames.push_back(frame_from_normal(area_normal, centroid));
    {
      std::vector<Vec3> cycle_points;
      for (int v : *cycle) cycle_points.push_back(mesh.position(v));
      if (const auto plane = fit_plane(cycle_points))
        frames.push_back(make_plane_frame(*plane, centroid));
    }

    PlanarPolygon polygon;
    PlaneFrame frame;
    bool projectable = false;
    for (const PlaneFrame& candidate_frame : frames) {
      PlanarPolygon candidate_poly;
      candidate_poly.source_vertices = *cycle;
      for (int v : *cycle)
        candidate_poly.points.push_back(
            candidate_frame.to_plane(mesh.position(v)));
      if (!polygon_simple(candidate_poly)) continue;
      if (std::abs(candidate_poly.signed_area()) <= kGeomEps) continue;
      polygon = std::move(candidate_poly);
      frame = candidate_frame;
      projectable = true;
      break;
    }
    if (!projectable) continue;
    const bool flip = polygon.signed_area() < 0.0;

    const double h_tri = average_edge_length(polygon);
    if (h_tri <= 0.0) continue;
    const int m_est = estimate_interior_points(polygon, h_tri);

    std::optional<LiftedCandidate> best;
    double best_angle = -1.0;

    for (int m_star = std::max(m_est - 2, 0); m_star <= m_est + 2; ++m_star) {
      for (int trial = 1; trial <= limits.scatter_trials; ++trial) {
        LtrTrial record;
        record.m_star = m_star;
        record.trial = trial;

        const auto scattered = scatter_points(polygon, m_star, h_tri, rng);
        if (!scattered) {
          result.trials.push_back(record);
          continue;
        }
        const auto planar = delaunay_2d(polygon, *scattered);
        if (!planar) {
          result.trials.push_back(record);
          continue;
        }
        auto candidate = lift_to_surface(*planar, frame, mesh,
                                         patch.triangles, *cycle, flip);
        if (!candidate) {
          result.trials.push_back(record);
          continue;
        }
        if (!splice_safe(mesh, patch.triangles, *cycle, *candidate)) {
          result.trials.push_back(record);
          continue;
        }
        record.candidate_built = true;

        SpringSystem system = make_spring_system(candidate->mesh);
        if (!system.free_vertices.empty() && !system.edges.empty() &&
            system.resting_length > 0.0) {
          VremOptions options;
          options.line_search = line_search;
          options.max_iterations = limits.max_relocation_iters;
          vrem_relax(candidate->mesh, system, options,
                     [&](const TriMesh& m) {
                       return check_regularity(m, params).regular();
                     });
        }

        const QualityReport report =
            check_regularity(candidate->mesh, params);
        record.regular = report.regular();
        record.min_angle = report.min_angle;
        if (record.regular && report.min_angle > best_angle) {
          best_angle = report.min_angle;
          best = std::move(candidate);
          record.kept = true;
        }
        result.trials.push_back(record);
      }
    }

    if (best) {
      // Splice: drop the patch triangles and interior vertices, then insert
      // the regenerated ones. Boundary vertices are reused as-is.
      std::vector<int> on_cycle = *cycle;
      std::sort(on_cycle.begin(), on_cycle.end());
      for (int t : patch.triangles) mesh.remove_triangle(t);
      for (int v : patch.vertices)
        if (!std::binary_search(on_cycle.begin(), on_cycle.end(), v))
          mesh.remove_vertex(v);

      std::vector<int> to_parent(best->parent_vertex.size(), -1);
      for (std::size_t i = 0; i < best->parent_vertex.size(); ++i) {
        to_parent[i] = best->parent_vertex[i] >= 0
                           ? best->parent_vertex[i]
                           : mesh.add_vertex(best->mesh.position(
                                 static_cast<int>(i)));
      }
      for (int t : best->mesh.triangle_ids()) {
        const auto& tri = best->mesh.triangle(t);
        result.new_triangles.push_back(mesh.add_triangle(
            to_parent[tri[0]], to_parent[tri[1]], to_parent[tri[2]]));
      }
      result.removed_triangles = patch.triangles;
      result.success = true;
      return result;
    }
  }
  return result;
}

}  // namespace mars
