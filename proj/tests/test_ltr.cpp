#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mars/obj_io.hpp"
#include "mars/regeneration.hpp"
#include "test_support.hpp"

using namespace mars;
namespace mt = mars::testing;

namespace {

PlanarPolygon unit_square() {
  PlanarPolygon poly;
  poly.points = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  return poly;
}

PlanarPolygon regular_polygon(int n, double circumradius) {
  PlanarPolygon poly;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n;
    poly.points.emplace_back(circumradius * std::cos(a),
                             circumradius * std::sin(a));
  }
  return poly;
}

// Planar disk with one interior vertex fanned to an n-gon ring; placing the
// hub near the ring makes sliver triangles no relocation can fix well.
TriMesh bad_fan_disk(int n, const Vec2& hub) {
  TriMesh m;
  m.add_vertex({hub.x(), hub.y(), 0.0});
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n;
    m.add_vertex({std::cos(a), std::sin(a), 0.0});
  }
  for (int i = 0; i < n; ++i)
    m.add_triangle(0, 1 + i, 1 + (i + 1) % n);
  return m;
}

double point_triangle_distance(const Vec3& q, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  // Exhaustive: distance to the plane patch plus the three edges.
  const Vec3 n = triangle_normal(a, b, c).normalized();
  const Vec3 foot = q - n.dot(q - a) * n;
  // Barycentric containment of the foot point.
  const Vec3 v0 = b - a, v1 = c - a, v2 = foot - a;
  const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  const double d20 = v2.dot(v0), d21 = v2.dot(v1);
  const double denom = d00 * d11 - d01 * d01;
  const double wb = (d11 * d20 - d01 * d21) / denom;
  const double wc = (d00 * d21 - d01 * d20) / denom;
  if (wb >= 0 && wc >= 0 && wb + wc <= 1) return std::abs(n.dot(q - a));
  double best = std::numeric_limits<double>::infinity();
  best = std::min(best, point_segment_distance(q, a, b));
  best = std::min(best, point_segment_distance(q, b, c));
  best = std::min(best, point_segment_distance(q, c, a));
  return best;
}

}  // namespace

TEST_CASE("polygon_area: unit square") {
  CHECK(polygon_area(unit_square()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("polygon_area: collinear polygon is degenerate") {
  PlanarPolygon poly;
  poly.points = {Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)};
  CHECK(polygon_area(poly) == doctest::Approx(0.0));
}

TEST_CASE("polygon_area: regular hexagon of side 1") {
  const PlanarPolygon poly = regular_polygon(6, 1.0);
  CHECK(polygon_area(poly) ==
        doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("estimate_interior_points: hexagon wants exactly its center") {
  CHECK(estimate_interior_points(regular_polygon(6, 1.0), 1.0) == 1);
}

TEST_CASE("estimate_interior_points: unit triangle wants none") {
  PlanarPolygon tri;
  tri.points = {Vec2(0, 0), Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2)};
  CHECK(estimate_interior_points(tri, 1.0) == 0);
}

TEST_CASE("estimate_interior_points: zero-area polygon wants none") {
  PlanarPolygon poly;
  poly.points = {Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)};
  CHECK(estimate_interior_points(poly, 1.0) == 0);
}

TEST_CASE("scatter_points: zero points is an empty set") {
  Rng rng(1);
  const auto pts = scatter_points(unit_square(), 0, 0.3, rng);
  REQUIRE(pts.has_value());
  CHECK(pts->empty());
}

TEST_CASE("scatter_points: clearance constraints hold") {
  Rng rng(5);
  const double h_tri = 0.3;
  const PlanarPolygon poly = unit_square();
  const auto pts = scatter_points(poly, 6, h_tri, rng);
  REQUIRE(pts.has_value());
  REQUIRE(pts->size() == 6);
  for (std::size_t i = 0; i < pts->size(); ++i) {
    CHECK(point_in_polygon(poly, (*pts)[i]));
    CHECK(boundary_distance(poly, (*pts)[i]) >= 0.1 * h_tri);
    for (std::size_t j = i + 1; j < pts->size(); ++j)
      CHECK(((*pts)[i] - (*pts)[j]).norm() >= 0.1 * h_tri);
  }
}

TEST_CASE("scatter_points: identical seed reproduces the identical set") {
  Rng a(99), b(99);
  const auto first = scatter_points(unit_square(), 5, 0.2, a);
  const auto second = scatter_points(unit_square(), 5, 0.2, b);
  REQUIRE(first.has_value());
  REQUIRE(second.has_value());
  for (std::size_t i = 0; i < first->size(); ++i) {
    CHECK((*first)[i].x() == (*second)[i].x());
    CHECK((*first)[i].y() == (*second)[i].y());
  }
}

TEST_CASE("scatter_points: impossible budget is an error") {
  Rng rng(2);
  CHECK(!scatter_points(unit_square(), 2000, 0.5, rng).has_value());
}

TEST_CASE("delaunay: triangle plus centroid gives three triangles") {
  PlanarPolygon tri;
  tri.points = {Vec2(0, 0), Vec2(1, 0), Vec2(0.5, 0.9)};
  const std::array<Vec2, 1> inner = {Vec2(0.5, 0.3)};
  const auto out = delaunay_2d(tri, inner);
  REQUIRE(out.has_value());
  CHECK(out->triangles.size() == 3);
}

TEST_CASE("delaunay: empty circumcircle against the brute-force oracle") {
  Rng rng(123);
  std::vector<Vec2> pts;
  for (int i = 0; i < 30; ++i)
    pts.emplace_back(rng.uniform(), rng.uniform());
  const auto out = delaunay_triangulate(pts);
  REQUIRE(out.has_value());
  for (const auto& tri : out->triangles) {
    const Vec2& a = pts[tri[0]];
    const Vec2& b = pts[tri[1]];
    const Vec2& c = pts[tri[2]];
    for (std::size_t p = 0; p < pts.size(); ++p) {
      if (static_cast<int>(p) == tri[0] || static_cast<int>(p) == tri[1] ||
          static_cast<int>(p) == tri[2])
        continue;
      CHECK(mt::oracle_incircle(a, b, c, pts[p]) <= 1e-9);
    }
  }
}

TEST_CASE("delaunay: cocircular square resolves to the smallest diagonal") {
  const std::array<Vec2, 4> pts = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1),
                                   Vec2(0, 1)};
  const auto out = delaunay_triangulate(pts);
  REQUIRE(out.has_value());
  REQUIRE(out->triangles.size() == 2);
  // Both diagonals satisfy the empty-circumcircle test (the four points are
  // cocircular); the tie must resolve to the diagonal through (0,0).
  CHECK(mt::oracle_incircle(pts[0], pts[1], pts[2], pts[3]) ==
        doctest::Approx(0.0));
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : out->triangles)
    for (int k = 0; k < 3; ++k)
      edges.insert({std::min(tri[k], tri[(k + 1) % 3]),
                    std::max(tri[k], tri[(k + 1) % 3])});
  CHECK(edges.count({0, 2}) == 1);
  CHECK(edges.count({1, 3}) == 0);
}

TEST_CASE("delaunay: collinear input is an error") {
  std::vector<Vec2> pts;
  for (int i = 0; i < 5; ++i) pts.emplace_back(0.25 * i, 0.5 * i);
  CHECK(!delaunay_triangulate(pts).has_value());
}

TEST_CASE("delaunay_2d: concave polygon keeps exactly its boundary") {
  PlanarPolygon poly;  // L-shape
  poly.points = {Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 1),
                 Vec2(1, 2), Vec2(0, 2)};
  const auto out = delaunay_2d(poly, {});
  REQUIRE(out.has_value());
  // Euler count for a triangulated simple polygon without interior points:
  // n - 2 triangles.
  CHECK(out->triangles.size() == poly.points.size() - 2);
}

TEST_CASE("patch_boundary_cycle: fan patch boundary is its ring") {
  const TriMesh m = mt::fan(8, 1.0);
  const auto patch = bfs_expand(m, std::vector<int>{0});
  const auto cycle = patch_boundary_cycle(m, patch.triangles);
  REQUIRE(cycle.has_value());
  CHECK(cycle->size() == 8);
  // Directed as the triangles traverse it: successive ring indices.
  for (std::size_t i = 0; i + 1 < cycle->size(); ++i)
    CHECK((*cycle)[i + 1] == 1 + ((*cycle)[i] - 1 + 1) % 8);
}

TEST_CASE("lift: planar patch lift is the identity on positions") {
  const TriMesh m = mt::fan(6, 1.0);
  const auto patch = bfs_expand(m, std::vector<int>{0});
  const SurfaceAnchors anchors(m, patch.triangles);
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    // Stay inside the fan: the hexagon only reaches its apothem towards
    // edge midpoints.
    const double r = rng.uniform(0.0, 0.85);
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 q(r * std::cos(a), r * std::sin(a), 0.0);
    const auto lifted = anchors.lift(q);
    REQUIRE(lifted.has_value());
    CHECK((*lifted - q).norm() < 1e-12);
  }
}

TEST_CASE("lift: spherical cap points land on the original surface") {
  const TriMesh m = generate_sphere({0, 0, 0}, 1.0, 0.35);
  std::vector<int> cap;
  for (int t : m.triangle_ids()) {
    const auto p = m.triangle_points(t);
    if (p[0].z() > 0.55 && p[1].z() > 0.55 && p[2].z() > 0.55)
      cap.push_back(t);
  }
  REQUIRE(cap.size() > 8);
  const SurfaceAnchors anchors(m, cap);

  Rng rng(13);
  int lifted_count = 0;
  for (int trial = 0; trial < 40; ++trial) {
    // Points slightly above the cap, to be pulled back onto it.
    const double x = rng.uniform(-0.3, 0.3);
    const double y = rng.uniform(-0.3, 0.3);
    const Vec3 q(x, y, std::sqrt(std::max(0.0, 1.0 - x * x - y * y)) + 0.02);
    const auto lifted = anchors.lift(q);
    if (!lifted) continue;
    ++lifted_count;
    // Membership oracle: the lifted point lies on some cap triangle.
    double best = std::numeric_limits<double>::infinity();
    for (int t : cap) {
      const auto p = m.triangle_points(t);
      best = std::min(best, point_triangle_distance(*lifted, p[0], p[1], p[2]));
    }
    CHECK(best < 1e-9);
  }
  CHECK(lifted_count > 20);
}

TEST_CASE("ltr_run: regenerates a pathological fan patch") {
  TriMesh m = bad_fan_disk(12, Vec2(0.9, 0.05));
  const RegularityParams params{0.1, 0.8, kPi / 10};
  REQUIRE(!check_regularity(m, params).regular());

  int seed_tri = -1;
  double worst = kPi;
  for (int t : m.triangle_ids()) {
    const double a = m.min_triangle_angle(t);
    if (a < worst) {
      worst = a;
      seed_tri = t;
    }
  }

  std::vector<Vec3> ring_before;
  for (int v = 1; v <= 12; ++v) ring_before.push_back(m.position(v));

  Rng rng(2024);
  const LtrResult result = ltr_run(m, params, seed_tri,
                                   CascadeLimits{4, 10, 3},
                                   LineSearchParams{}, rng);
  REQUIRE(result.success);
  CHECK(check_regularity(m, params).regular());
  CHECK(validate(m).empty());
  for (int v = 1; v <= 12; ++v)
    CHECK(m.position(v) == ring_before[static_cast<std::size_t>(v - 1)]);

  // The retained candidate carries the best minimum angle over all regular
  // trials of the successful round.
  double best_regular = -1.0;
  double kept_angle = -1.0;
  for (const auto& trial : result.trials) {
    if (trial.regular) best_regular = std::max(best_regular, trial.min_angle);
    if (trial.kept) kept_angle = trial.min_angle;
  }
  CHECK(kept_angle == doctest::Approx(best_regular));
}

TEST_CASE("ltr_run: identical seed gives an identical mesh") {
  auto run_once = [](std::uint64_t seed) {
    TriMesh m = bad_fan_disk(12, Vec2(0.9, 0.05));
    const RegularityParams params{0.1, 0.8, kPi / 10};
    Rng rng(seed);
    const LtrResult r = ltr_run(m, params, 0, CascadeLimits{4, 10, 3},
                                LineSearchParams{}, rng);
    REQUIRE(r.success);
    return m.compacted();
  };
  const TriMesh a = run_once(42);
  const TriMesh b = run_once(42);
  REQUIRE(a.vertex_count() == b.vertex_count());
  REQUIRE(a.triangle_count() == b.triangle_count());
  for (int v = 0; v < a.vertex_capacity(); ++v)
    CHECK(a.position(v) == b.position(v));
  for (int t = 0; t < a.triangle_capacity(); ++t)
    CHECK(a.triangle(t) == b.triangle(t));
}

TEST_CASE("ltr_run: failure leaves the mesh untouched") {
  TriMesh m = bad_fan_disk(12, Vec2(0.9, 0.05));
  // Unreachable angle bound: every candidate fails, nothing is spliced.
  const RegularityParams params{0.1, 0.8, 1.3};
  Rng rng(3);
  std::vector<Vec3> positions;
  for (int v = 0; v < m.vertex_capacity(); ++v) positions.push_back(m.position(v));
  const int f = m.triangle_count();
  const LtrResult result = ltr_run(m, params, 0, CascadeLimits{3, 5, 2},
                                   LineSearchParams{}, rng);
  CHECK(!result.success);
  CHECK(m.triangle_count() == f);
  for (int v = 0; v < m.vertex_capacity(); ++v)
    CHECK(m.position(v) == positions[v]);
}

TEST_CASE("ltr_run: splice on a sphere keeps the mesh valid and closed") {
  TriMesh m = generate_sphere({0, 0, 0}, 1.0, 0.35);
  // Distort one vertex tangentially to create sliver triangles.
  const StarLink sl = star_link(m, 0);
  const Vec3 toward = m.position(sl.link[0]);
  m.set_position(0, (0.08 * m.position(0) + 0.92 * toward).normalized());

  const RegularityParams params{0.1, 0.7, kPi / 10};
  int seed_tri = -1;
  double worst = kPi;
  for (int t : m.triangle_ids()) {
    const double a = m.min_triangle_angle(t);
    if (a < worst) {
      worst = a;
      seed_tri = t;
    }
  }
  REQUIRE(worst < kPi / 10);

  Rng rng(77);
  const int chi = m.euler_characteristic();
  const LtrResult result = ltr_run(m, params, seed_tri,
                                   CascadeLimits{4, 10, 3},
                                   LineSearchParams{}, rng);
  REQUIRE(result.success);
  CHECK(validate(m).empty());
  CHECK(m.euler_characteristic() == chi);
  CHECK(classify(m).boundary_edges.empty());
}
