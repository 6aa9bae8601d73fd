#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mars/local_projection.hpp"
#include "mars/obj_io.hpp"
#include "mars/plane_fit.hpp"
#include "mars/relocation.hpp"
#include "test_support.hpp"

using namespace mars;
namespace mt = mars::testing;

namespace {

// 3-triangle strip with exactly two interior edges, (1,2) and (2,3).
TriMesh two_interior_edge_strip() {
  TriMesh m;
  m.add_vertex({0, -1, 0});
  m.add_vertex({0, 0, 0});
  m.add_vertex({1, 0, 0});   // |12| = 1
  m.add_vertex({1, 3, 0});   // |23| = 3
  m.add_vertex({3, 2, 0});
  m.add_triangle(0, 1, 2);
  m.add_triangle(1, 3, 2);
  m.add_triangle(3, 4, 2);
  return m;
}

// Cramer solve of the 3x3 normal equations; the plane-fit oracle.
Eigen::Vector3d normal_equations_fit(const std::vector<Vec3>& pts,
                                     int dropped, int u, int v) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atz = Eigen::Vector3d::Zero();
  for (const Vec3& p : pts) {
    const Eigen::Vector3d row(p[u], p[v], 1.0);
    ata += row * row.transpose();
    atz += row * p[dropped];
  }
  return ata.inverse() * atz;
}

}  // namespace

TEST_CASE("resting_length: uniform interior edges give that length") {
  const TriMesh m = mt::fan(6, 1.0);  // interior edges are the six spokes
  const auto r = resting_length(m);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("resting_length: mean of interior edge lengths") {
  const TriMesh m = two_interior_edge_strip();
  const auto r = resting_length(m);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("resting_length: matches a classification-based recount") {
  const TriMesh m = generate_sphere({0.2, 0.3, 0.4}, 0.25, 0.12);
  double sum = 0.0;
  std::size_t count = 0;
  for (const VertexPair& e : classify(m).interior_edges) {
    sum += m.edge_length(e);
    ++count;
  }
  REQUIRE(count > 0);
  CHECK(*resting_length(m) == doctest::Approx(sum / count).epsilon(1e-14));
}

TEST_CASE("resting_length: no interior edges is an error") {
  CHECK(!resting_length(mt::single_triangle()).has_value());
}

TEST_CASE("spring_force: rest length gives zero force") {
  const Vec3 f = spring_force({0, 0, 0}, {1, 0, 0}, 1.0);
  CHECK(f.norm() == 0.0);
}

TEST_CASE("spring_force: attractive beyond the rest length") {
  const Vec3 f = spring_force({0, 0, 0}, {2, 0, 0}, 1.0);
  CHECK((f - Vec3(1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("spring_force: repulsive below the rest length") {
  const Vec3 f = spring_force({0, 0, 0}, {0.5, 0, 0}, 1.0);
  CHECK((f - Vec3(-0.5, 0, 0)).norm() < 1e-15);
}

TEST_CASE("spring_force: coincident endpoints are an error") {
  CHECK_THROWS_AS(spring_force({1, 1, 1}, {1, 1, 1}, 1.0), MeshError);
}

TEST_CASE("total_energy: zero at uniform rest length, gradient vanishes") {
  TriMesh m = mt::fan(6, 1.0);
  SpringSystem sys = make_spring_system(m);
  CHECK(total_energy(m, sys) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(energy_gradient(m, sys).norm() < 1e-12);
}

TEST_CASE("total_energy: symmetric stretch gives delta squared") {
  TriMesh m = two_interior_edge_strip();
  // Interior edges have lengths 1 and 3, rest length 2: U = 1/2(1 + 1) = 1,
  // i.e. delta^2 with delta = 1.
  const SpringSystem sys = make_spring_system(m);
  CHECK(total_energy(m, sys) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("energy_gradient matches central finite differences") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    TriMesh m = mt::grid_patch(4, 4, 0.1);
    for (int v = 0; v < m.vertex_capacity(); ++v) {
      const Vec3 jitter(rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02),
                        rng.uniform(-0.02, 0.02));
      m.set_position(v, m.position(v) + jitter);
    }
    const SpringSystem sys = make_spring_system(m);
    REQUIRE(!sys.free_vertices.empty());
    const Eigen::VectorXd grad = energy_gradient(m, sys);
    auto energy = [&] { return total_energy(m, sys); };
    for (std::size_t i = 0; i < sys.free_vertices.size(); ++i) {
      const Vec3 fd = mt::fd_gradient(m, sys.free_vertices[i], energy, 1e-6);
      const Vec3 an = grad.segment<3>(3 * static_cast<Eigen::Index>(i));
      CHECK((fd - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
    }
  }
}

TEST_CASE("fit_plane: exact plane z = 2x + 3y + 1 with smallest z span") {
  // Points spread along the direction that keeps 2x + 3y constant, so the
  // z span stays far below the x and y spans.
  std::vector<Vec3> pts;
  const Vec2 along(3.0, -2.0);
  const Vec2 across(2.0, 3.0);
  const double t_values[] = {-0.5, -0.25, 0.0, 0.25, 0.5};
  const double s_values[] = {-0.01, 0.0, 0.01};
  for (double t : t_values)
    for (double s : s_values) {
      const Vec2 xy = t * along + s * across;
      pts.emplace_back(xy.x(), xy.y(), 2.0 * xy.x() + 3.0 * xy.y() + 1.0);
    }
  const auto plane = fit_plane(pts);
  REQUIRE(plane.has_value());
  CHECK(plane->dropped_axis == 2);
  CHECK(plane->a == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(plane->b == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(plane->c == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fit_plane: identical x coordinates give the plane x = C") {
  std::vector<Vec3> pts;
  Rng rng(3);
  for (int i = 0; i < 12; ++i)
    pts.emplace_back(0.7, rng.uniform(), rng.uniform());
  const auto plane = fit_plane(pts);
  REQUIRE(plane.has_value());
  CHECK(plane->dropped_axis == 0);
  CHECK(std::abs(plane->a) < 1e-12);
  CHECK(std::abs(plane->b) < 1e-12);
  CHECK(plane->c == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("fit_plane: noisy samples match the normal-equations oracle") {
  std::vector<Vec3> pts;
  Rng rng(17);
  for (int i = 0; i < 30; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    pts.emplace_back(x, y,
                     0.3 * x - 0.2 * y + 0.05 + rng.uniform(-1e-3, 1e-3));
  }
  const auto plane = fit_plane(pts);
  REQUIRE(plane.has_value());
  REQUIRE(plane->dropped_axis == 2);
  const Eigen::Vector3d oracle = normal_equations_fit(pts, 2, 0, 1);
  CHECK(plane->a == doctest::Approx(oracle(0)).epsilon(1e-10));
  CHECK(plane->b == doctest::Approx(oracle(1)).epsilon(1e-10));
  CHECK(plane->c == doctest::Approx(oracle(2)).epsilon(1e-10));
}

TEST_CASE("fit_plane: collinear points are rank deficient") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 6; ++i)
    pts.emplace_back(0.1 * i, 0.2 * i, -0.05 * i);
  CHECK(!fit_plane(pts).has_value());
}

TEST_CASE("local_projection: points of the star project to themselves") {
  const TriMesh m = generate_sphere({0, 0, 0}, 1.0, 0.5);
  const auto proj = LocalProjector::build(m, 0);
  REQUIRE(proj.has_value());
  // A point on a star triangle (random barycentric combination).
  const int t = m.triangles_at(0)[2];
  const auto p = m.triangle_points(t);
  const Vec3 q = 0.2 * p[0] + 0.5 * p[1] + 0.3 * p[2];
  const auto image = proj->project(q);
  REQUIRE(image.has_value());
  CHECK((*image - q).norm() < 1e-12);
  const auto twice = proj->project(*image);
  REQUIRE(twice.has_value());
  CHECK((*twice - *image).norm() < 1e-12);
}

TEST_CASE("local_projection: planar fan maps in-plane points to themselves") {
  const TriMesh m = mt::fan(6, 1.0);
  const auto proj = LocalProjector::build(m, 0);
  REQUIRE(proj.has_value());
  const Vec3 q(0.3, 0.2, 0.0);
  const auto image = proj->project(q);
  REQUIRE(image.has_value());
  CHECK((*image - q).norm() < 1e-14);
}

TEST_CASE("local_projection: point above a star-triangle centroid") {
  const TriMesh m = mt::fan(6, 1.0);
  const auto proj = LocalProjector::build(m, 0);
  REQUIRE(proj.has_value());
  const auto p = m.triangle_points(0);
  const Vec3 centroid = (p[0] + p[1] + p[2]) / 3.0;
  const auto image = proj->project(centroid + Vec3(0, 0, 0.7));
  REQUIRE(image.has_value());
  CHECK((*image - centroid).norm() < 1e-13);
}

TEST_CASE("local_projection: far points are outside the neighborhood") {
  const TriMesh m = mt::fan(6, 1.0);
  const auto proj = LocalProjector::build(m, 0);
  REQUIRE(proj.has_value());
  CHECK(!proj->project(Vec3(5, 5, 0)).has_value());
}

TEST_CASE("orthogonal projection preserves barycentric coordinates") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 a(rng.uniform(), rng.uniform(), rng.uniform());
    const Vec3 b = a + Vec3(rng.uniform(0.2, 1.0), rng.uniform(-0.2, 0.2),
                            rng.uniform(-0.2, 0.2));
    const Vec3 c = a + Vec3(rng.uniform(-0.2, 0.2), rng.uniform(0.2, 1.0),
                            rng.uniform(-0.2, 0.2));
    double wa = rng.uniform(0.05, 0.9);
    double wb = rng.uniform(0.0, 1.0 - wa);
    const double wc = 1.0 - wa - wb;
    const Vec3 q = wa * a + wb * b + wc * c;

    const std::array<Vec3, 4> cloud = {a, b, c, q};
    const auto plane = fit_plane(std::span<const Vec3>(cloud.data(), 3));
    REQUIRE(plane.has_value());
    const PlaneFrame frame = make_plane_frame(*plane, a);
    const auto w = barycentric_2d(frame.to_plane(q), frame.to_plane(a),
                                  frame.to_plane(b), frame.to_plane(c));
    CHECK(w[0] == doctest::Approx(wa).epsilon(1e-9));
    CHECK(w[1] == doctest::Approx(wb).epsilon(1e-9));
    CHECK(w[2] == doctest::Approx(wc).epsilon(1e-9));
  }
}

TEST_CASE("vrem_relax: initial step length follows the link-distance rule") {
  // Regular hexagon ring of circumradius 1/sqrt(3) (apothem 1/2) with one
  // ring vertex pulled outward so the net force on the center is exactly 1.
  const double r = 1.0 / std::sqrt(3.0);
  TriMesh m = mt::fan(6, r);
  m.set_position(1, Vec3(r + 1.0, 0.0, 0.0));

  SpringSystem sys = make_spring_system(m);
  REQUIRE(sys.free_vertices == std::vector<int>{0});
  sys.resting_length = r;  // zero force on every spoke except the long one

  VremOptions options;
  options.max_iterations = 1;
  const auto states = vrem_relax(m, sys, options);
  REQUIRE(!states.empty());
  CHECK(states[0].alpha0 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(states[0].grad_norm == doctest::Approx(1.0).epsilon(1e-12));
  // The full step already satisfies the sufficient-decrease test here.
  CHECK(states[0].backtracks == 0);
  CHECK(states[0].alpha == states[0].alpha0);
  CHECK(states[0].accepted);
}

TEST_CASE("vrem_relax: single free vertex reaches the energy minimizer") {
  TriMesh m;
  m.add_vertex({0.4, 0.25, 0.0});  // free center, off the minimizer
  const double radii[] = {1.0, 1.3, 0.8, 1.1, 0.9};
  const double angles_deg[] = {0, 80, 150, 220, 290};
  for (int i = 0; i < 5; ++i) {
    const double a = angles_deg[i] * kPi / 180.0;
    m.add_vertex({radii[i] * std::cos(a), radii[i] * std::sin(a), 0.0});
  }
  for (int i = 0; i < 5; ++i)
    m.add_triangle(0, 1 + i, 1 + (i + 1) % 5);

  const SpringSystem sys = make_spring_system(m);
  REQUIRE(sys.free_vertices == std::vector<int>{0});

  // Independent oracle: refined grid search over the fan plane.
  auto energy_at = [&](const Vec2& x) {
    double u = 0.0;
    for (const VertexPair& e : sys.edges) {
      const int ring = e.other(0);
      const Vec3 p = m.position(ring);
      const double len = (Vec2(p.x(), p.y()) - x).norm();
      u += 0.5 * (len - sys.resting_length) * (len - sys.resting_length);
    }
    return u;
  };
  Vec2 best(0, 0);
  double step = 0.05;
  for (int round = 0; round < 6; ++round) {
    Vec2 improved = best;
    double lowest = energy_at(best);
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j) {
        const Vec2 x = best + step * Vec2(i, j);
        const double u = energy_at(x);
        if (u < lowest) {
          lowest = u;
          improved = x;
        }
      }
    best = improved;
    step /= 8.0;
  }

  VremOptions options;
  options.max_iterations = 300;
  const auto states = vrem_relax(m, sys, options);
  REQUIRE(!states.empty());
  for (std::size_t i = 0; i + 1 < states.size(); ++i)
    if (states[i].accepted)
      CHECK(states[i].energy_after <= states[i].energy_before + 1e-15);
  const Vec3 final = m.position(0);
  CHECK((Vec2(final.x(), final.y()) - best).norm() < 1e-5);
  CHECK(std::abs(final.z()) < 1e-12);
}

TEST_CASE("vrem_relax: offsets stay within two fifths of the link distance") {
  TriMesh m = mt::grid_patch(5, 5, 0.2);
  Rng rng(31);
  for (int v = 0; v < m.vertex_capacity(); ++v)
    m.set_position(v, m.position(v) + Vec3(rng.uniform(-0.04, 0.04),
                                           rng.uniform(-0.04, 0.04), 0.0));
  const SpringSystem sys = make_spring_system(m);
  VremOptions options;
  options.max_iterations = 50;
  const auto states = vrem_relax(m, sys, options);
  REQUIRE(!states.empty());
  for (const auto& s : states)
    if (s.accepted) CHECK(s.max_offset_ratio <= 0.4 + 1e-12);

  // No two patch vertices may coincide afterwards.
  for (int a = 0; a < m.vertex_capacity(); ++a)
    for (int b = a + 1; b < m.vertex_capacity(); ++b)
      CHECK((m.position(a) - m.position(b)).norm() > 1e-9);
}

TEST_CASE("vrem_relax: gradient vanishes on a planar patch") {
  TriMesh m = mt::grid_patch(6, 6, 0.2);
  Rng rng(41);
  for (int v = 0; v < m.vertex_capacity(); ++v)
    m.set_position(v, m.position(v) + Vec3(rng.uniform(-0.05, 0.05),
                                           rng.uniform(-0.05, 0.05), 0.0));
  const SpringSystem sys = make_spring_system(m);
  VremOptions options;
  options.max_iterations = 500;
  const auto states = vrem_relax(m, sys, options);
  REQUIRE(states.size() > 2);
  const double initial = states.front().grad_norm;
  double lowest = initial;
  for (const auto& s : states) lowest = std::min(lowest, s.grad_norm);
  CHECK(lowest <= 1e-8 * initial);
}

TEST_CASE("vrem_run: fixes a distorted fan and leaves its boundary alone") {
  const double h_max = 1.6;
  TriMesh m = mt::fan(6, 1.0);
  m.set_position(0, Vec3(0.8, 0.1, 0.0));  // heavily skewed center

  const RegularityParams params{0.1, h_max, kPi / 10};
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
  REQUIRE(worst < kPi / 10);

  std::vector<Vec3> ring_before;
  for (int v = 1; v <= 6; ++v) ring_before.push_back(m.position(v));
  std::vector<std::array<int, 3>> tris_before;
  for (int t : m.triangle_ids()) tris_before.push_back(m.triangle(t));

  const VremRunResult result =
      vrem_run(m, params, seed_tri, CascadeLimits{4, 10, 3},
               LineSearchParams{});
  REQUIRE(result.success);
  CHECK(check_regularity(m, params).regular());

  // Boundary untouched, topology bit-identical.
  for (int v = 1; v <= 6; ++v)
    CHECK(m.position(v) == ring_before[static_cast<std::size_t>(v - 1)]);
  std::vector<std::array<int, 3>> tris_after;
  for (int t : m.triangle_ids()) tris_after.push_back(m.triangle(t));
  CHECK(tris_after == tris_before);

  // Accepted iterations never increased the energy.
  for (const auto& s : result.states)
    if (s.accepted) CHECK(s.energy_after <= s.energy_before + 1e-15);
}

TEST_CASE("vrem_run: failure restores the input mesh") {
  // No fan over this pinned ring reaches a minimum angle above pi/3, so a
  // theta beyond that must fail and roll the center back.
  TriMesh m = mt::fan(6, 1.0);
  m.set_position(0, Vec3(0.8, 0.1, 0.0));
  const Vec3 before = m.position(0);
  const RegularityParams params{0.1, 1.05, 1.1};
  const VremRunResult result =
      vrem_run(m, params, 0, CascadeLimits{2, 5, 3}, LineSearchParams{});
  CHECK(!result.success);
  CHECK(m.position(0) == before);
}
