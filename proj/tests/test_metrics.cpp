#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mars/metrics.hpp"
#include "mars/obj_io.hpp"
#include "test_support.hpp"

using namespace mars;
namespace mt = mars::testing;

TEST_CASE("radial_error: markers exactly on the sphere") {
  const Vec3 c(0.5, 0.75, 0.25);
  const TriMesh m = generate_sphere(c, 0.15, 0.05);
  const ErrorRecord rec = radial_error(m, c, 0.15);
  CHECK(rec.e1 < 1e-13);
  CHECK(rec.markers == m.vertex_count());
}

TEST_CASE("radial_error: symmetric deviations average out to a") {
  TriMesh m;
  m.add_vertex({0.17, 0, 0});  // R + a with R = 0.15, a = 0.02
  m.add_vertex({0, 0.13, 0});  // R - a
  m.add_vertex({0, 0, 0.15});
  m.add_triangle(0, 1, 2);
  const ErrorRecord rec = radial_error(m, Vec3::Zero(), 0.15);
  CHECK(rec.e1 == doctest::Approx((0.02 + 0.02 + 0.0) / 3).epsilon(1e-12));
}

TEST_CASE("geometric_error: area-scaled counterpart") {
  CHECK(geometric_error(1e-3, 0.15) ==
        doctest::Approx(2.8274333882e-4).epsilon(1e-6));
}

TEST_CASE("convergence_orders: exact halving with order two") {
  const std::vector<std::pair<double, double>> data = {{0.1, 1e-2},
                                                       {0.05, 2.5e-3}};
  const auto orders = convergence_orders(data);
  REQUIRE(orders.has_value());
  REQUIRE(orders->size() == 1);
  CHECK(*(*orders)[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("convergence_orders: equal errors give order zero") {
  const std::vector<std::pair<double, double>> data = {{0.1, 1e-3},
                                                       {0.05, 1e-3}};
  const auto orders = convergence_orders(data);
  REQUIRE(orders.has_value());
  CHECK(*(*orders)[0] == doctest::Approx(0.0));
}

TEST_CASE("convergence_orders: non-halving sequence is an error") {
  const std::vector<std::pair<double, double>> data = {{0.1, 1e-2},
                                                       {0.07, 5e-3}};
  CHECK(!convergence_orders(data).has_value());
}

TEST_CASE("convergence_orders: zero fine error is reported as unset") {
  const std::vector<std::pair<double, double>> data = {{0.1, 1e-2},
                                                       {0.05, 0.0}};
  const auto orders = convergence_orders(data);
  REQUIRE(orders.has_value());
  CHECK(!(*orders)[0].has_value());
}

TEST_CASE("quality_stats: equilateral triangle") {
  TriMesh m;
  m.add_vertex({0, 0, 0});
  m.add_vertex({1, 0, 0});
  m.add_vertex({0.5, std::sqrt(3.0) / 2, 0});
  m.add_triangle(0, 1, 2);
  const QualityStats stats = quality_stats(m);
  CHECK(stats.min_angle == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK(stats.mean_angle == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK(stats.min_edge == doctest::Approx(1.0));
  CHECK(stats.max_edge == doctest::Approx(1.0));
}

TEST_CASE("quality_stats: one bad angle dominates the minimum") {
  TriMesh m;
  m.add_vertex({0, 0, 0});
  m.add_vertex({1, 0, 0});
  m.add_vertex({1 - std::cos(kPi / 12), std::sin(kPi / 12), 0});
  m.add_triangle(0, 1, 2);
  const QualityStats stats = quality_stats(m);
  CHECK(stats.min_angle == doctest::Approx(kPi / 12).epsilon(1e-9));
}

TEST_CASE("cost ledger: shares sum to one hundred") {
  CostLedger ledger;
  ledger.record(Tier::Elementary, 10, 0.1);
  ledger.record(Tier::Elementary, 4, 0.05);
  ledger.record(Tier::Relocation, 12, 0.4);
  ledger.record(Tier::Regeneration, 30, 1.0);
  const double total = ledger.event_share(Tier::Elementary) +
                       ledger.event_share(Tier::Relocation) +
                       ledger.event_share(Tier::Regeneration);
  CHECK(total == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(ledger.events(Tier::Elementary) == 2);
  CHECK(ledger.triangles(Tier::Elementary) == 14);
  CHECK(ledger.event_share(Tier::Elementary) ==
        doctest::Approx(50.0).epsilon(1e-12));
  CHECK(ledger.time_share(Tier::Regeneration) > 50.0);
}

TEST_CASE("radial_error is invariant under co-transformed rotation") {
  const Vec3 c(0.5, 0.75, 0.25);
  TriMesh m = generate_sphere(c, 0.15, 0.08);
  // Push two markers off the sphere, then rotate everything.
  m.set_position(0, c + 1.1 * (m.position(0) - c));
  m.set_position(5, c + 0.9 * (m.position(5) - c));
  const double before = radial_error(m, c, 0.15).e1;

  const Eigen::AngleAxisd rot(0.7, Vec3(1, 2, 3).normalized());
  const Vec3 shift(0.1, -0.2, 0.05);
  for (int v = 0; v < m.vertex_capacity(); ++v)
    m.set_position(v, rot * (m.position(v) - c) + c + shift);
  const double after = radial_error(m, c + shift, 0.15).e1;
  CHECK(after == doctest::Approx(before).epsilon(1e-12));
}
