#include "curvedq/discretization.hpp"
#include "curvedq/em_fields.hpp"
#include "curvedq/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace curvedq;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(EmFields, CurlOfEveryGaugeIsTheField) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 2.0);
  const Vec3 B(0.3, -1.2, 0.7);
  for (auto gauge : {GaugeKind::symmetric, GaugeKind::landau_x, GaugeKind::landau_y,
                     GaugeKind::landau_z}) {
    const auto cp = uniform_field_potential(B, gauge);
    ASSERT_TRUE(cp.b_label.has_value());
    for (int i = 0; i < 100; ++i) {
      const Vec3 x(n(rng), n(rng), n(rng));
      EXPECT_LE((numerical_curl(cp, x) - *cp.b_label).norm(), 1e-6 * B.norm())
          << to_string(gauge);
    }
  }
}

TEST(EmFields, LandauGaugesZeroTheirComponent) {
  const Vec3 B(0.5, 0.2, -0.4), x(1.0, 2.0, 3.0);
  EXPECT_EQ(uniform_field_potential(B, GaugeKind::landau_x).a_fn(x)[0], 0.0);
  EXPECT_EQ(uniform_field_potential(B, GaugeKind::landau_y).a_fn(x)[1], 0.0);
  EXPECT_EQ(uniform_field_potential(B, GaugeKind::landau_z).a_fn(x)[2], 0.0);
  EXPECT_EQ(gauge_from_string("landau-y"), GaugeKind::landau_y);
  EXPECT_THROW(gauge_from_string("coulomb"), ConfigError);
}

TEST(EmFields, SuperpositionAndElectricField) {
  const auto a = uniform_field_potential(Vec3(0, 0, 1), GaugeKind::symmetric);
  const auto b = uniform_field_potential(Vec3(1, 0, 0), GaugeKind::landau_y);
  const auto sum = with_uniform_electric_field(a + b, Vec3(0.0, 2.0, 0.0));
  EXPECT_LE((*sum.b_label - Vec3(1, 0, 1)).norm(), 1e-15);
  EXPECT_LE((numerical_curl(sum, Vec3(0.3, 0.1, -2.0)) - Vec3(1, 0, 1)).norm(), 1e-8);
  EXPECT_NEAR(sum.v_fn(Vec3(1.0, 3.0, 5.0)), -6.0, 1e-14);
}

TEST(EmFields, PullbackComponents) {
  // Symmetric gauge of B z on a sphere: A_phi = B r^2 sin^2(theta) / 2, A_theta = A_3 = 0.
  const double r = 1.4, B = 0.8, th = 1.1;
  const auto cp = uniform_field_potential(Vec3(0, 0, B), GaugeKind::symmetric);
  const Vec3 a = pullback_potential(charts::sphere(r), cp, {th, 0.4}, 0.0);
  EXPECT_NEAR(a[0], 0.0, 1e-14);
  EXPECT_NEAR(a[1], 0.5 * B * r * r * std::sin(th) * std::sin(th), 1e-14);
  EXPECT_NEAR(a[2], 0.0, 1e-14);
}

TEST(EmFields, NormalGaugeFunctionOracle) {
  // For linear A, A_3(q, z) = A(r) . n + z (A(n) - A(0)) . n exactly.
  const auto cp = uniform_field_potential(Vec3(0.4, -0.9, 0.6), GaugeKind::landau_x);
  const SurfaceChart t = charts::torus(2.0, 0.7);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int i = 0; i < 20; ++i) {
    const Coord2 q{u(rng), u(rng)};
    const double q3 = 0.2 * (u(rng) / kPi - 1.0);
    const auto gp = metric_at(t, q);
    const Vec3 n = gp.normal;
    const double c0 = cp.a_fn(t.point(q)).dot(n);
    const double c1 = (cp.a_fn(n) - cp.a_fn(Vec3::Zero())).dot(n);
    const double expect = -(q3 * c0 + 0.5 * q3 * q3 * c1);
    EXPECT_NEAR(normal_gauge_function(t, cp, q, q3), expect, 1e-10);
    EXPECT_EQ(normal_gauge_function(t, cp, q, 0.0), 0.0);
  }
}

TEST(EmFields, NormalGaugeRemovesNormalComponent) {
  const auto cp = uniform_field_potential(Vec3(0.4, -0.9, 0.6), GaugeKind::landau_z);
  const SurfaceChart t = charts::torus(2.0, 0.7);
  for (double q3 : {-0.1, 0.0, 0.05, 0.2}) {
    const Vec3 a = normal_gauge_potential_at(t, cp, {0.7, 2.9}, q3);
    EXPECT_EQ(a[2], 0.0);
  }
  const Vec3 fixed = normal_gauge_potential_at(t, cp, {0.7, 2.9}, 0.0);
  const Vec3 raw = pullback_potential(t, cp, {0.7, 2.9}, 0.0);
  EXPECT_NEAR(fixed[0], raw[0], 1e-12);
  EXPECT_NEAR(fixed[1], raw[1], 1e-12);

  const Grid grid = build_grid(t, 8, 8);
  const SurfacePotential sp = normal_gauge_fix(t, cp, grid);
  double a3 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 p = pullback_potential(t, cp, grid.coord2(i), 0.0);
    EXPECT_NEAR(sp.a1[i], p[0], 1e-12);
    EXPECT_NEAR(sp.a2[i], p[1], 1e-12);
    a3 = std::max(a3, std::abs(sp.a3_residual[i]));
  }
  EXPECT_GT(a3, 0.1);
  EXPECT_EQ(sp.gauge_tag.find(":identity"), std::string::npos);
}

TEST(EmFields, SphereSymmetricGaugeIsAlreadyNormal) {
  const auto cp = uniform_field_potential(Vec3(0, 0, 1.3), GaugeKind::symmetric);
  const SurfaceChart s = charts::sphere(1.0);
  const SurfacePotential sp = normal_gauge_fix(s, cp, build_grid(s, 8, 16));
  EXPECT_NE(sp.gauge_tag.find(":identity"), std::string::npos);
  for (double a3 : sp.a3_residual) EXPECT_LE(std::abs(a3), 1e-14);
}

TEST(EmFields, SurfaceGaugeShift) {
  const SurfaceChart t = charts::torus(2.0, 1.0);
  const Grid grid = build_grid(t, 16, 16);
  const SurfacePotential sp = normal_gauge_fix(
      t, uniform_field_potential(Vec3(0, 0, 0.5), GaugeKind::symmetric), grid);
  const ScalarField gamma = [](Coord2 q) { return std::cos(q.q2) + 0.5 * std::sin(2 * q.q1); };
  const SurfacePotential moved = apply_surface_gauge(sp, gamma);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Coord2 q = grid.coord2(i);
    EXPECT_NEAR(moved.a1[i] - sp.a1[i], std::cos(2 * q.q1), 1e-8);
    EXPECT_NEAR(moved.a2[i] - sp.a2[i], -std::sin(q.q2), 1e-8);
    EXPECT_EQ(moved.v[i], sp.v[i]);
  }
  EXPECT_THROW(apply_surface_gauge(sp, [](Coord2 q) { return q.q2; }), PeriodicityViolation);
}

TEST(EmFields, PairedPhaseKeepsDensity) {
  const SurfaceChart s = charts::sphere(1.0);
  const Grid grid = build_grid(s, 8, 16);
  WaveFunction psi{grid, VectorC::Random(static_cast<Eigen::Index>(grid.size()))};
  const auto moved =
      apply_gauge_phase(psi, [](Coord2 q) { return 3.0 * q.q1 * std::cos(q.q2); }, {1, -2, 1});
  for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
    EXPECT_NEAR(std::norm(moved.values[i]), std::norm(psi.values[i]), 1e-12);
  }
}
