#include "curvedq/errors.hpp"
#include "curvedq/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace curvedq;

namespace {

constexpr double kPi = std::numbers::pi;

// A chart without analytic derivatives, exercising the finite-difference fallback.
SurfaceChart saddle() {
  return SurfaceChart(
      "saddle", [](double u, double v) { return Vec3(u, v, 0.3 * (u * u - v * v) + 0.1 * u * v); },
      {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}}, {false, false});
}

SurfaceChart flipped(const SurfaceChart& c) {
  // Swapping the coordinates reverses the normal.
  return SurfaceChart(
      c.name() + "-flipped", [c](double u, double v) { return c.point({v, u}); },
      {c.domain(1), c.domain(0)}, {c.periodic(1), c.periodic(0)});
}

struct Sample {
  SurfaceChart chart;
  Interval a, b;
};

std::vector<Sample> zoo() {
  return {
      {charts::sphere(1.3), {0.2, kPi - 0.2}, {0.0, 2 * kPi}},
      {charts::cylinder(0.7, 5.0), {0.0, 2 * kPi}, {-2.0, 2.0}},
      {charts::torus(2.5, 1.0), {0.0, 2 * kPi}, {0.0, 2 * kPi}},
      {charts::bent_sheet(0.4, {0.0, 1.0}, {0.0, 1.0}), {0.05, 0.95}, {0.05, 0.95}},
      {saddle(), {-0.9, 0.9}, {-0.9, 0.9}},
  };
}

}  // namespace

TEST(Geometry, SphereClosedForm) {
  const double r = 1.7, th = 0.9, ph = 2.1;
  const auto gp = weingarten_at(charts::sphere(r), {th, ph});
  EXPECT_NEAR(gp.g(0, 0), r * r, 1e-12);
  EXPECT_NEAR(gp.g(1, 1), std::pow(r * std::sin(th), 2), 1e-12);
  EXPECT_NEAR(gp.g(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(gp.sqrt_g, r * r * std::sin(th), 1e-12);
  EXPECT_NEAR(gp.gauss_curv, 1.0 / (r * r), 1e-12);
  EXPECT_NEAR(std::abs(gp.mean_curv), 1.0 / r, 1e-12);
  EXPECT_NEAR(gp.v_s, 0.0, 1e-14);
  // Outward normal.
  EXPECT_NEAR(gp.normal.dot(charts::sphere(r).point({th, ph}) / r), 1.0, 1e-12);
}

TEST(Geometry, CylinderAndTorusClosedForm) {
  const double r = 0.8;
  const auto c = weingarten_at(charts::cylinder(r, 4.0), {1.1, 0.3});
  EXPECT_NEAR(c.gauss_curv, 0.0, 1e-12);
  EXPECT_NEAR(std::abs(c.mean_curv), 1.0 / (2 * r), 1e-12);
  EXPECT_NEAR(c.v_s, -1.0 / (8 * r * r), 1e-12);

  const double R = 3.0, th = 0.7;
  const double W = R + r * std::cos(th);
  const auto t = weingarten_at(charts::torus(R, r), {th, 1.9});
  EXPECT_NEAR(t.g(0, 0), r * r, 1e-12);
  EXPECT_NEAR(t.g(1, 1), W * W, 1e-12);
  EXPECT_NEAR(t.gauss_curv, std::cos(th) / (r * W), 1e-12);
  EXPECT_NEAR(t.v_s, -0.5 * std::pow(R / (2 * r * W), 2), 1e-12);
}

TEST(Geometry, ParticleParametersScaleGeometricPotential) {
  const auto gp = weingarten_at(charts::cylinder(1.0, 4.0), {0.3, 0.0}, {2.0, 1.0, 3.0});
  EXPECT_NEAR(gp.v_s, -9.0 / (2 * 2.0) * 0.25, 1e-12);
}

TEST(Geometry, MetricInverseAndPositivity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& s : zoo()) {
    for (int i = 0; i < 25; ++i) {
      const Coord2 q{s.a.min + u(rng) * s.a.span(), s.b.min + u(rng) * s.b.span()};
      const auto gp = weingarten_at(s.chart, q);
      EXPECT_LE((gp.g * gp.g_inv - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(gp.g(0, 1), gp.g(1, 0), 1e-15);
      EXPECT_GT(gp.sqrt_g, 0.0);
      EXPECT_NEAR(gp.sqrt_g * gp.sqrt_g, gp.g.determinant(), 1e-12 * gp.g.determinant());
      EXPECT_LE(gp.v_s, 0.0) << s.chart.name();
    }
  }
}

TEST(Geometry, AnalyticDerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& s : zoo()) {
    if (!s.chart.has_analytic_derivatives()) continue;
    for (int i = 0; i < 25; ++i) {
      const Coord2 q{s.a.min + u(rng) * s.a.span(), s.b.min + u(rng) * s.b.span()};
      const auto exact = s.chart.derivatives(q);
      const auto fd = s.chart.finite_difference_derivatives(q);
      const double scale = std::max(exact.d1.norm(), exact.d2.norm());
      EXPECT_LE((exact.d1 - fd.d1).norm(), 1e-6 * scale) << s.chart.name();
      EXPECT_LE((exact.d2 - fd.d2).norm(), 1e-6 * scale) << s.chart.name();
      const Mat2 g_exact = metric_at(s.chart, q).g;
      Mat2 g_fd;
      g_fd << fd.d1.dot(fd.d1), fd.d1.dot(fd.d2), fd.d2.dot(fd.d1), fd.d2.dot(fd.d2);
      EXPECT_LE((g_exact - g_fd).cwiseAbs().maxCoeff(), 1e-6 * g_exact.cwiseAbs().maxCoeff());
    }
  }
}

TEST(Geometry, NormalFlipInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& s : zoo()) {
    const SurfaceChart f = flipped(s.chart);
    for (int i = 0; i < 10; ++i) {
      const Coord2 q{s.a.min + u(rng) * s.a.span(), s.b.min + u(rng) * s.b.span()};
      const auto a = weingarten_at(s.chart, q);
      const auto b = weingarten_at(f, {q.q2, q.q1});
      const double tol = 1e-5 * std::max(1.0, a.max_abs_curvature());
      EXPECT_NEAR((a.normal + b.normal).norm(), 0.0, 1e-8);
      EXPECT_NEAR(a.mean_curv, -b.mean_curv, tol) << s.chart.name();
      EXPECT_NEAR(a.gauss_curv, b.gauss_curv, tol) << s.chart.name();
      EXPECT_NEAR(a.v_s, b.v_s, tol) << s.chart.name();
    }
  }
}

// Brioschi formula: Gaussian curvature from the metric alone.
TEST(Geometry, TheoremaEgregium) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& s : zoo()) {
    for (int i = 0; i < 8; ++i) {
      const Coord2 q{s.a.min + 0.1 * s.a.span() + 0.8 * u(rng) * s.a.span(),
                     s.b.min + 0.1 * s.b.span() + 0.8 * u(rng) * s.b.span()};
      const double h = 1e-3;
      auto g = [&](double du, double dv) { return metric_at(s.chart, {q.q1 + du, q.q2 + dv}).g; };
      auto E = [&](double du, double dv) { return g(du, dv)(0, 0); };
      auto F = [&](double du, double dv) { return g(du, dv)(0, 1); };
      auto G = [&](double du, double dv) { return g(du, dv)(1, 1); };
      const double E0 = E(0, 0), F0 = F(0, 0), G0 = G(0, 0);
      const double Eu = (E(h, 0) - E(-h, 0)) / (2 * h), Ev = (E(0, h) - E(0, -h)) / (2 * h);
      const double Fu = (F(h, 0) - F(-h, 0)) / (2 * h), Fv = (F(0, h) - F(0, -h)) / (2 * h);
      const double Gu = (G(h, 0) - G(-h, 0)) / (2 * h), Gv = (G(0, h) - G(0, -h)) / (2 * h);
      const double Evv = (E(0, h) - 2 * E0 + E(0, -h)) / (h * h);
      const double Guu = (G(h, 0) - 2 * G0 + G(-h, 0)) / (h * h);
      const double Fuv = (F(h, h) - F(h, -h) - F(-h, h) + F(-h, -h)) / (4 * h * h);
      Mat3 m1, m2;
      m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev, Fv - 0.5 * Gu, E0, F0, 0.5 * Gv,
          F0, G0;
      m2 << 0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, E0, F0, 0.5 * Gu, F0, G0;
      const double det = E0 * G0 - F0 * F0;
      const double K = (m1.determinant() - m2.determinant()) / (det * det);
      EXPECT_NEAR(K, weingarten_at(s.chart, q).gauss_curv, 1e-4) << s.chart.name();
    }
  }
}

TEST(Geometry, AdaptedMetricStructure) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& s : zoo()) {
    for (int i = 0; i < 20; ++i) {
      const Coord2 q{s.a.min + u(rng) * s.a.span(), s.b.min + u(rng) * s.b.span()};
      const auto gp = weingarten_at(s.chart, q);
      const AdaptedMetric3D at0 = adapted_metric_at(s.chart, q, 0.0);
      EXPECT_LE((at0.G.topLeftCorner<2, 2>() - gp.g).cwiseAbs().maxCoeff(),
                1e-14 * gp.g.cwiseAbs().maxCoeff());
      const double q3 = (2 * u(rng) - 1) * 0.1 / std::max(gp.max_abs_curvature(), 1e-12);
      const AdaptedMetric3D m = adapted_metric_at(s.chart, q, q3);
      EXPECT_EQ(m.G(0, 2), 0.0);
      EXPECT_EQ(m.G(2, 1), 0.0);
      EXPECT_EQ(m.G(2, 2), 1.0);
      const double f = rescale_factor(gp, q3);
      const double expect = f * f * gp.g.determinant();
      EXPECT_NEAR(m.G.determinant(), expect, 1e-10 * std::abs(expect)) << s.chart.name();
    }
  }
}

TEST(Geometry, AdaptedMetricMatchesEmbedding) {
  const SurfaceChart t = charts::torus(2.0, 0.5);
  const Coord2 q{0.4, 1.2};
  const double q3 = 0.03;
  const Mat3 G = adapted_metric_at(t, q, q3).G;
  const double h = 1e-5;
  const Vec3 d1 = (adapted_point(t, {q.q1 + h, q.q2}, q3) - adapted_point(t, {q.q1 - h, q.q2}, q3)) / (2 * h);
  const Vec3 d2 = (adapted_point(t, {q.q1, q.q2 + h}, q3) - adapted_point(t, {q.q1, q.q2 - h}, q3)) / (2 * h);
  EXPECT_NEAR(G(0, 0), d1.dot(d1), 1e-7);
  EXPECT_NEAR(G(0, 1), d1.dot(d2), 1e-7);
  EXPECT_NEAR(G(1, 1), d2.dot(d2), 1e-7);
}

TEST(Geometry, RescaleFactorBeyondFocalSurface) {
  const auto gp = weingarten_at(charts::sphere(1.0), {1.0, 1.0});
  // alpha = I/r: f = (1 + q3/r)^2
  EXPECT_NEAR(rescale_factor(gp, 0.5), 2.25, 1e-12);
  // Cylinder: f = 1 + tr(alpha) q3 changes sign at q3 = -1/tr(alpha).
  const auto gc = weingarten_at(charts::cylinder(1.0, 2.0), {0.3, 0.5});
  const double t = gc.alpha.trace();
  EXPECT_NEAR(rescale_factor(gc, 0.5 / t), 1.5, 1e-12);
  EXPECT_THROW(rescale_factor(gc, -2.0 / t), NonPositiveFactor);
}

TEST(Geometry, Errors) {
  const SurfaceChart cyl = charts::cylinder(1.0, 2.0);
  EXPECT_THROW(cyl.check_domain({0.0, 1.5}), OutOfDomain);
  EXPECT_NO_THROW(cyl.check_domain({100.0, 0.5}));
  EXPECT_THROW(metric_at(cyl, {0.0, 3.0}), OutOfDomain);

  const SurfaceChart fold(
      "fold", [](double u, double v) { return Vec3(u + v, u + v, 0.0); },
      {Interval{0, 1}, Interval{0, 1}}, {false, false});
  EXPECT_THROW(metric_at(fold, {0.5, 0.5}), DegenerateChart);

  EXPECT_THROW(SurfaceChart(
                   "open", [](double u, double v) { return Vec3(u, v, 0); },
                   {Interval{0, 1}, Interval{0, 1}}, {true, false}),
               PeriodicityViolation);
  EXPECT_THROW(charts::torus(1.0, 2.0), OutOfDomain);
}

TEST(Geometry, BentSheetIsIsometricToPlane) {
  const auto plane = charts::plane();
  const auto bent = charts::bent_sheet(0.5);
  for (double u : {0.1, 0.5, 0.9}) {
    const auto a = weingarten_at(plane, {u, 0.3});
    const auto b = weingarten_at(bent, {u, 0.3});
    EXPECT_LE((a.g - b.g).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(b.max_abs_curvature(), 2.0, 1e-9);
    EXPECT_NEAR(b.v_s, -0.5 * 1.0, 1e-9);  // -(1/2)(kappa/2)^2 with kappa = 2
  }
}
