#include "curvedq/geometry.hpp"

#include "curvedq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace curvedq {

namespace {

std::string describe(Coord2 q) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << q.q1 << ", " << q.q2 << ")";
  return os.str();
}

}  // namespace

SurfaceChart::SurfaceChart(std::string name, MapFn map, std::array<Interval, 2> domain,
                           std::array<bool, 2> periodic, DerivativeFn derivatives)
    : name_(std::move(name)),
      map_(std::move(map)),
      domain_(domain),
      periodic_(periodic),
      derivatives_(std::move(derivatives)) {
  for (int axis = 0; axis < 2; ++axis) {
    if (!(domain_[axis].span() > 0.0)) {
      throw OutOfDomain("chart '" + name_ + "': empty coordinate interval");
    }
    if (!periodic_[axis]) continue;
    const int other = 1 - axis;
    for (int s = 0; s < 5; ++s) {
      Coord2 lo, hi;
      lo[other] = hi[other] = domain_[other].min + (s + 0.5) * domain_[other].span() / 5.0;
      lo[axis] = domain_[axis].min;
      hi[axis] = domain_[axis].max;
      const Vec3 a = point(lo);
      const Vec3 b = point(hi);
      if ((a - b).norm() > 1e-12 * std::max(1.0, a.norm())) {
        throw PeriodicityViolation("chart '" + name_ + "': map is not periodic in q" +
                                   std::to_string(axis + 1));
      }
    }
  }
}

ChartDerivatives SurfaceChart::finite_difference_derivatives(Coord2 q) const {
  const double h1 = 1e-5 * domain_[0].span();
  const double h2 = 1e-5 * domain_[1].span();
  const auto f = [&](double a, double b) { return map_(q.q1 + a, q.q2 + b); };
  const Vec3 f0 = f(0, 0);
  const Vec3 fp1 = f(h1, 0), fm1 = f(-h1, 0);
  const Vec3 fp2 = f(0, h2), fm2 = f(0, -h2);
  ChartDerivatives d;
  d.d1 = (fp1 - fm1) / (2.0 * h1);
  d.d2 = (fp2 - fm2) / (2.0 * h2);
  d.d11 = (fp1 - 2.0 * f0 + fm1) / (h1 * h1);
  d.d22 = (fp2 - 2.0 * f0 + fm2) / (h2 * h2);
  d.d12 = (f(h1, h2) - f(h1, -h2) - f(-h1, h2) + f(-h1, -h2)) / (4.0 * h1 * h2);
  return d;
}

ChartDerivatives SurfaceChart::derivatives(Coord2 q) const {
  return derivatives_ ? derivatives_(q.q1, q.q2) : finite_difference_derivatives(q);
}

void SurfaceChart::check_domain(Coord2 q) const {
  for (int axis = 0; axis < 2; ++axis) {
    if (periodic_[axis]) continue;
    const Interval& iv = domain_[axis];
    const double slack = 1e-12 * std::max(1.0, iv.span());
    if (!(q[axis] >= iv.min - slack && q[axis] <= iv.max + slack)) {
      throw OutOfDomain("chart '" + name_ + "': point " + describe(q) + " outside q" +
                        std::to_string(axis + 1) + " range");
    }
  }
}

double GeometryPointData::max_abs_curvature() const {
  const double disc = std::sqrt(std::max(0.0, mean_curv * mean_curv - gauss_curv));
  return std::max(std::abs(mean_curv + disc), std::abs(mean_curv - disc));
}

GeometryPointData metric_at(const SurfaceChart& chart, Coord2 q) {
  chart.check_domain(q);
  const ChartDerivatives d = chart.derivatives(q);
  const Vec3 cross = d.d1.cross(d.d2);
  const double area = cross.norm();
  if (!(area >= 1e-12 * d.d1.norm() * d.d2.norm()) || area == 0.0) {
    throw DegenerateChart("chart '" + chart.name() + "' is degenerate at " + describe(q));
  }
  GeometryPointData gp;
  gp.g << d.d1.dot(d.d1), d.d1.dot(d.d2), d.d2.dot(d.d1), d.d2.dot(d.d2);
  const double det = gp.g(0, 0) * gp.g(1, 1) - gp.g(0, 1) * gp.g(1, 0);
  gp.g_inv << gp.g(1, 1) / det, -gp.g(0, 1) / det, -gp.g(1, 0) / det, gp.g(0, 0) / det;
  gp.sqrt_g = std::sqrt(det);
  gp.normal = cross / area;
  return gp;
}

GeometryPointData weingarten_at(const SurfaceChart& chart, Coord2 q,
                                const PhysicalParams& params) {
  GeometryPointData gp = metric_at(chart, q);
  const ChartDerivatives d = chart.derivatives(q);
  Mat2 h;
  h(0, 0) = gp.normal.dot(d.d11);
  h(0, 1) = h(1, 0) = gp.normal.dot(d.d12);
  h(1, 1) = gp.normal.dot(d.d22);
  gp.alpha = -h * gp.g_inv;
  gp.mean_curv = 0.5 * gp.alpha.trace();
  gp.gauss_curv = gp.alpha.determinant();
  gp.v_s = geometric_potential(gp, params.mass, params.hbar);
  return gp;
}

double geometric_potential(const GeometryPointData& gp, double mass, double hbar) {
  // M^2 - K = ((k1 - k2)/2)^2, written without the cancellation in M^2 - K.
  const double half_diff = 0.5 * (gp.alpha(0, 0) - gp.alpha(1, 1));
  const double spread = std::max(0.0, half_diff * half_diff + gp.alpha(0, 1) * gp.alpha(1, 0));
  return -(hbar * hbar / (2.0 * mass)) * spread;
}

AdaptedMetric3D adapted_metric_at(const SurfaceChart& chart, Coord2 q, double q3) {
  const GeometryPointData gp = weingarten_at(chart, q);
  const double kappa = gp.max_abs_curvature();
  if (kappa * std::abs(q3) >= 1.0) {
    std::cerr << "warning: adapted_metric_at: |q3| = " << std::abs(q3)
              << " is beyond the focal distance " << 1.0 / kappa << " at " << describe(q)
              << "\n";
  }
  const Mat2 ag = gp.alpha * gp.g;
  const Mat2 block = gp.g + (ag + ag.transpose()) * q3 + gp.alpha * gp.g * gp.alpha.transpose() * (q3 * q3);
  AdaptedMetric3D m;
  m.q3 = q3;
  m.G.setZero();
  m.G.topLeftCorner<2, 2>() = block;
  m.G(2, 2) = 1.0;
  return m;
}

double rescale_factor(const GeometryPointData& gp, double q3) {
  const double f = 1.0 + gp.alpha.trace() * q3 + gp.alpha.determinant() * q3 * q3;
  if (!(f > 0.0)) {
    throw NonPositiveFactor("rescale factor " + std::to_string(f) +
                            " is not positive; q3 lies beyond the focal surface");
  }
  return f;
}

Vec3 adapted_point(const SurfaceChart& chart, Coord2 q, double q3) {
  return chart.point(q) + q3 * metric_at(chart, q).normal;
}

namespace charts {

using std::cos;
using std::sin;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

SurfaceChart plane(Interval q1, Interval q2) {
  return SurfaceChart(
      "plane", [](double a, double b) { return Vec3(a, b, 0.0); }, {q1, q2}, {false, false},
      [](double, double) {
        ChartDerivatives d;
        d.d1 = Vec3::UnitX();
        d.d2 = Vec3::UnitY();
        d.d11 = d.d12 = d.d22 = Vec3::Zero();
        return d;
      });
}

SurfaceChart sphere(double r) {
  if (!(r > 0.0)) throw OutOfDomain("sphere radius must be positive");
  auto map = [r](double th, double ph) {
    return Vec3(r * sin(th) * cos(ph), r * sin(th) * sin(ph), r * cos(th));
  };
  auto derivs = [r](double th, double ph) {
    const double st = sin(th), ct = cos(th), sp = sin(ph), cp = cos(ph);
    ChartDerivatives d;
    d.d1 = r * Vec3(ct * cp, ct * sp, -st);
    d.d2 = r * Vec3(-st * sp, st * cp, 0.0);
    d.d11 = r * Vec3(-st * cp, -st * sp, -ct);
    d.d12 = r * Vec3(-ct * sp, ct * cp, 0.0);
    d.d22 = r * Vec3(-st * cp, -st * sp, 0.0);
    return d;
  };
  SurfaceChart chart("sphere", map, {Interval{0.0, std::numbers::pi}, Interval{0.0, kTwoPi}},
                     {false, true}, derivs);
  chart.set_pole_closure(0, true);
  return chart;
}

SurfaceChart cylinder(double r, double length) {
  if (!(r > 0.0) || !(length > 0.0)) {
    throw OutOfDomain("cylinder radius and length must be positive");
  }
  auto map = [r](double th, double y) { return Vec3(r * sin(th), y, r * cos(th)); };
  auto derivs = [r](double th, double) {
    ChartDerivatives d;
    d.d1 = Vec3(r * cos(th), 0.0, -r * sin(th));
    d.d2 = Vec3::UnitY();
    d.d11 = Vec3(-r * sin(th), 0.0, -r * cos(th));
    d.d12 = d.d22 = Vec3::Zero();
    return d;
  };
  return SurfaceChart("cylinder", map,
                      {Interval{0.0, kTwoPi}, Interval{-0.5 * length, 0.5 * length}},
                      {true, false}, derivs);
}

SurfaceChart torus(double R, double r) {
  if (!(r > 0.0) || !(R > r)) throw OutOfDomain("torus requires R > r > 0");
  auto map = [R, r](double th, double ph) {
    const double w = R + r * cos(th);
    return Vec3(w * cos(ph), w * sin(ph), r * sin(th));
  };
  auto derivs = [R, r](double th, double ph) {
    const double st = sin(th), ct = cos(th), sp = sin(ph), cp = cos(ph);
    const double w = R + r * ct;
    ChartDerivatives d;
    d.d1 = Vec3(-r * st * cp, -r * st * sp, r * ct);
    d.d2 = Vec3(-w * sp, w * cp, 0.0);
    d.d11 = Vec3(-r * ct * cp, -r * ct * sp, -r * st);
    d.d12 = Vec3(r * st * sp, -r * st * cp, 0.0);
    d.d22 = Vec3(-w * cp, -w * sp, 0.0);
    return d;
  };
  return SurfaceChart("torus", map, {Interval{0.0, kTwoPi}, Interval{0.0, kTwoPi}},
                      {true, true}, derivs);
}

SurfaceChart bent_sheet(double bend_radius, Interval q1, Interval q2) {
  const double a = bend_radius;
  auto map = [a](double u, double v) { return Vec3(a * sin(u / a), v, a * cos(u / a)); };
  auto derivs = [a](double u, double) {
    ChartDerivatives d;
    d.d1 = Vec3(cos(u / a), 0.0, -sin(u / a));
    d.d2 = Vec3::UnitY();
    d.d11 = Vec3(-sin(u / a) / a, 0.0, -cos(u / a) / a);
    d.d12 = d.d22 = Vec3::Zero();
    return d;
  };
  return SurfaceChart("bent-sheet", map, {q1, q2}, {false, false}, derivs);
}

}  // namespace charts

}  // namespace curvedq
