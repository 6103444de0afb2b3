#include "curvedq/em_fields.hpp"

#include "curvedq/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace curvedq {

CartesianPotential operator+(const CartesianPotential& a, const CartesianPotential& b) {
  CartesianPotential sum;
  sum.a_fn = [fa = a.a_fn, fb = b.a_fn](const Vec3& x) { return (fa(x) + fb(x)).eval(); };
  sum.v_fn = [fa = a.v_fn, fb = b.v_fn](const Vec3& x) { return fa(x) + fb(x); };
  if (a.b_label && b.b_label) sum.b_label = *a.b_label + *b.b_label;
  sum.gauge_name = a.gauge_name + "+" + b.gauge_name;
  return sum;
}

std::string to_string(GaugeKind gauge) {
  switch (gauge) {
    case GaugeKind::symmetric:
      return "symmetric";
    case GaugeKind::landau_x:
      return "landau-x";
    case GaugeKind::landau_y:
      return "landau-y";
    case GaugeKind::landau_z:
      return "landau-z";
  }
  return "unknown";
}

GaugeKind gauge_from_string(const std::string& name) {
  if (name == "symmetric") return GaugeKind::symmetric;
  if (name == "landau-x") return GaugeKind::landau_x;
  if (name == "landau-y") return GaugeKind::landau_y;
  if (name == "landau-z") return GaugeKind::landau_z;
  throw ConfigError("unknown gauge '" + name + "'");
}

CartesianPotential uniform_field_potential(const Vec3& B, GaugeKind gauge) {
  CartesianPotential cp;
  cp.b_label = B;
  cp.gauge_name = to_string(gauge);
  switch (gauge) {
    case GaugeKind::symmetric:
      cp.a_fn = [B](const Vec3& x) { return (0.5 * B.cross(x)).eval(); };
      break;
    case GaugeKind::landau_x:
      cp.a_fn = [B](const Vec3& x) {
        return Vec3(0.0, B.z() * x.x(), B.x() * x.y() - B.y() * x.x());
      };
      break;
    case GaugeKind::landau_y:
      cp.a_fn = [B](const Vec3& x) {
        return Vec3(B.y() * x.z() - B.z() * x.y(), 0.0, B.x() * x.y());
      };
      break;
    case GaugeKind::landau_z:
      cp.a_fn = [B](const Vec3& x) {
        return Vec3(B.y() * x.z(), B.z() * x.x() - B.x() * x.z(), 0.0);
      };
      break;
  }
  return cp;
}

CartesianPotential with_uniform_electric_field(CartesianPotential cp, const Vec3& E) {
  cp.v_fn = [v = cp.v_fn, E](const Vec3& x) { return v(x) - E.dot(x); };
  return cp;
}

Vec3 numerical_curl(const CartesianPotential& cp, const Vec3& x, double step) {
  Eigen::Matrix3d jac;  // jac(i, j) = d A_i / d x_j
  for (int j = 0; j < 3; ++j) {
    Vec3 dx = Vec3::Zero();
    dx[j] = step * std::max(1.0, std::abs(x[j]));
    jac.col(j) = (cp.a_fn(x + dx) - cp.a_fn(x - dx)) / (2.0 * dx[j]);
  }
  return {jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1)};
}

Vec3 pullback_potential(const SurfaceChart& chart, const CartesianPotential& cp, Coord2 q,
                        double q3) {
  const ChartDerivatives d = chart.derivatives(q);
  Vec3 d1 = d.d1, d2 = d.d2;
  GeometryPointData gp;
  if (q3 != 0.0) {
    gp = weingarten_at(chart, q);
    // d_a n = alpha_a^c d_c r
    d1 = d.d1 + q3 * (gp.alpha(0, 0) * d.d1 + gp.alpha(0, 1) * d.d2);
    d2 = d.d2 + q3 * (gp.alpha(1, 0) * d.d1 + gp.alpha(1, 1) * d.d2);
  } else {
    gp = metric_at(chart, q);
  }
  const Vec3 X = chart.point(q) + q3 * gp.normal;
  const Vec3 A = cp.a_fn(X);
  return {A.dot(d1), A.dot(d2), A.dot(gp.normal)};
}

double normal_gauge_function(const SurfaceChart& chart, const CartesianPotential& cp, Coord2 q,
                             double q3) {
  if (q3 == 0.0) return 0.0;
  bool finite = true;
  auto integrand = [&](double z) {
    const double a3 = pullback_potential(chart, cp, q, z)[2];
    if (!std::isfinite(a3)) finite = false;
    return std::isfinite(a3) ? a3 : 0.0;
  };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, 0.0, q3, 15, 1e-12, &error);
  if (!finite || !std::isfinite(value)) {
    throw QuadratureFailure("normal gauge integrand is not finite");
  }
  if (error > 1e-10) {
    throw QuadratureFailure("normal gauge quadrature did not reach 1e-10 (error estimate " +
                            std::to_string(error) + ")");
  }
  return -value;
}

Vec3 normal_gauge_potential_at(const SurfaceChart& chart, const CartesianPotential& cp,
                               Coord2 q, double q3) {
  const Vec3 raw = pullback_potential(chart, cp, q, q3);
  Vec3 out(raw[0], raw[1], 0.0);
  if (q3 == 0.0) return out;  // gamma(., 0) = 0, so its tangential gradient vanishes
  for (int a = 0; a < 2; ++a) {
    const double step = 1e-5 * chart.domain(a).span();
    Coord2 qp = q, qm = q;
    qp[a] += step;
    qm[a] -= step;
    out[a] += (normal_gauge_function(chart, cp, qp, q3) -
               normal_gauge_function(chart, cp, qm, q3)) /
              (2.0 * step);
  }
  return out;
}

SurfacePotential SurfacePotential::zero(const Grid& grid) {
  SurfacePotential sp;
  sp.grid = grid;
  sp.a1.assign(grid.size(), 0.0);
  sp.a2.assign(grid.size(), 0.0);
  sp.a3_residual.assign(grid.size(), 0.0);
  sp.v.assign(grid.size(), 0.0);
  sp.gauge_tag = "zero";
  return sp;
}

namespace {

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

SurfacePotential normal_gauge_fix(const SurfaceChart& chart, const CartesianPotential& cp,
                                  const Grid& grid) {
  if (grid.rank() != 2) throw GridMismatch("surface potentials need a rank-2 grid");
  SurfacePotential sp = SurfacePotential::zero(grid);
  sp.gauge_tag = "normal(" + cp.gauge_name + ")";
  bool identity_fix = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Coord2 q = grid.coord2(i);
    const Vec3 fixed = normal_gauge_potential_at(chart, cp, q, 0.0);
    const Vec3 raw = pullback_potential(chart, cp, q, 0.0);
    sp.a1[i] = fixed[0];
    sp.a2[i] = fixed[1];
    sp.a3_residual[i] = raw[2];
    sp.v[i] = cp.v_fn(chart.point(q));
    if (std::abs(raw[2]) > 1e-12) identity_fix = false;
  }
  if (identity_fix) sp.gauge_tag += ":identity";

  // Components must be single valued across periodic seams.
  for (int axis = 0; axis < 2; ++axis) {
    const GridAxis& ax = grid.axis(axis);
    if (ax.bc != Boundary::periodic) continue;
    const GridAxis& other = grid.axis(1 - axis);
    for (int j = 0; j < other.n; ++j) {
      Coord2 lo, hi;
      lo[1 - axis] = hi[1 - axis] = other.node(j);
      lo[axis] = ax.range.min;
      hi[axis] = ax.range.max;
      const Vec3 alo = pullback_potential(chart, cp, lo, 0.0);
      const Vec3 ahi = pullback_potential(chart, cp, hi, 0.0);
      const double vlo = cp.v_fn(chart.point(lo));
      const double vhi = cp.v_fn(chart.point(hi));
      if (!close(alo[0], ahi[0]) || !close(alo[1], ahi[1]) || !close(vlo, vhi)) {
        throw PeriodicityViolation("potential '" + cp.gauge_name +
                                   "' is not periodic along q" + std::to_string(axis + 1) +
                                   " on chart '" + chart.name() + "'");
      }
    }
  }
  return sp;
}

SurfacePotential apply_surface_gauge(const SurfacePotential& sp, const ScalarField& gamma) {
  const Grid& grid = sp.grid;
  for (int axis = 0; axis < 2; ++axis) {
    const GridAxis& ax = grid.axis(axis);
    if (ax.bc != Boundary::periodic) continue;
    const GridAxis& other = grid.axis(1 - axis);
    for (int j = 0; j < other.n; ++j) {
      Coord2 lo, hi;
      lo[1 - axis] = hi[1 - axis] = other.node(j);
      lo[axis] = ax.range.min;
      hi[axis] = ax.range.max;
      if (!close(gamma(lo), gamma(hi))) {
        throw PeriodicityViolation("gauge function is multivalued along periodic q" +
                                   std::to_string(axis + 1));
      }
    }
  }
  SurfacePotential out = sp;
  out.gauge_tag = sp.gauge_tag + "+gauge";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Coord2 q = grid.coord2(i);
    for (int axis = 0; axis < 2; ++axis) {
      const double step = 1e-5 * grid.axis(axis).range.span();
      Coord2 qp = q, qm = q;
      qp[axis] += step;
      qm[axis] -= step;
      const double grad = (gamma(qp) - gamma(qm)) / (2.0 * step);
      (axis == 0 ? out.a1 : out.a2)[i] += grad;
    }
  }
  return out;
}

}  // namespace curvedq
