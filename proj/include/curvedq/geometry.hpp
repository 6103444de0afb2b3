#pragma once

// Differential geometry of a parametrized surface r(q1,q2) embedded in R^3:
// induced metric, Weingarten matrix, curvatures, the curvature-induced
// (geometric) potential and the metric of the adapted coordinates
// R(q1,q2,q3) = r(q1,q2) + q3 n(q1,q2).
//
// Conventions
//   n     = (d1 x d2) / |d1 x d2|           (chart-order orientation)
//   h_ab  = n . d_a d_b r                   (second fundamental form)
//   alpha = -h g^-1, i.e. d_a n = alpha_a^c d_c r
//   mean  = Tr(alpha)/2, gauss = det(alpha)
// With this orientation a sphere chart (theta, phi) has an outward normal
// and alpha = I/r.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <string>

namespace curvedq {

using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// A point in chart coordinates.
struct Coord2 {
  double q1 = 0.0;
  double q2 = 0.0;

  double operator[](int axis) const { return axis == 0 ? q1 : q2; }
  double& operator[](int axis) { return axis == 0 ? q1 : q2; }
};

struct Interval {
  double min = 0.0;
  double max = 1.0;

  double span() const { return max - min; }
  bool contains(double x) const { return x >= min && x <= max; }

  bool operator==(const Interval&) const = default;
};

/// Physical constants of the particle. Internal default is hbar = m = Q = 1.
struct PhysicalParams {
  double mass = 1.0;
  double charge = 1.0;
  double hbar = 1.0;
};

/// First and second partial derivatives of the embedding map.
struct ChartDerivatives {
  Vec3 d1, d2;
  Vec3 d11, d12, d22;
};

/// Parametrization r(q1,q2) of a surface patch together with its domain.
///
/// Analytic derivatives are optional. Without them the chart falls back to
/// second-order central differences with step 1e-5 * (domain span).
class SurfaceChart {
 public:
  using MapFn = std::function<Vec3(double, double)>;
  using DerivativeFn = std::function<ChartDerivatives(double, double)>;

  SurfaceChart(std::string name, MapFn map, std::array<Interval, 2> domain,
               std::array<bool, 2> periodic, DerivativeFn derivatives = {});

  const std::string& name() const { return name_; }
  const Interval& domain(int axis) const { return domain_[axis]; }
  bool periodic(int axis) const { return periodic_[axis]; }
  bool has_analytic_derivatives() const { return static_cast<bool>(derivatives_); }

  /// Coordinate end points where the area element vanishes (sphere poles).
  /// Grids close such axes with a zero-flux boundary instead of a Dirichlet one.
  bool pole_closure(int axis) const { return pole_closure_[axis]; }
  SurfaceChart& set_pole_closure(int axis, bool value) {
    pole_closure_[axis] = value;
    return *this;
  }

  Vec3 point(Coord2 q) const { return map_(q.q1, q.q2); }
  ChartDerivatives derivatives(Coord2 q) const;
  ChartDerivatives finite_difference_derivatives(Coord2 q) const;

  /// Throws OutOfDomain if a non-periodic coordinate lies outside its interval.
  void check_domain(Coord2 q) const;

 private:
  std::string name_;
  MapFn map_;
  std::array<Interval, 2> domain_;
  std::array<bool, 2> periodic_;
  std::array<bool, 2> pole_closure_{false, false};
  DerivativeFn derivatives_;
};

/// Local geometry at one chart point.
struct GeometryPointData {
  Mat2 g = Mat2::Identity();
  Mat2 g_inv = Mat2::Identity();
  double sqrt_g = 1.0;
  Vec3 normal = Vec3::UnitZ();
  // Filled by weingarten_at.
  Mat2 alpha = Mat2::Zero();
  double mean_curv = 0.0;
  double gauss_curv = 0.0;
  double v_s = 0.0;

  /// Largest principal curvature magnitude.
  double max_abs_curvature() const;
};

/// Metric of the adapted coordinates (q1, q2, q3) at normal offset q3.
struct AdaptedMetric3D {
  Mat3 G = Mat3::Identity();
  double q3 = 0.0;
};

GeometryPointData metric_at(const SurfaceChart& chart, Coord2 q);

/// Full point data; v_s is evaluated for the given particle parameters.
GeometryPointData weingarten_at(const SurfaceChart& chart, Coord2 q,
                                const PhysicalParams& params = {});

/// -(hbar^2 / 2m) [ (Tr alpha / 2)^2 - det alpha ], never positive.
double geometric_potential(const GeometryPointData& gp, double mass, double hbar);

AdaptedMetric3D adapted_metric_at(const SurfaceChart& chart, Coord2 q, double q3);

/// f = 1 + Tr(alpha) q3 + det(alpha) q3^2; throws NonPositiveFactor if f <= 0.
double rescale_factor(const GeometryPointData& gp, double q3);

/// Embedding of the adapted coordinates, R = r + q3 n.
Vec3 adapted_point(const SurfaceChart& chart, Coord2 q, double q3);

namespace charts {

/// Flat sheet (q1, q2, 0). Periodic identification of the sheet is a grid
/// boundary condition, not a property of the map.
SurfaceChart plane(Interval q1 = {0.0, 1.0}, Interval q2 = {0.0, 1.0});

/// Sphere of radius r in (theta, phi), polar axis along z.
SurfaceChart sphere(double r);

/// Cylinder of radius r in (theta, y), axis along y, y in [-L/2, L/2].
/// The embedding is (r sin theta, y, r cos theta); theta = 0 points along +z.
SurfaceChart cylinder(double r, double length);

/// Ring torus in (theta, phi): ((R + r cos theta) cos phi,
/// (R + r cos theta) sin phi, r sin theta).
SurfaceChart torus(double R, double r);

/// The flat sheet rolled onto a cylinder of radius `bend_radius` along q1.
/// Isometric to plane(): same metric, nonzero Weingarten matrix.
SurfaceChart bent_sheet(double bend_radius, Interval q1 = {0.0, 1.0},
                        Interval q2 = {0.0, 1.0});

}  // namespace charts

}  // namespace curvedq
