#pragma once

// Electromagnetic potentials on a surface: Cartesian vector potentials of
// uniform fields, their pullback to adapted coordinates, the normal gauge
// that removes A_3 near the surface, and surface gauge transformations.

#include "curvedq/geometry.hpp"
#include "curvedq/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace curvedq {

/// Vector potential A(x) and electric potential V(x) in Cartesian space.
struct CartesianPotential {
  std::function<Vec3(const Vec3&)> a_fn = [](const Vec3&) { return Vec3::Zero().eval(); };
  std::function<double(const Vec3&)> v_fn = [](const Vec3&) { return 0.0; };
  /// The uniform field this potential encodes, when known.
  std::optional<Vec3> b_label;
  std::string gauge_name = "none";
};

/// Superposition of two potentials; field labels add when both are present.
CartesianPotential operator+(const CartesianPotential& a, const CartesianPotential& b);

enum class GaugeKind { symmetric, landau_x, landau_y, landau_z };

std::string to_string(GaugeKind gauge);
GaugeKind gauge_from_string(const std::string& name);

/// Linear vector potential with curl A = B.
///   symmetric: A = B x r / 2
///   landau_x:  A = (0, Bz x, Bx y - By x)   (A_x = 0)
///   landau_y:  A = (By z - Bz y, 0, Bx y)   (A_y = 0)
///   landau_z:  A = (By z, Bz x - Bx z, 0)   (A_z = 0)
CartesianPotential uniform_field_potential(const Vec3& B, GaugeKind gauge);

/// Adds V(x) = -E . x to the potential.
CartesianPotential with_uniform_electric_field(CartesianPotential cp, const Vec3& E);

/// Central-difference curl of cp.a_fn at x.
Vec3 numerical_curl(const CartesianPotential& cp, const Vec3& x, double step = 1e-4);

/// Covariant components (A_1, A_2, A_3) in adapted coordinates at (q, q3):
/// A_a = A(R) . d_a R, A_3 = A(R) . n with R = r + q3 n.
Vec3 pullback_potential(const SurfaceChart& chart, const CartesianPotential& cp, Coord2 q,
                        double q3);

/// Gauge function gamma(q, q3) = -int_0^q3 A_3(q, z) dz (adaptive Gauss-Kronrod).
double normal_gauge_function(const SurfaceChart& chart, const CartesianPotential& cp, Coord2 q,
                             double q3);

/// Covariant components after the normal gauge transformation at (q, q3).
/// The third component vanishes identically.
Vec3 normal_gauge_potential_at(const SurfaceChart& chart, const CartesianPotential& cp,
                               Coord2 q, double q3);

/// Surface potential sampled at the grid nodes (q3 = 0).
struct SurfacePotential {
  Grid grid;
  std::vector<double> a1;
  std::vector<double> a2;
  /// A_3 at q3 = 0 before gauge fixing, kept for diagnostics only.
  std::vector<double> a3_residual;
  std::vector<double> v;
  std::string gauge_tag;

  static SurfacePotential zero(const Grid& grid);
};

SurfacePotential normal_gauge_fix(const SurfaceChart& chart, const CartesianPotential& cp,
                                  const Grid& grid);

using ScalarField = std::function<double(Coord2)>;

/// a_a -> a_a + d_a gamma. Pair with apply_gauge_phase on wavefunctions.
/// Throws PeriodicityViolation when gamma is multivalued on a periodic axis.
SurfacePotential apply_surface_gauge(const SurfacePotential& sp, const ScalarField& gamma);

}  // namespace curvedq
