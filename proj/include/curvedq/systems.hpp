#pragma once

// Closed-form Hamiltonians of the sphere, cylinder and torus in their adapted
// gauges, written out as explicit differential operators, plus oracle spectra
// that do not go through the grid machinery.
//
// A reference operator is given in coefficient form
//
//   H chi = -P^ab d_a d_b chi + F^a d_a chi + Z chi,    weight rho = sqrt(g),
//
// with the coefficients read directly off the surface equations. It is
// discretized with the same face/central stencils as the generic assembler
// after rewriting it as
//
//   -(1/rho) d_a(rho P^ab d_b) + (i/2rho){D_a, rho beta^a} + c^a d_a + z,
//
// where beta^a = Im F^a, c^a = Re F^a + (1/rho) d_b(rho P^ba) and
// z = Z - (i/2rho) d_a(rho beta^a). For a self-adjoint H the remainders c^a
// and Im z vanish; their sizes are reported as a transcription check.

#include "curvedq/discretization.hpp"
#include "curvedq/em_fields.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace curvedq {

enum class SystemKind { sphere, cylinder, torus };

std::string to_string(SystemKind kind);

struct SystemSpec {
  SystemKind kind = SystemKind::sphere;
  double r = 1.0;
  /// Cylinder length.
  double L = 10.0;
  /// Torus major radius.
  double R = 2.0;
  /// Sphere field along the polar axis.
  double B = 0.0;
  /// Cylinder: B0 along the axis, B1 perpendicular at theta = 0.
  /// Torus: B0 normal to the torus plane, B1 in the plane.
  double B0 = 0.0;
  double B1 = 0.0;
  PhysicalParams params;

  /// Throws ConfigError on non-positive radii, R <= r or non-finite fields.
  void validate() const;
};

SurfaceChart system_chart(const SystemSpec& spec);

/// Cartesian potential whose pullback is the closed-form surface gauge:
///   sphere    symmetric gauge of B z
///   cylinder  symmetric gauge of B0 y plus landau-x gauge of B1 z
///   torus     symmetric gauge of (B1, 0, B0)
CartesianPotential system_potential(const SystemSpec& spec);

/// Chart grid with the chart's natural boundaries (overridable).
Grid system_grid(const SystemSpec& spec, int n1, int n2,
                 std::array<std::optional<Boundary>, 2> overrides = {});

/// Closed-form covariant potential (A_1, A_2) at a chart point.
std::array<double, 2> system_surface_potential(const SystemSpec& spec, Coord2 q);

/// The generic pipeline: normal gauge fix of system_potential and surface assembly.
HamiltonianOperator generic_system_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                               const AssemblyOptions& options = {});

struct CoefficientForm {
  std::function<double(Coord2)> rho;
  /// P^ab, symmetric.
  std::function<Mat2(Coord2)> principal;
  std::function<std::array<Complex, 2>(Coord2)> first_order;
  std::function<Complex(Coord2)> zeroth_order;
};

struct TranscriptionCheck {
  /// max |c^a| over nodes.
  double real_first_order_remainder = 0.0;
  /// max |Im z| over nodes.
  double imaginary_potential_remainder = 0.0;
};

CoefficientForm sphere_coefficients(const SystemSpec& spec);
CoefficientForm cylinder_coefficients(const SystemSpec& spec);
CoefficientForm torus_coefficients(const SystemSpec& spec);

/// Discretizes a coefficient form on `grid`. Remainders below `drop_below`
/// (relative to the principal part) are treated as exact cancellations.
HamiltonianOperator discretize_coefficient_form(const CoefficientForm& form, const Grid& grid,
                                                const PhysicalParams& params,
                                                TranscriptionCheck* check = nullptr,
                                                double drop_below = 1e-7);

HamiltonianOperator reference_sphere_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                                 TranscriptionCheck* check = nullptr);
HamiltonianOperator reference_cylinder_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                                   TranscriptionCheck* check = nullptr);
HamiltonianOperator reference_torus_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                                TranscriptionCheck* check = nullptr);
HamiltonianOperator reference_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                          TranscriptionCheck* check = nullptr);

/// Boundary condition of the cylinder's y axis in the oracle.
enum class AxialBoundary { periodic, dirichlet };

/// Lowest `count` levels of the continuum problem:
///   sphere   l(l+1) hbar^2 / 2 m r^2 with multiplicity 2l + 1 (B = 0 only)
///   cylinder hbar^2 (n - Phi/Phi0)^2 / 2 m r^2 + hbar^2 k^2 / 2m - hbar^2 / 8 m r^2 (B1 = 0 only)
///   torus    union over m of 1D theta problems (B1 = 0 only)
std::vector<double> oracle_spectrum(const SystemSpec& spec, int count,
                                    AxialBoundary axial = AxialBoundary::periodic);

/// Flux ratio Phi/Phi0 = Q B0 r^2 / 2 hbar of the cylinder.
double cylinder_flux_ratio(const SystemSpec& spec);

/// Lowest `count` eigenvalues of the 1D theta problem of the torus in
/// angular-momentum sector m, by a Fourier-Galerkin generalized eigenproblem.
std::vector<double> torus_sector_levels(const SystemSpec& spec, int m, int count,
                                        int fourier_modes = 40, int quadrature_points = 512);

}  // namespace curvedq
