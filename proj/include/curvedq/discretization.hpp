#pragma once

// Structured-grid discretization of the gauge-covariant Hamiltonian.
//
// Operators are assembled in weighted form S = diag(sqrt g) H, which is
// Hermitian, and stored as H = diag(1/sqrt g) S. The kinetic part is the flux
// form F^H diag(sqrt g g^aa at faces) F plus a node-centered cross stencil for
// g^12. Two magnetic schemes are available:
//
//   symmetrized_central  (iQhbar/2m) sum_a [D_a J^a + J^a D_a] + Q^2 g^ab A_a A_b / 2m,
//                        J^a = sqrt g g^ab A_b, D_a the central difference.
//   peierls              link phases exp(-i Q/hbar int A) inside the kinetic
//                        differences (trapezoid rule along each link).

#include "curvedq/em_fields.hpp"
#include "curvedq/geometry.hpp"
#include "curvedq/grid.hpp"

#include <Eigen/Sparse>

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace curvedq {

using Complex = std::complex<double>;
using VectorC = Eigen::VectorXcd;
using SparseC = Eigen::SparseMatrix<Complex>;

enum class MagneticScheme { symmetrized_central, peierls };

std::string to_string(MagneticScheme scheme);
MagneticScheme magnetic_scheme_from_string(const std::string& name);

enum class Provenance {
  generic_assembled,
  reference_sphere,
  reference_cylinder,
  reference_torus,
};

std::string to_string(Provenance p);

struct WaveFunction {
  Grid grid;
  VectorC values;
};

struct HamiltonianOperator {
  SparseC matrix;
  /// sqrt(g) at every node.
  std::vector<double> measure;
  Grid grid;
  PhysicalParams params;
  Provenance provenance = Provenance::generic_assembled;

  /// Quadrature weights sqrt(g) * cell volume.
  Eigen::VectorXd weights() const;
  /// W H with W = diag(weights()).
  SparseC weighted() const;
};

/// Geometry sampled at nodes and at the faces that carry flux. Faces that
/// carry no flux (closure ends, the duplicated periodic seam) keep sqrt_g = 0.
struct SurfaceGeometrySamples {
  Grid grid;
  std::vector<GeometryPointData> nodes;
  std::array<std::vector<GeometryPointData>, 2> faces;
};

/// Metric and potential data for the covariant assembler in rank 2 or 3.
struct CovariantFields {
  Grid grid;
  std::vector<double> sqrt_metric;              // per node
  std::vector<double> inv_metric;               // rank*rank per node, row-major
  std::array<std::vector<double>, 3> face_flux;  // sqrt(G) G^aa at faces of axis a
  std::vector<double> potential;                // covariant A_j, rank per node
  std::vector<double> scalar_potential;         // V per node, enters as Q V
};

struct AssemblyOptions {
  MagneticScheme scheme = MagneticScheme::symmetrized_central;
};

/// Grid matching the chart's periodicity; pole-closure axes get zero-flux
/// ends and other bounded axes Dirichlet ends unless overridden.
Grid build_grid(const SurfaceChart& chart, int n1, int n2,
                std::array<std::optional<Boundary>, 2> overrides = {});

SurfaceGeometrySamples sample_geometry(const SurfaceChart& chart, const Grid& grid,
                                       const PhysicalParams& params = {});

/// Whether face k along `axis` carries flux.
bool face_is_active(const GridAxis& axis, int k);

CovariantFields surface_covariant_fields(const SurfaceGeometrySamples& geo,
                                         const SurfacePotential& sp);

/// Fields from closed-form metric G_ij(x) and potential A_j(x), V(x).
using MetricFn = std::function<Eigen::MatrixXd(const std::array<double, 3>&)>;
using CovectorFn = std::function<Eigen::VectorXd(const std::array<double, 3>&)>;
using NodeScalarFn = std::function<double(const std::array<double, 3>&)>;
CovariantFields covariant_fields(const Grid& grid, const MetricFn& metric,
                                 const CovectorFn& potential, const NodeScalarFn& scalar);

HamiltonianOperator assemble_generic_hamiltonian(const CovariantFields& fields,
                                                 const PhysicalParams& params,
                                                 const AssemblyOptions& options = {});

/// The generic operator of the surface fields plus diag(V_S).
HamiltonianOperator assemble_surface_hamiltonian(const SurfaceGeometrySamples& geo,
                                                 const SurfacePotential& sp,
                                                 const PhysicalParams& params,
                                                 const AssemblyOptions& options = {});

/// sum conj(psi) phi sqrt(g) h1 h2
Complex weighted_inner_product(const WaveFunction& psi, const WaveFunction& phi,
                               std::span<const double> measure);

double weighted_norm(const WaveFunction& psi, std::span<const double> measure);

/// max|WH - (WH)^H| / max|WH|
double hermiticity_defect(const HamiltonianOperator& H);
double hermiticity_defect(const SparseC& weighted);

/// psi -> psi exp(i Q gamma / hbar), the wavefunction half of a gauge change.
WaveFunction apply_gauge_phase(const WaveFunction& psi, const ScalarField& gamma,
                               const PhysicalParams& params);

/// Relative elementwise distance max|A - B| / max|B| of two operators.
double max_relative_difference(const SparseC& a, const SparseC& b);

namespace stencil {

/// Face-difference operator along `axis`: rows are faces, (U chi_hi - chi_lo)/h.
/// `link_phase`, when given, returns U for the face between lo and hi.
using LinkPhaseFn = std::function<Complex(std::size_t lo, std::size_t hi)>;
SparseC face_difference(const Grid& grid, int axis, const LinkPhaseFn& link_phase = {});

/// Central difference along `axis` with zero ghosts; optional link phases on
/// the forward and backward links.
SparseC central_difference(const Grid& grid, int axis, const LinkPhaseFn& link_phase = {});

/// F^H diag(c) F
SparseC flux_form(const SparseC& face_diff, std::span<const double> face_coeff);

}  // namespace stencil

}  // namespace curvedq
