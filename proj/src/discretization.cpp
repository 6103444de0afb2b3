#include "curvedq/discretization.hpp"

#include "curvedq/errors.hpp"

#include <algorithm>
#include <cmath>

namespace curvedq {

using Triplet = Eigen::Triplet<Complex>;

std::string to_string(MagneticScheme scheme) {
  return scheme == MagneticScheme::peierls ? "peierls" : "symmetrized-central";
}

MagneticScheme magnetic_scheme_from_string(const std::string& name) {
  if (name == "peierls") return MagneticScheme::peierls;
  if (name == "central" || name == "symmetrized-central") {
    return MagneticScheme::symmetrized_central;
  }
  throw ConfigError("unknown magnetic scheme '" + name + "'");
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::generic_assembled:
      return "generic-assembled";
    case Provenance::reference_sphere:
      return "reference-sphere";
    case Provenance::reference_cylinder:
      return "reference-cylinder";
    case Provenance::reference_torus:
      return "reference-torus";
  }
  return "unknown";
}

Eigen::VectorXd HamiltonianOperator::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(measure.size()));
  const double cell = grid.cell_volume();
  for (std::size_t i = 0; i < measure.size(); ++i) w[static_cast<Eigen::Index>(i)] = measure[i] * cell;
  return w;
}

SparseC HamiltonianOperator::weighted() const {
  const Eigen::VectorXd w = weights();
  SparseC out = w.cast<Complex>().asDiagonal() * matrix;
  return out;
}

Grid build_grid(const SurfaceChart& chart, int n1, int n2,
                std::array<std::optional<Boundary>, 2> overrides) {
  if (n1 < 4 || n2 < 4) throw BadResolution("grid needs at least 4 nodes per axis");
  std::vector<GridAxis> axes;
  const std::array<int, 2> counts{n1, n2};
  for (int a = 0; a < 2; ++a) {
    GridAxis ax;
    ax.range = chart.domain(a);
    ax.n = counts[a];
    if (chart.periodic(a)) {
      ax.bc = Boundary::periodic;
    } else if (chart.pole_closure(a)) {
      ax.bc = Boundary::zero_flux_closure;
    } else {
      ax.bc = Boundary::dirichlet_zero;
    }
    if (overrides[a]) ax.bc = *overrides[a];
    axes.push_back(ax);
  }
  return Grid(std::move(axes));
}

bool face_is_active(const GridAxis& axis, int k) {
  switch (axis.bc) {
    case Boundary::periodic:
      return k >= 1 && k <= axis.n;
    case Boundary::dirichlet_zero:
      return k >= 0 && k <= axis.n;
    case Boundary::zero_flux_closure:
      return k >= 1 && k <= axis.n - 1;
  }
  return false;
}

namespace {

/// Calls fn(face_index, multi) for every active face along `axis`.
template <typename Fn>
void for_each_active_face(const Grid& grid, int axis, Fn&& fn) {
  const GridAxis& ax = grid.axis(axis);
  std::array<int, 3> extent{1, 1, 1};
  for (int a = 0; a < grid.rank(); ++a) extent[a] = grid.axis(a).n;
  extent[axis] = ax.n + 1;
  std::array<int, 3> m{0, 0, 0};
  for (m[2] = 0; m[2] < extent[2]; ++m[2]) {
    for (m[1] = 0; m[1] < extent[1]; ++m[1]) {
      for (m[0] = 0; m[0] < extent[0]; ++m[0]) {
        if (face_is_active(ax, m[axis])) fn(grid.face_index(m, axis), m);
      }
    }
  }
}

/// Nodes on either side of a face; empty where the side is a ghost.
std::pair<std::optional<std::size_t>, std::optional<std::size_t>> face_nodes(
    const Grid& grid, std::array<int, 3> m, int axis) {
  const int n = grid.axis(axis).n;
  const int k = m[axis];
  std::optional<std::size_t> lo, hi;
  if (k - 1 >= 0) {
    auto ml = m;
    ml[axis] = k - 1;
    lo = grid.index(ml);
  } else if (grid.axis(axis).bc == Boundary::periodic) {
    auto ml = m;
    ml[axis] = n - 1;
    lo = grid.index(ml);
  }
  if (k < n) {
    auto mh = m;
    mh[axis] = k;
    hi = grid.index(mh);
  } else if (grid.axis(axis).bc == Boundary::periodic) {
    auto mh = m;
    mh[axis] = 0;
    hi = grid.index(mh);
  }
  return {lo, hi};
}

}  // namespace

SurfaceGeometrySamples sample_geometry(const SurfaceChart& chart, const Grid& grid,
                                       const PhysicalParams& params) {
  if (grid.rank() != 2) throw GridMismatch("surface geometry needs a rank-2 grid");
  SurfaceGeometrySamples geo;
  geo.grid = grid;
  geo.nodes.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      geo.nodes[i] = weingarten_at(chart, grid.coord2(i), params);
    } catch (const DegenerateChart& e) {
      throw DegenerateChart(std::string(e.what()) + " (node " + std::to_string(i) + ")");
    }
  }
  for (int axis = 0; axis < 2; ++axis) {
    auto& faces = geo.faces[axis];
    faces.assign(grid.face_count(axis), GeometryPointData{});
    for (auto& f : faces) f.sqrt_g = 0.0;
    for_each_active_face(grid, axis, [&](std::size_t fi, const std::array<int, 3>& m) {
      const auto x = grid.face_coords(m, axis);
      try {
        faces[fi] = metric_at(chart, Coord2{x[0], x[1]});
      } catch (const DegenerateChart& e) {
        throw DegenerateChart(std::string(e.what()) + " (face " + std::to_string(fi) +
                              " of axis " + std::to_string(axis) + ")");
      }
    });
  }
  return geo;
}

CovariantFields surface_covariant_fields(const SurfaceGeometrySamples& geo,
                                         const SurfacePotential& sp) {
  if (!(geo.grid == sp.grid)) throw GridMismatch("geometry and potential grids differ");
  const std::size_t n = geo.grid.size();
  CovariantFields f;
  f.grid = geo.grid;
  f.sqrt_metric.resize(n);
  f.inv_metric.resize(4 * n);
  f.potential.resize(2 * n);
  f.scalar_potential = sp.v;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& gp = geo.nodes[i];
    f.sqrt_metric[i] = gp.sqrt_g;
    f.inv_metric[4 * i + 0] = gp.g_inv(0, 0);
    f.inv_metric[4 * i + 1] = gp.g_inv(0, 1);
    f.inv_metric[4 * i + 2] = gp.g_inv(1, 0);
    f.inv_metric[4 * i + 3] = gp.g_inv(1, 1);
    f.potential[2 * i + 0] = sp.a1[i];
    f.potential[2 * i + 1] = sp.a2[i];
  }
  for (int axis = 0; axis < 2; ++axis) {
    const auto& faces = geo.faces[axis];
    auto& flux = f.face_flux[axis];
    flux.resize(faces.size());
    for (std::size_t k = 0; k < faces.size(); ++k) {
      flux[k] = faces[k].sqrt_g * faces[k].g_inv(axis, axis);
    }
  }
  return f;
}

CovariantFields covariant_fields(const Grid& grid, const MetricFn& metric,
                                 const CovectorFn& potential, const NodeScalarFn& scalar) {
  const int d = grid.rank();
  const std::size_t n = grid.size();
  CovariantFields f;
  f.grid = grid;
  f.sqrt_metric.resize(n);
  f.inv_metric.resize(static_cast<std::size_t>(d * d) * n);
  f.potential.resize(static_cast<std::size_t>(d) * n);
  f.scalar_potential.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = grid.coords(i);
    const Eigen::MatrixXd G = metric(x);
    const Eigen::MatrixXd Ginv = G.inverse();
    f.sqrt_metric[i] = std::sqrt(G.determinant());
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) f.inv_metric[static_cast<std::size_t>(d * d) * i + a * d + b] = Ginv(a, b);
    }
    const Eigen::VectorXd A = potential(x);
    for (int a = 0; a < d; ++a) f.potential[static_cast<std::size_t>(d) * i + a] = A[a];
    f.scalar_potential[i] = scalar(x);
  }
  for (int axis = 0; axis < d; ++axis) {
    auto& flux = f.face_flux[axis];
    flux.assign(grid.face_count(axis), 0.0);
    for_each_active_face(grid, axis, [&](std::size_t fi, const std::array<int, 3>& m) {
      const Eigen::MatrixXd G = metric(grid.face_coords(m, axis));
      flux[fi] = std::sqrt(G.determinant()) * G.inverse()(axis, axis);
    });
  }
  return f;
}

namespace stencil {

SparseC face_difference(const Grid& grid, int axis, const LinkPhaseFn& link_phase) {
  const double h = grid.axis(axis).h();
  std::vector<Triplet> trips;
  for_each_active_face(grid, axis, [&](std::size_t fi, const std::array<int, 3>& m) {
    const auto [lo, hi] = face_nodes(grid, m, axis);
    const auto row = static_cast<Eigen::Index>(fi);
    if (lo) trips.emplace_back(row, static_cast<Eigen::Index>(*lo), Complex(-1.0 / h));
    if (hi) {
      const Complex u = (link_phase && lo) ? link_phase(*lo, *hi) : Complex(1.0);
      trips.emplace_back(row, static_cast<Eigen::Index>(*hi), u / h);
    }
  });
  SparseC F(static_cast<Eigen::Index>(grid.face_count(axis)),
            static_cast<Eigen::Index>(grid.size()));
  F.setFromTriplets(trips.begin(), trips.end());
  return F;
}

SparseC central_difference(const Grid& grid, int axis, const LinkPhaseFn& link_phase) {
  const double h = grid.axis(axis).h();
  std::vector<Triplet> trips;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto row = static_cast<Eigen::Index>(p);
    if (auto up = grid.neighbor(p, axis, +1)) {
      const Complex u = link_phase ? link_phase(p, *up) : Complex(1.0);
      trips.emplace_back(row, static_cast<Eigen::Index>(*up), u / (2.0 * h));
    }
    if (auto dn = grid.neighbor(p, axis, -1)) {
      const Complex u = link_phase ? std::conj(link_phase(*dn, p)) : Complex(1.0);
      trips.emplace_back(row, static_cast<Eigen::Index>(*dn), -u / (2.0 * h));
    }
  }
  SparseC D(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(grid.size()));
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

SparseC flux_form(const SparseC& face_diff, std::span<const double> face_coeff) {
  Eigen::VectorXcd c(static_cast<Eigen::Index>(face_coeff.size()));
  for (std::size_t k = 0; k < face_coeff.size(); ++k) c[static_cast<Eigen::Index>(k)] = face_coeff[k];
  const SparseC scaled = c.asDiagonal() * face_diff;
  const SparseC adj = face_diff.adjoint();
  return SparseC(adj * scaled);
}

}  // namespace stencil

namespace {

SparseC diagonal(const std::vector<Complex>& d) {
  SparseC D(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  std::vector<Triplet> trips;
  trips.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    trips.emplace_back(k, k, d[i]);
  }
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

}  // namespace

HamiltonianOperator assemble_generic_hamiltonian(const CovariantFields& fields,
                                                 const PhysicalParams& params,
                                                 const AssemblyOptions& options) {
  const Grid& grid = fields.grid;
  const int d = grid.rank();
  const std::size_t n = grid.size();
  const double kin = params.hbar * params.hbar / (2.0 * params.mass);
  const double Q = params.charge;
  const auto dd = static_cast<std::size_t>(d * d);

  for (std::size_t i = 0; i < n; ++i) {
    if (!(fields.sqrt_metric[i] > 0.0)) {
      throw NonHermitianAssembly("metric is not positive definite at node " + std::to_string(i));
    }
  }

  const bool peierls = options.scheme == MagneticScheme::peierls;
  auto link_for_axis = [&](int axis) -> stencil::LinkPhaseFn {
    if (!peierls) return {};
    const double h = grid.axis(axis).h();
    return [&fields, axis, d, h, Q, hbar = params.hbar](std::size_t lo, std::size_t hi) {
      const double a_lo = fields.potential[static_cast<std::size_t>(d) * lo + axis];
      const double a_hi = fields.potential[static_cast<std::size_t>(d) * hi + axis];
      return std::polar(1.0, -Q / hbar * h * 0.5 * (a_lo + a_hi));
    };
  };

  SparseC S(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<SparseC> central(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) central[a] = stencil::central_difference(grid, a, link_for_axis(a));

  // Kinetic flux terms.
  for (int a = 0; a < d; ++a) {
    const SparseC F = stencil::face_difference(grid, a, link_for_axis(a));
    S += kin * stencil::flux_form(F, fields.face_flux[a]);
  }

  // Mixed-metric cross stencil.
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      if (a == b) continue;
      std::vector<Complex> c(n);
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        c[i] = fields.sqrt_metric[i] * fields.inv_metric[dd * i + a * d + b];
        any = any || c[i] != 0.0;
      }
      if (!any) continue;
      const SparseC adj = central[a].adjoint();
      S += kin * SparseC(adj * (diagonal(c) * central[b]));
    }
  }

  if (!peierls) {
    const Complex coupling(0.0, Q * params.hbar / (2.0 * params.mass));
    std::vector<Complex> quad(n, 0.0);
    for (int a = 0; a < d; ++a) {
      std::vector<Complex> J(n);
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int b = 0; b < d; ++b) {
          s += fields.inv_metric[dd * i + a * d + b] * fields.potential[static_cast<std::size_t>(d) * i + b];
        }
        J[i] = fields.sqrt_metric[i] * s;
        quad[i] += fields.sqrt_metric[i] * Q * Q / (2.0 * params.mass) *
                   s * fields.potential[static_cast<std::size_t>(d) * i + a];
        any = any || J[i] != 0.0;
      }
      if (!any) continue;
      const SparseC Jd = diagonal(J);
      S += coupling * SparseC(central[a] * Jd + Jd * central[a]);
    }
    S += diagonal(quad);
  }

  std::vector<Complex> inv_measure(n), scalar(n);
  for (std::size_t i = 0; i < n; ++i) {
    inv_measure[i] = 1.0 / fields.sqrt_metric[i];
    scalar[i] = Q * fields.scalar_potential[i];
  }

  HamiltonianOperator H;
  H.matrix = diagonal(inv_measure) * S + diagonal(scalar);
  H.matrix.makeCompressed();
  H.measure = fields.sqrt_metric;
  H.grid = grid;
  H.params = params;
  H.provenance = Provenance::generic_assembled;

  const double defect = hermiticity_defect(H);
  if (!(defect <= 1e-10)) {
    throw NonHermitianAssembly("assembled operator has Hermiticity defect " +
                               std::to_string(defect));
  }
  return H;
}

HamiltonianOperator assemble_surface_hamiltonian(const SurfaceGeometrySamples& geo,
                                                 const SurfacePotential& sp,
                                                 const PhysicalParams& params,
                                                 const AssemblyOptions& options) {
  HamiltonianOperator H =
      assemble_generic_hamiltonian(surface_covariant_fields(geo, sp), params, options);
  std::vector<Complex> vs(geo.nodes.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    vs[i] = geometric_potential(geo.nodes[i], params.mass, params.hbar);
  }
  H.matrix += diagonal(vs);
  H.matrix.makeCompressed();
  return H;
}

Complex weighted_inner_product(const WaveFunction& psi, const WaveFunction& phi,
                               std::span<const double> measure) {
  if (!(psi.grid == phi.grid) || psi.values.size() != phi.values.size() ||
      measure.size() != static_cast<std::size_t>(psi.values.size())) {
    throw GridMismatch("inner product of wavefunctions on different grids");
  }
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
    sum += std::conj(psi.values[i]) * phi.values[i] * measure[static_cast<std::size_t>(i)];
  }
  return sum * psi.grid.cell_volume();
}

double weighted_norm(const WaveFunction& psi, std::span<const double> measure) {
  return std::sqrt(std::real(weighted_inner_product(psi, psi, measure)));
}

double hermiticity_defect(const SparseC& weighted) {
  const SparseC adj = weighted.adjoint();
  const SparseC diff = weighted - adj;
  double num = 0.0, den = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseC::InnerIterator it(diff, k); it; ++it) num = std::max(num, std::abs(it.value()));
  }
  for (Eigen::Index k = 0; k < weighted.outerSize(); ++k) {
    for (SparseC::InnerIterator it(weighted, k); it; ++it) den = std::max(den, std::abs(it.value()));
  }
  return den > 0.0 ? num / den : 0.0;
}

double hermiticity_defect(const HamiltonianOperator& H) {
  return hermiticity_defect(H.weighted());
}

WaveFunction apply_gauge_phase(const WaveFunction& psi, const ScalarField& gamma,
                               const PhysicalParams& params) {
  WaveFunction out = psi;
  for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
    const double g = gamma(psi.grid.coord2(static_cast<std::size_t>(i)));
    out.values[i] *= std::polar(1.0, params.charge * g / params.hbar);
  }
  return out;
}

double max_relative_difference(const SparseC& a, const SparseC& b) {
  const SparseC diff = a - b;
  double num = 0.0, den = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseC::InnerIterator it(diff, k); it; ++it) num = std::max(num, std::abs(it.value()));
  }
  for (Eigen::Index k = 0; k < b.outerSize(); ++k) {
    for (SparseC::InnerIterator it(b, k); it; ++it) den = std::max(den, std::abs(it.value()));
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace curvedq
