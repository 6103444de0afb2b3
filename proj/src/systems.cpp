#include "curvedq/systems.hpp"

#include "curvedq/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace curvedq {

namespace {

using std::cos;
using std::sin;
using Triplet = Eigen::Triplet<Complex>;
constexpr double kPi = std::numbers::pi;

/// Five-point derivative of f along `axis`.
template <typename F>
double partial(const F& f, Coord2 q, int axis, double step) {
  auto at = [&](double s) {
    Coord2 p = q;
    p[axis] += s;
    return f(p);
  };
  return (-at(2 * step) + 8 * at(step) - 8 * at(-step) + at(-2 * step)) / (12.0 * step);
}

SparseC diagonal(const std::vector<Complex>& d) {
  SparseC D(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < d.size(); ++i) {
    trips.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), d[i]);
  }
  D.setFromTriplets(trips.begin(), trips.end());
  return D;
}

}  // namespace

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::sphere:
      return "sphere";
    case SystemKind::cylinder:
      return "cylinder";
    case SystemKind::torus:
      return "torus";
  }
  return "unknown";
}

void SystemSpec::validate() const {
  if (!(r > 0.0)) throw ConfigError("radius r must be positive");
  if (kind == SystemKind::cylinder && !(L > 0.0)) throw ConfigError("cylinder length must be positive");
  if (kind == SystemKind::torus && !(R > r)) throw ConfigError("torus requires R > r > 0");
  if (!std::isfinite(B) || !std::isfinite(B0) || !std::isfinite(B1)) {
    throw ConfigError("field components must be finite");
  }
  if (!(params.mass > 0.0) || !(params.hbar > 0.0)) {
    throw ConfigError("mass and hbar must be positive");
  }
}

SurfaceChart system_chart(const SystemSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case SystemKind::sphere:
      return charts::sphere(spec.r);
    case SystemKind::cylinder:
      return charts::cylinder(spec.r, spec.L);
    case SystemKind::torus:
      return charts::torus(spec.R, spec.r);
  }
  throw ConfigError("unknown system");
}

CartesianPotential system_potential(const SystemSpec& spec) {
  switch (spec.kind) {
    case SystemKind::sphere:
      return uniform_field_potential(Vec3(0.0, 0.0, spec.B), GaugeKind::symmetric);
    case SystemKind::cylinder:
      return uniform_field_potential(Vec3(0.0, spec.B0, 0.0), GaugeKind::symmetric) +
             uniform_field_potential(Vec3(0.0, 0.0, spec.B1), GaugeKind::landau_x);
    case SystemKind::torus:
      return uniform_field_potential(Vec3(spec.B1, 0.0, spec.B0), GaugeKind::symmetric);
  }
  throw ConfigError("unknown system");
}

Grid system_grid(const SystemSpec& spec, int n1, int n2,
                 std::array<std::optional<Boundary>, 2> overrides) {
  return build_grid(system_chart(spec), n1, n2, overrides);
}

std::array<double, 2> system_surface_potential(const SystemSpec& spec, Coord2 q) {
  const double th = q.q1;
  switch (spec.kind) {
    case SystemKind::sphere:
      return {0.0, 0.5 * spec.B * spec.r * spec.r * sin(th) * sin(th)};
    case SystemKind::cylinder:
      return {0.5 * spec.r * spec.r * spec.B0, spec.r * spec.B1 * sin(th)};
    case SystemKind::torus: {
      const double r = spec.r, R = spec.R, ph = q.q2;
      const double W = R + r * cos(th);
      return {0.5 * spec.B1 * r * sin(ph) * (R * cos(th) + r),
              0.5 * W * (spec.B0 * W - spec.B1 * r * sin(th) * cos(ph))};
    }
  }
  return {0.0, 0.0};
}

HamiltonianOperator generic_system_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                               const AssemblyOptions& options) {
  const SurfaceChart chart = system_chart(spec);
  const SurfacePotential sp = normal_gauge_fix(chart, system_potential(spec), grid);
  const SurfaceGeometrySamples geo = sample_geometry(chart, grid, spec.params);
  return assemble_surface_hamiltonian(geo, sp, spec.params, options);
}

CoefficientForm sphere_coefficients(const SystemSpec& spec) {
  const double r = spec.r, B = spec.B;
  const double m = spec.params.mass, Q = spec.params.charge, hb = spec.params.hbar;
  CoefficientForm f;
  f.rho = [r](Coord2 q) { return r * r * sin(q.q1); };
  f.principal = [=](Coord2 q) {
    const double s = sin(q.q1);
    Mat2 p;
    p << hb * hb / (2 * m * r * r), 0.0, 0.0, hb * hb / (2 * m * r * r * s * s);
    return p;
  };
  f.first_order = [=](Coord2 q) {
    return std::array<Complex, 2>{
        Complex(-hb * hb * cos(q.q1) / (2 * m * r * r * sin(q.q1)), 0.0),
        Complex(0.0, Q * hb * B / (2 * m))};
  };
  f.zeroth_order = [=](Coord2 q) {
    const double s = sin(q.q1);
    return Complex(Q * Q * B * B * r * r * s * s / (8 * m), 0.0);
  };
  return f;
}

CoefficientForm cylinder_coefficients(const SystemSpec& spec) {
  const double r = spec.r, B0 = spec.B0, B1 = spec.B1;
  const double m = spec.params.mass, Q = spec.params.charge, hb = spec.params.hbar;
  CoefficientForm f;
  f.rho = [r](Coord2) { return r; };
  f.principal = [=](Coord2) {
    Mat2 p;
    p << hb * hb / (2 * m * r * r), 0.0, 0.0, hb * hb / (2 * m);
    return p;
  };
  f.first_order = [=](Coord2 q) {
    return std::array<Complex, 2>{Complex(0.0, Q * hb * B0 / (2 * m)),
                                  Complex(0.0, 2 * Q * hb * r * B1 * sin(q.q1) / (2 * m))};
  };
  f.zeroth_order = [=](Coord2 q) {
    const double s = sin(q.q1);
    return Complex(Q * Q * r * r * (0.25 * B0 * B0 + B1 * B1 * s * s) / (2 * m) -
                       hb * hb / (8 * m * r * r),
                   0.0);
  };
  return f;
}

CoefficientForm torus_coefficients(const SystemSpec& spec) {
  const double r = spec.r, R = spec.R, B0 = spec.B0, B1 = spec.B1;
  const double m = spec.params.mass, Q = spec.params.charge, hb = spec.params.hbar;
  auto W = [r, R](double th) { return R + r * cos(th); };
  CoefficientForm f;
  f.rho = [=](Coord2 q) { return r * W(q.q1); };
  f.principal = [=](Coord2 q) {
    const double w = W(q.q1);
    Mat2 p;
    p << hb * hb / (2 * m * r * r), 0.0, 0.0, hb * hb / (2 * m * w * w);
    return p;
  };
  f.first_order = [=](Coord2 q) {
    const double th = q.q1, ph = q.q2, w = W(th);
    const Complex f1 = Complex(hb * hb * sin(th) / (r * w),
                               Q * hb * B1 * sin(ph) * (R * cos(th) + r) / r);
    const Complex f2 = Complex(0.0, Q * hb * (B0 * w - B1 * r * sin(th) * cos(ph)) / w);
    return std::array<Complex, 2>{f1 / (2 * m), f2 / (2 * m)};
  };
  f.zeroth_order = [=](Coord2 q) {
    const double th = q.q1, ph = q.q2, w = W(th);
    const double geometric = -std::pow(hb * R / (2 * r * w), 2);
    const double im = -Q * hb * B1 * sin(th) * sin(ph) * (R * R + 2 * r * R * cos(th)) / (2 * r * w);
    const double quad = Q * Q / 4 *
                        (std::pow(B1 * w * sin(ph), 2) + std::pow(B0 * w, 2) +
                         std::pow(B1 * r * sin(th), 2) - 2 * B0 * B1 * r * w * sin(th) * cos(ph) -
                         std::pow(B1 * R * sin(th) * sin(ph), 2));
    return Complex(geometric + quad, im) / (2 * m);
  };
  return f;
}

HamiltonianOperator discretize_coefficient_form(const CoefficientForm& form, const Grid& grid,
                                                const PhysicalParams& params,
                                                TranscriptionCheck* check, double drop_below) {
  if (grid.rank() != 2) throw GridMismatch("reference operators need a rank-2 grid");
  const std::size_t n = grid.size();
  std::array<double, 2> step{1e-3 * grid.axis(0).range.span(), 1e-3 * grid.axis(1).range.span()};

  std::vector<double> rho(n);
  std::vector<Mat2> P(n);
  std::array<std::vector<Complex>, 2> rho_beta, remainder;
  std::vector<Complex> z(n);
  double scale = 0.0, max_c = 0.0, max_imz = 0.0;
  for (int a = 0; a < 2; ++a) {
    rho_beta[a].resize(n);
    remainder[a].resize(n);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Coord2 q = grid.coord2(i);
    rho[i] = form.rho(q);
    P[i] = form.principal(q);
    scale = std::max(scale, P[i].cwiseAbs().maxCoeff());
    const auto F = form.first_order(q);
    Complex zi = form.zeroth_order(q);
    for (int a = 0; a < 2; ++a) {
      double div_p = 0.0;
      for (int b = 0; b < 2; ++b) {
        div_p += partial([&](Coord2 p) { return form.rho(p) * form.principal(p)(b, a); }, q, b,
                         step[b]);
      }
      remainder[a][i] = F[a].real() + div_p / rho[i];
      rho_beta[a][i] = rho[i] * F[a].imag();
      const double div_beta =
          partial([&](Coord2 p) { return form.rho(p) * form.first_order(p)[a].imag(); }, q, a,
                  step[a]);
      zi -= Complex(0.0, div_beta / (2.0 * rho[i]));
      max_c = std::max(max_c, std::abs(remainder[a][i]));
    }
    z[i] = zi;
    max_imz = std::max(max_imz, std::abs(zi.imag()));
  }
  if (check) {
    check->real_first_order_remainder = max_c;
    check->imaginary_potential_remainder = max_imz;
  }
  const bool drop_c = max_c <= drop_below * scale;
  const bool drop_imz = max_imz <= drop_below * scale;

  SparseC S(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::array<SparseC, 2> D;
  for (int a = 0; a < 2; ++a) {
    D[a] = stencil::central_difference(grid, a);
    const SparseC F = stencil::face_difference(grid, a);
    std::vector<double> face_coeff(grid.face_count(a), 0.0);
    for (std::size_t fi = 0; fi < face_coeff.size(); ++fi) {
      // Recover the face multi-index from its linear position.
      std::array<int, 3> m{0, 0, 0};
      std::size_t rest = fi;
      for (int b = 0; b < 2; ++b) {
        const int extent = b == a ? grid.axis(b).n + 1 : grid.axis(b).n;
        m[b] = static_cast<int>(rest % extent);
        rest /= extent;
      }
      if (!face_is_active(grid.axis(a), m[a])) continue;
      const auto x = grid.face_coords(m, a);
      const Coord2 q{x[0], x[1]};
      face_coeff[fi] = form.rho(q) * form.principal(q)(a, a);
    }
    S += stencil::flux_form(F, face_coeff);
  }
  for (int a = 0; a < 2; ++a) {
    const int b = 1 - a;
    std::vector<Complex> c(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = rho[i] * P[i](a, b);
      any = any || c[i] != 0.0;
    }
    if (any) {
      const SparseC adj = D[a].adjoint();
      S += SparseC(adj * (diagonal(c) * D[b]));
    }
  }
  for (int a = 0; a < 2; ++a) {
    bool any = false;
    for (const auto& v : rho_beta[a]) any = any || v != 0.0;
    if (any) {
      const SparseC J = diagonal(rho_beta[a]);
      S += Complex(0.0, 0.5) * SparseC(D[a] * J + J * D[a]);
    }
    if (!drop_c) {
      std::vector<Complex> rc(n);
      for (std::size_t i = 0; i < n; ++i) rc[i] = rho[i] * remainder[a][i];
      S += SparseC(diagonal(rc) * D[a]);
    }
  }
  std::vector<Complex> rz(n), inv_rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    rz[i] = rho[i] * (drop_imz ? Complex(z[i].real(), 0.0) : z[i]);
    inv_rho[i] = 1.0 / rho[i];
  }
  S += diagonal(rz);

  HamiltonianOperator H;
  H.matrix = diagonal(inv_rho) * S;
  H.matrix.makeCompressed();
  H.measure = rho;
  H.grid = grid;
  H.params = params;
  return H;
}

HamiltonianOperator reference_sphere_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                                 TranscriptionCheck* check) {
  spec.validate();
  HamiltonianOperator H =
      discretize_coefficient_form(sphere_coefficients(spec), grid, spec.params, check);
  H.provenance = Provenance::reference_sphere;
  return H;
}

HamiltonianOperator reference_cylinder_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                                   TranscriptionCheck* check) {
  spec.validate();
  HamiltonianOperator H =
      discretize_coefficient_form(cylinder_coefficients(spec), grid, spec.params, check);
  H.provenance = Provenance::reference_cylinder;
  return H;
}

HamiltonianOperator reference_torus_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                                TranscriptionCheck* check) {
  spec.validate();
  HamiltonianOperator H =
      discretize_coefficient_form(torus_coefficients(spec), grid, spec.params, check);
  H.provenance = Provenance::reference_torus;
  return H;
}

HamiltonianOperator reference_hamiltonian(const SystemSpec& spec, const Grid& grid,
                                          TranscriptionCheck* check) {
  switch (spec.kind) {
    case SystemKind::sphere:
      return reference_sphere_hamiltonian(spec, grid, check);
    case SystemKind::cylinder:
      return reference_cylinder_hamiltonian(spec, grid, check);
    case SystemKind::torus:
      return reference_torus_hamiltonian(spec, grid, check);
  }
  throw ConfigError("unknown system");
}

double cylinder_flux_ratio(const SystemSpec& spec) {
  return spec.params.charge * spec.B0 * spec.r * spec.r / (2.0 * spec.params.hbar);
}

std::vector<double> torus_sector_levels(const SystemSpec& spec, int m, int count,
                                        int fourier_modes, int quadrature_points) {
  const double r = spec.r, R = spec.R;
  const double mass = spec.params.mass, Q = spec.params.charge, hb = spec.params.hbar;
  const int nb = 2 * fourier_modes + 1;
  if (count > nb) throw ConvergenceFailure("torus sector oracle: too few Fourier modes");
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nb, nb), M = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::VectorXd val(nb), der(nb);
  const double w = 2.0 * kPi / quadrature_points;
  for (int k = 0; k < quadrature_points; ++k) {
    const double th = k * w;
    const double W = R + r * cos(th);
    val[0] = 1.0;
    der[0] = 0.0;
    for (int j = 1; j <= fourier_modes; ++j) {
      val[2 * j - 1] = cos(j * th);
      der[2 * j - 1] = -j * sin(j * th);
      val[2 * j] = sin(j * th);
      der[2 * j] = j * cos(j * th);
    }
    const double a_phi = 0.5 * spec.B0 * W * W;
    const double vs = -hb * hb / (2 * mass) * std::pow(R / (2 * r * W), 2);
    const double u = std::pow(hb * m - Q * a_phi, 2) / (2 * mass * W * W) + vs;
    K += w * (hb * hb / (2 * mass) * (W / r)) * der * der.transpose();
    K += w * r * W * u * val * val.transpose();
    M += w * r * W * val * val.transpose();
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("torus sector oracle failed");
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + count);
  return out;
}

std::vector<double> oracle_spectrum(const SystemSpec& spec, int count, AxialBoundary axial) {
  spec.validate();
  const double m = spec.params.mass, hb = spec.params.hbar, r = spec.r;
  std::vector<double> levels;
  switch (spec.kind) {
    case SystemKind::sphere: {
      if (spec.B != 0.0) throw ConfigError("sphere oracle requires B = 0");
      for (int l = 0; static_cast<int>(levels.size()) < count; ++l) {
        for (int j = 0; j < 2 * l + 1; ++j) levels.push_back(hb * hb * l * (l + 1) / (2 * m * r * r));
      }
      break;
    }
    case SystemKind::cylinder: {
      if (spec.B1 != 0.0) throw ConfigError("cylinder oracle requires B1 = 0");
      const double flux = cylinder_flux_ratio(spec);
      const int span = count + static_cast<int>(std::ceil(std::abs(flux))) + 2;
      for (int n = -span; n <= span; ++n) {
        for (int j = 0; j <= count + 1; ++j) {
          double k = 0.0;
          if (axial == AxialBoundary::periodic) {
            for (int sign : {1, -1}) {
              if (j == 0 && sign < 0) continue;
              k = sign * 2.0 * kPi * j / spec.L;
              levels.push_back(hb * hb * std::pow(n - flux, 2) / (2 * m * r * r) +
                               hb * hb * k * k / (2 * m) - hb * hb / (8 * m * r * r));
            }
          } else {
            if (j == 0) continue;
            k = kPi * j / spec.L;
            levels.push_back(hb * hb * std::pow(n - flux, 2) / (2 * m * r * r) +
                             hb * hb * k * k / (2 * m) - hb * hb / (8 * m * r * r));
          }
        }
      }
      break;
    }
    case SystemKind::torus: {
      if (spec.B1 != 0.0) throw ConfigError("torus oracle requires B1 = 0");
      for (int mm = 0; mm <= 400; ++mm) {
        std::vector<double> sector = torus_sector_levels(spec, mm, count);
        if (mm > 0) {
          const auto other = torus_sector_levels(spec, -mm, count);
          sector.insert(sector.end(), other.begin(), other.end());
        }
        const double lowest = *std::min_element(sector.begin(), sector.end());
        if (static_cast<int>(levels.size()) >= count) {
          std::nth_element(levels.begin(), levels.begin() + (count - 1), levels.end());
          // Past the parabola minimum the sector ground state only grows with |m|.
          const double kth = levels[count - 1];
          const double a_max = 0.5 * spec.B0 * std::pow(spec.R + spec.r, 2);
          if (lowest > kth && hb * mm > std::abs(spec.params.charge * a_max)) break;
        }
        levels.insert(levels.end(), sector.begin(), sector.end());
      }
      break;
    }
  }
  std::sort(levels.begin(), levels.end());
  if (static_cast<int>(levels.size()) > count) levels.resize(count);
  return levels;
}

}  // namespace curvedq
