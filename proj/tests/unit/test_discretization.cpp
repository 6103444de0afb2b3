#include "curvedq/discretization.hpp"
#include "curvedq/errors.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace curvedq;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> dense_spectrum(const HamiltonianOperator& H) {
  // W^1/2 H W^-1/2 is Hermitian.
  const Eigen::VectorXd w = H.weights().cwiseSqrt();
  const Eigen::MatrixXcd A =
      w.cast<Complex>().asDiagonal() * Eigen::MatrixXcd(H.matrix) * w.cwiseInverse().cast<Complex>().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  const Eigen::VectorXd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

HamiltonianOperator plane_operator(const Grid& grid, double a1, double a2, MagneticScheme scheme) {
  const auto chart = charts::plane(grid.axis(0).range, grid.axis(1).range);
  SurfacePotential sp = SurfacePotential::zero(grid);
  std::fill(sp.a1.begin(), sp.a1.end(), a1);
  std::fill(sp.a2.begin(), sp.a2.end(), a2);
  AssemblyOptions o;
  o.scheme = scheme;
  return assemble_surface_hamiltonian(sample_geometry(chart, grid), sp, {}, o);
}

SurfacePotential random_potential(const Grid& grid, unsigned seed) {
  std::srand(seed);
  SurfacePotential sp = SurfacePotential::zero(grid);
  const Eigen::VectorXd r1 = Eigen::VectorXd::Random(static_cast<Eigen::Index>(grid.size()));
  const Eigen::VectorXd r2 = Eigen::VectorXd::Random(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sp.a1[i] = r1[static_cast<Eigen::Index>(i)];
    sp.a2[i] = r2[static_cast<Eigen::Index>(i)];
    sp.v[i] = r1[static_cast<Eigen::Index>(i)] * r2[static_cast<Eigen::Index>(i)];
  }
  return sp;
}

}  // namespace

TEST(Discretization, FreeDirichletBoxMatchesDiscreteLaplacian) {
  const Grid grid({GridAxis{{0, 1}, 7, Boundary::dirichlet_zero},
                   GridAxis{{0, 2}, 6, Boundary::dirichlet_zero}});
  const auto eig = dense_spectrum(plane_operator(grid, 0, 0, MagneticScheme::symmetrized_central));
  std::vector<double> oracle;
  for (int i = 1; i <= 7; ++i) {
    for (int j = 1; j <= 6; ++j) {
      const double h1 = grid.axis(0).h(), h2 = grid.axis(1).h();
      oracle.push_back((1 - std::cos(kPi * i / 8)) / (h1 * h1) + (1 - std::cos(kPi * j / 7)) / (h2 * h2));
    }
  }
  std::sort(oracle.begin(), oracle.end());
  ASSERT_EQ(eig.size(), oracle.size());
  for (std::size_t i = 0; i < eig.size(); ++i) EXPECT_NEAR(eig[i], oracle[i], 1e-10 * oracle.back());
}

// A constant potential on a periodic plane is a flat connection: plane waves
// stay eigenvectors with shifted momenta.
TEST(Discretization, ConstantPotentialPlaneWaves) {
  const int n1 = 8, n2 = 6;
  const Grid grid({GridAxis{{0, 2}, n1, Boundary::periodic}, GridAxis{{0, 3}, n2, Boundary::periodic}});
  const double a1 = 0.7, a2 = -1.3;
  const double h1 = grid.axis(0).h(), h2 = grid.axis(1).h();
  std::vector<double> peierls, central;
  for (int m1 = 0; m1 < n1; ++m1) {
    for (int m2 = 0; m2 < n2; ++m2) {
      const double k1 = 2 * kPi * m1 / 2.0, k2 = 2 * kPi * m2 / 3.0;
      peierls.push_back((1 - std::cos((k1 - a1) * h1)) / (h1 * h1) +
                        (1 - std::cos((k2 - a2) * h2)) / (h2 * h2));
      central.push_back((1 - std::cos(k1 * h1)) / (h1 * h1) - a1 * std::sin(k1 * h1) / h1 +
                        0.5 * a1 * a1 + (1 - std::cos(k2 * h2)) / (h2 * h2) -
                        a2 * std::sin(k2 * h2) / h2 + 0.5 * a2 * a2);
    }
  }
  std::sort(peierls.begin(), peierls.end());
  std::sort(central.begin(), central.end());
  const auto ep = dense_spectrum(plane_operator(grid, a1, a2, MagneticScheme::peierls));
  const auto ec = dense_spectrum(plane_operator(grid, a1, a2, MagneticScheme::symmetrized_central));
  for (std::size_t i = 0; i < ep.size(); ++i) {
    EXPECT_NEAR(ep[i], peierls[i], 1e-10);
    EXPECT_NEAR(ec[i], central[i], 1e-10);
  }
}

TEST(Discretization, HermitianOnCurvedChartsWithRandomFields) {
  const std::vector<SurfaceChart> charts_{charts::sphere(1.0), charts::torus(2.0, 0.8),
                                          charts::cylinder(1.0, 3.0),
                                          charts::bent_sheet(0.6, {0, 1}, {0, 1})};
  unsigned seed = 1;
  for (const auto& c : charts_) {
    const Grid grid = build_grid(c, 12, 10);
    const auto geo = sample_geometry(c, grid);
    for (auto scheme : {MagneticScheme::symmetrized_central, MagneticScheme::peierls}) {
      AssemblyOptions o;
      o.scheme = scheme;
      const auto H = assemble_surface_hamiltonian(geo, random_potential(grid, seed++), {1.0, -0.7, 1.3}, o);
      EXPECT_LE(hermiticity_defect(H), 1e-12) << c.name();
      EXPECT_EQ(H.provenance, Provenance::generic_assembled);
    }
  }
}

TEST(Discretization, CrossMetricTermIsHermitian) {
  // A sheared plane has g_12 != 0.
  const SurfaceChart shear(
      "shear", [](double u, double v) { return Vec3(u + 0.4 * v, v, 0.0); },
      {Interval{0, 1}, Interval{0, 1}}, {false, false});
  const Grid grid = build_grid(shear, 9, 9);
  const auto H = assemble_surface_hamiltonian(sample_geometry(shear, grid), random_potential(grid, 3), {});
  EXPECT_LE(hermiticity_defect(H), 1e-12);
  // The shear is a linear change of coordinates: the lowest level tends to
  // the Dirichlet ground state of the sheared parallelogram, which lies above
  // pi^2 (the unit square value).
  const auto e = dense_spectrum(
      assemble_surface_hamiltonian(sample_geometry(shear, grid), SurfacePotential::zero(grid), {}));
  EXPECT_GT(e[0], 0.9 * kPi * kPi);
}

TEST(Discretization, GenericMatchesSurfaceMinusGeometricPotential) {
  const SurfaceChart t = charts::torus(2.0, 0.7);
  const Grid grid = build_grid(t, 10, 12);
  const auto cp = uniform_field_potential(Vec3(0.3, 0.1, 0.5), GaugeKind::symmetric);
  const SurfacePotential sp = normal_gauge_fix(t, cp, grid);
  const PhysicalParams params{1.5, 0.8, 1.1};
  const auto geo = sample_geometry(t, grid, params);
  const auto surface = assemble_surface_hamiltonian(geo, sp, params);

  const CovariantFields fields = covariant_fields(
      grid,
      [&](const std::array<double, 3>& x) -> Eigen::MatrixXd { return metric_at(t, {x[0], x[1]}).g; },
      [&](const std::array<double, 3>& x) -> Eigen::VectorXd {
        const Vec3 a = normal_gauge_potential_at(t, cp, {x[0], x[1]}, 0.0);
        return Eigen::Vector2d(a[0], a[1]);
      },
      [&](const std::array<double, 3>& x) { return cp.v_fn(t.point({x[0], x[1]})); });
  const auto generic = assemble_generic_hamiltonian(fields, params);
  SparseC diff = surface.matrix - generic.matrix;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    diff.coeffRef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= geo.nodes[i].v_s;
  }
  diff.prune(Complex(0.0));
  EXPECT_LE(max_relative_difference(generic.matrix + diff, generic.matrix), 1e-12);
}

// Rank 3: a uniform field along z in the Landau gauge A = (-B y, 0, 0)
// separates into the 2D magnetic plane operator plus a 1D operator in z.
TEST(Discretization, ThreeDimensionalLandauSeparates) {
  const double B = 1.1;
  const GridAxis ax{{0, 2}, 6, Boundary::dirichlet_zero}, ay{{-1, 1}, 5, Boundary::dirichlet_zero},
      az{{0, 1}, 4, Boundary::dirichlet_zero};
  const Grid g3({ax, ay, az});
  const auto f3 = covariant_fields(
      g3, [](const std::array<double, 3>&) -> Eigen::MatrixXd { return Eigen::Matrix3d::Identity(); },
      [&](const std::array<double, 3>& x) -> Eigen::VectorXd { return Eigen::Vector3d(-B * x[1], 0, 0); },
      [](const std::array<double, 3>&) { return 0.0; });
  const auto H3 = assemble_generic_hamiltonian(f3, {});
  EXPECT_LE(hermiticity_defect(H3), 1e-12);

  const Grid g2({ax, ay});
  const auto f2 = covariant_fields(
      g2, [](const std::array<double, 3>&) -> Eigen::MatrixXd { return Eigen::Matrix2d::Identity(); },
      [&](const std::array<double, 3>& x) -> Eigen::VectorXd { return Eigen::Vector2d(-B * x[1], 0); },
      [](const std::array<double, 3>&) { return 0.0; });
  const auto e2 = dense_spectrum(assemble_generic_hamiltonian(f2, {}));
  std::vector<double> oracle;
  const double hz = az.h();
  for (double e : e2) {
    for (int j = 1; j <= az.n; ++j) oracle.push_back(e + (1 - std::cos(kPi * j / (az.n + 1))) / (hz * hz));
  }
  std::sort(oracle.begin(), oracle.end());
  const auto e3 = dense_spectrum(H3);
  ASSERT_EQ(e3.size(), oracle.size());
  for (std::size_t i = 0; i < e3.size(); ++i) EXPECT_NEAR(e3[i], oracle[i], 1e-10 * oracle.back());
}

TEST(Discretization, NoCouplingBetweenFieldAndCurvature) {
  const Grid grid = build_grid(charts::plane(), 10, 10);
  const auto sp = random_potential(grid, 7);
  const auto zero = SurfacePotential::zero(grid);
  for (auto scheme : {MagneticScheme::symmetrized_central, MagneticScheme::peierls}) {
    AssemblyOptions o;
    o.scheme = scheme;
    const auto gp = sample_geometry(charts::plane(), grid);
    const auto gb = sample_geometry(charts::bent_sheet(0.3), grid);
    const SparseC dp = assemble_surface_hamiltonian(gp, sp, {}, o).matrix -
                       assemble_surface_hamiltonian(gp, zero, {}, o).matrix;
    const SparseC db = assemble_surface_hamiltonian(gb, sp, {}, o).matrix -
                       assemble_surface_hamiltonian(gb, zero, {}, o).matrix;
    EXPECT_LE(max_relative_difference(db, dp), 1e-12);
    // Zeroing the field on the bent sheet leaves kinetic + V_S.
    const SparseC kinetic_vs = assemble_surface_hamiltonian(gb, zero, {}, o).matrix -
                               assemble_surface_hamiltonian(gp, zero, {}, o).matrix;
    for (int k = 0; k < kinetic_vs.outerSize(); ++k) {
      for (SparseC::InnerIterator it(kinetic_vs, k); it; ++it) {
        if (it.row() != it.col()) {
          EXPECT_LE(std::abs(it.value()), 1e-9);
        }
      }
    }
  }
}

TEST(Discretization, InnerProductAndNorm) {
  const Grid grid = build_grid(charts::sphere(1.0), 16, 32);
  const auto geo = sample_geometry(charts::sphere(1.0), grid);
  std::vector<double> measure;
  for (const auto& n : geo.nodes) measure.push_back(n.sqrt_g);
  WaveFunction one{grid, VectorC::Ones(static_cast<Eigen::Index>(grid.size()))};
  // Midpoint rule for the sphere area: 2 pi h sum sin(theta_i), h = pi/16.
  double area = 0.0;
  for (int i = 0; i < 16; ++i) area += std::sin((i + 0.5) * kPi / 16);
  area *= 2 * kPi * kPi / 16;
  EXPECT_NEAR(weighted_norm(one, measure) * weighted_norm(one, measure), area, 1e-12);
  EXPECT_NEAR(area, 4 * kPi, 0.03);
  const Grid other = build_grid(charts::sphere(1.0), 8, 32);
  WaveFunction w{other, VectorC::Ones(static_cast<Eigen::Index>(other.size()))};
  EXPECT_THROW(weighted_inner_product(one, w, measure), GridMismatch);
}

TEST(Discretization, SchemeNamesAndErrors) {
  EXPECT_EQ(magnetic_scheme_from_string("central"), MagneticScheme::symmetrized_central);
  EXPECT_EQ(magnetic_scheme_from_string("peierls"), MagneticScheme::peierls);
  EXPECT_EQ(to_string(MagneticScheme::peierls), "peierls");
  EXPECT_THROW(magnetic_scheme_from_string("upwind"), ConfigError);
  const Grid a = build_grid(charts::plane(), 8, 8), b = build_grid(charts::plane(), 8, 9);
  EXPECT_THROW(assemble_surface_hamiltonian(sample_geometry(charts::plane(), a), SurfacePotential::zero(b), {}),
               GridMismatch);
}
