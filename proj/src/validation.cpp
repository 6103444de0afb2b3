#include "curvedq/validation.hpp"

#include "curvedq/errors.hpp"
#include "curvedq/output.hpp"
#include "curvedq/solvers.hpp"
#include "curvedq/systems.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace curvedq {

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

/// Relative error with a floor for levels at or near zero.
double level_error(double computed, double exact, double floor) {
  return std::abs(computed - exact) / std::max(std::abs(exact), floor);
}

CheckResult make_check(int criterion, std::string id, std::string title) {
  CheckResult c;
  c.criterion = criterion;
  c.id = std::move(id);
  c.title = std::move(title);
  return c;
}

using Suite = std::function<void(std::uint64_t, std::vector<CheckResult>&)>;

// 1. Free sphere: l(l+1)/2 with multiplicity 2l+1.
void sphere_spectrum(std::uint64_t seed, std::vector<CheckResult>& out) {
  SystemSpec spec;
  spec.kind = SystemKind::sphere;
  const Grid grid = system_grid(spec, 64, 128);
  const auto H = generic_system_hamiltonian(spec, grid);
  EigenOptions opt;
  opt.seed = seed;
  const auto res = eigensolve_lowest(H, 16, opt);
  const auto oracle = oracle_spectrum(spec, 16);

  CheckResult c = make_check(1, "sphere-free-spectrum", "sphere r=1, B=0, 64x128: l(l+1)/2, multiplicity 2l+1");
  c.threshold = 0.01;
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < 16; ++i) {
    if (oracle[i] == 0.0) {
      ok = ok && std::abs(res.eigenvalues[i]) <= 1e-3;
    } else {
      worst = std::max(worst, std::abs(res.eigenvalues[i] - oracle[i]) / oracle[i]);
    }
  }
  // Count computed levels inside each oracle window.
  std::string counts;
  for (int l = 0; l <= 3; ++l) {
    const double level = 0.5 * l * (l + 1);
    const int n = static_cast<int>(std::count_if(
        res.eigenvalues.begin(), res.eigenvalues.end(), [&](double e) {
          return level == 0.0 ? std::abs(e) <= 1e-3 : std::abs(e - level) <= 0.01 * level;
        }));
    ok = ok && n == 2 * l + 1;
    counts += (l ? "," : "") + std::to_string(n);
  }
  c.measured = worst;
  c.passed = ok && worst <= c.threshold;
  c.detail = "ground " + fmt(res.eigenvalues[0]) + ", multiplicities " + counts + " (expect 1,3,5,7)";
  out.push_back(c);
}

// 2. Cylinder Aharonov-Bohm levels and integer-flux invisibility.
void cylinder_ab(std::uint64_t seed, std::vector<CheckResult>& out) {
  std::map<double, std::vector<double>> spectra;
  double worst = 0.0;
  std::string detail;
  for (double flux : {0.0, 0.25, 0.5, 1.0}) {
    SystemSpec spec;
    spec.kind = SystemKind::cylinder;
    spec.L = 10.0;
    spec.B0 = 2.0 * flux;  // Phi/Phi0 = Q B0 r^2 / 2 hbar
    const Grid grid = system_grid(spec, 64, 64, {std::nullopt, Boundary::periodic});
    AssemblyOptions options;
    options.scheme = MagneticScheme::peierls;
    const auto H = generic_system_hamiltonian(spec, grid, options);
    EigenOptions opt;
    opt.seed = seed;
    const auto res = eigensolve_lowest(H, 8, opt);
    const auto oracle = oracle_spectrum(spec, 8, AxialBoundary::periodic);
    double w = 0.0;
    for (int i = 0; i < 8; ++i) w = std::max(w, level_error(res.eigenvalues[i], oracle[i], 0.125));
    worst = std::max(worst, w);
    detail += (detail.empty() ? "" : ", ") + std::string("flux ") + fmt(flux) + ": " + fmt(w);
    spectra[flux] = res.eigenvalues;
  }
  CheckResult a = make_check(2, "cylinder-ab-levels",
                "cylinder r=1, L=10 periodic, 64x64: (n - flux)^2/2 + k^2/2 - 1/8, lowest 8");
  a.threshold = 0.005;
  a.measured = worst;
  a.passed = worst <= a.threshold;
  a.detail = "worst relative error per flux (floor 1/8): " + detail;
  out.push_back(a);

  CheckResult b = make_check(2, "cylinder-integer-flux", "flux 1 spectrum equals flux 0 spectrum as multisets");
  b.threshold = 1e-8;
  double diff = 0.0;
  for (std::size_t i = 0; i < spectra[0.0].size(); ++i) {
    diff = std::max(diff, std::abs(spectra[0.0][i] - spectra[1.0][i]));
  }
  b.measured = diff;
  b.passed = diff <= b.threshold;
  b.detail = "max |E_i(1) - E_i(0)| over the lowest 8";
  out.push_back(b);
}

// 3. Reference operators against the generic assembler.
void reference_operators(std::uint64_t, std::vector<CheckResult>& out) {
  for (auto kind : {SystemKind::sphere, SystemKind::cylinder, SystemKind::torus}) {
    SystemSpec spec;
    spec.kind = kind;
    spec.L = 4.0;
    spec.B = 0.7;
    spec.B0 = 0.6;
    spec.B1 = 0.4;
    const Grid grid = system_grid(spec, 32, 32);
    TranscriptionCheck tc;
    const auto ref = reference_hamiltonian(spec, grid, &tc);
    const auto gen = generic_system_hamiltonian(spec, grid);
    CheckResult c = make_check(3, "reference-" + to_string(kind),
                  to_string(kind) + " closed-form operator vs generic assembly, 32x32");
    c.threshold = 1e-10;
    c.measured = max_relative_difference(ref.matrix, gen.matrix);
    c.passed = c.measured <= c.threshold;
    c.detail = "field " +
               (kind == SystemKind::sphere ? "B=" + fmt(spec.B)
                                           : "B0=" + fmt(spec.B0) + ", B1=" + fmt(spec.B1)) +
               "; self-adjointness remainders " + fmt(tc.real_first_order_remainder) + ", " +
               fmt(tc.imaginary_potential_remainder);
    out.push_back(c);
  }
}

// 4. Two gauges of the same field on the cylinder.
void gauge_invariance(std::uint64_t seed, std::vector<CheckResult>& out) {
  SystemSpec spec;
  spec.kind = SystemKind::cylinder;
  spec.L = 4.0;
  spec.B0 = 0.3;
  spec.B1 = 0.5;
  const SurfaceChart chart = system_chart(spec);
  const CartesianPotential mixed = system_potential(spec);
  const CartesianPotential symmetric =
      uniform_field_potential(Vec3(0.0, spec.B0, spec.B1), GaugeKind::symmetric);
  // a_mixed = a_symmetric + grad gamma
  const ScalarField gamma = [&](Coord2 q) { return 0.5 * spec.B1 * spec.r * q.q2 * std::sin(q.q1); };

  std::vector<double> diffs;
  double overlap = 0.0;
  for (int n : {32, 64, 128}) {
    const Grid grid = system_grid(spec, n, n);
    const auto geo = sample_geometry(chart, grid, spec.params);
    const auto Ha = assemble_surface_hamiltonian(geo, normal_gauge_fix(chart, mixed, grid), spec.params);
    const auto Hb =
        assemble_surface_hamiltonian(geo, normal_gauge_fix(chart, symmetric, grid), spec.params);
    EigenOptions opt;
    opt.seed = seed;
    const auto ra = eigensolve_lowest(Ha, 6, opt);
    const auto rb = eigensolve_lowest(Hb, 6, opt);
    double d = 0.0;
    for (int i = 0; i < 6; ++i) d = std::max(d, std::abs(ra.eigenvalues[i] - rb.eigenvalues[i]));
    diffs.push_back(d);
    if (n == 128) {
      const WaveFunction moved = apply_gauge_phase(rb.eigenvectors[0], gamma, spec.params);
      overlap = std::abs(weighted_inner_product(ra.eigenvectors[0], moved, Ha.measure));
    }
  }
  CheckResult a = make_check(4, "gauge-spectrum-order",
                "cylinder B0=0.3, B1=0.5, two gauges: eigenvalue gap convergence order");
  a.threshold = 1.7;
  const double o1 = std::log2(diffs[0] / diffs[1]);
  const double o2 = std::log2(diffs[1] / diffs[2]);
  a.measured = std::min(o1, o2);
  a.passed = a.measured >= a.threshold;
  a.detail = "max |dE| at 32,64,128: " + fmt(diffs[0]) + ", " + fmt(diffs[1]) + ", " +
             fmt(diffs[2]) + "; orders " + fmt(o1) + ", " + fmt(o2);
  out.push_back(a);

  CheckResult b = make_check(4, "gauge-eigenvector-overlap",
                "ground state overlap after the paired phase transform, 128x128");
  b.threshold = 1.0 - 1e-6;
  b.measured = overlap;
  b.passed = overlap >= b.threshold;
  b.detail = "1 - overlap = " + fmt(1.0 - overlap);
  out.push_back(b);
}

// 5. Geometric potential at every node.
void geometric_potential_check(std::uint64_t, std::vector<CheckResult>& out) {
  for (auto kind : {SystemKind::sphere, SystemKind::cylinder, SystemKind::torus}) {
    SystemSpec spec;
    spec.kind = kind;
    const SurfaceChart chart = system_chart(spec);
    const Grid grid = system_grid(spec, 32, 32);
    const auto geo = sample_geometry(chart, grid, spec.params);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Coord2 q = grid.coord2(i);
      double exact = 0.0;
      if (kind == SystemKind::cylinder) exact = -1.0 / (8.0 * spec.r * spec.r);
      if (kind == SystemKind::torus) {
        const double W = spec.R + spec.r * std::cos(q.q1);
        exact = -0.5 * std::pow(spec.R / (2.0 * spec.r * W), 2);
      }
      worst = std::max(worst, std::abs(geo.nodes[i].v_s - exact));
    }
    CheckResult c = make_check(5, "geometric-potential-" + to_string(kind),
                  "V_S at every node of a 32x32 " + to_string(kind) + " grid");
    c.threshold = 1e-12;
    c.measured = worst;
    c.passed = worst <= c.threshold;
    c.detail = "max |V_S - closed form|";
    out.push_back(c);
  }
}

// 6. Adapted metric against the finite-difference metric of R = r + q3 n.
void adapted_metric_check(std::uint64_t seed, std::vector<CheckResult>& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Case {
    SurfaceChart chart;
    std::array<Interval, 2> sample;
  };
  const std::vector<Case> cases{
      {charts::sphere(1.0), {Interval{0.2, kPi - 0.2}, Interval{0.0, 2 * kPi}}},
      {charts::cylinder(1.0, 10.0), {Interval{0.0, 2 * kPi}, Interval{-4.0, 4.0}}},
      {charts::torus(2.0, 1.0), {Interval{0.0, 2 * kPi}, Interval{0.0, 2 * kPi}}},
      {charts::bent_sheet(0.5, {0.0, 2.0}, {0.0, 1.0}), {Interval{0.1, 1.9}, Interval{0.1, 0.9}}},
  };
  double worst_metric = 0.0, worst_det = 0.0;
  int samples = 0;
  for (const auto& cs : cases) {
    for (int s = 0; s < 50; ++s) {
      const Coord2 q{cs.sample[0].min + unit(rng) * cs.sample[0].span(),
                     cs.sample[1].min + unit(rng) * cs.sample[1].span()};
      const GeometryPointData gp = weingarten_at(cs.chart, q);
      const double kappa = std::max(gp.max_abs_curvature(), 1e-12);
      const double q3 = (2.0 * unit(rng) - 1.0) * 0.05 / kappa;
      const Mat3 G = adapted_metric_at(cs.chart, q, q3).G;

      std::array<Vec3, 3> dR;
      for (int a = 0; a < 2; ++a) {
        const double h = 1e-5 * std::max(1.0, std::abs(q[a]));
        Coord2 qp = q, qm = q;
        qp[a] += h;
        qm[a] -= h;
        dR[a] = (adapted_point(cs.chart, qp, q3) - adapted_point(cs.chart, qm, q3)) / (2 * h);
      }
      dR[2] = gp.normal;
      Mat3 G_fd;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) G_fd(i, j) = dR[i].dot(dR[j]);
      }
      worst_metric = std::max(worst_metric, (G - G_fd).cwiseAbs().maxCoeff() /
                                                G_fd.cwiseAbs().maxCoeff());
      const double f = rescale_factor(gp, q3);
      const double expect = f * f * gp.g.determinant();
      worst_det = std::max(worst_det, std::abs(G.determinant() - expect) / std::abs(expect));
      ++samples;
    }
  }
  CheckResult a = make_check(6, "adapted-metric-fd",
                "adapted metric vs finite-difference metric of r + q3 n, |q3| <= 0.05/max|k|");
  a.threshold = 1e-6;
  a.measured = worst_metric;
  a.passed = worst_metric <= a.threshold;
  a.detail = std::to_string(samples) + " random points on sphere, cylinder, torus, bent sheet";
  out.push_back(a);

  CheckResult b = make_check(6, "adapted-metric-determinant", "det G = f^2 det g");
  b.threshold = 1e-10;
  b.measured = worst_det;
  b.passed = worst_det <= b.threshold;
  b.detail = "max relative deviation over the same points";
  out.push_back(b);
}

// 7. The field term does not see the Weingarten matrix.
void no_coupling(std::uint64_t, std::vector<CheckResult>& out) {
  const Interval q1{0.0, 1.0}, q2{0.0, 1.0};
  const SurfaceChart plane = charts::plane(q1, q2);
  const SurfaceChart bent = charts::bent_sheet(0.5, q1, q2);
  const Grid grid = build_grid(plane, 24, 24);
  SurfacePotential sp = SurfacePotential::zero(grid);
  sp.gauge_tag = "test";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Coord2 q = grid.coord2(i);
    sp.a1[i] = 0.8 * std::sin(2 * kPi * q.q2) + 0.3 * q.q1;
    sp.a2[i] = 0.5 * q.q1 * q.q1 - 0.2;
    sp.v[i] = 0.1 * q.q1 * q.q2;
  }
  const PhysicalParams params;
  const auto geo_p = sample_geometry(plane, grid, params);
  const auto geo_b = sample_geometry(bent, grid, params);
  double curvature = 0.0;
  for (const auto& gp : geo_b.nodes) curvature = std::max(curvature, gp.max_abs_curvature());
  const SurfacePotential none = SurfacePotential::zero(grid);
  for (auto scheme : {MagneticScheme::symmetrized_central, MagneticScheme::peierls}) {
    AssemblyOptions o;
    o.scheme = scheme;
    const SparseC dp = assemble_surface_hamiltonian(geo_p, sp, params, o).matrix -
                       assemble_surface_hamiltonian(geo_p, none, params, o).matrix;
    const SparseC db = assemble_surface_hamiltonian(geo_b, sp, params, o).matrix -
                       assemble_surface_hamiltonian(geo_b, none, params, o).matrix;
    CheckResult c = make_check(7, "no-coupling-" + to_string(scheme),
                  "H(alpha,A) - H(alpha,0): plane vs bent sheet (" + to_string(scheme) + ")");
    c.threshold = 1e-12;
    c.measured = max_relative_difference(db, dp);
    c.passed = c.measured <= c.threshold;
    c.detail = "bent sheet curvature " + fmt(curvature) + ", same metric";
    out.push_back(c);
  }
}

// 8. Hermiticity of all acceptance operators and Crank-Nicolson conservation.
void unitarity(std::uint64_t seed, std::vector<CheckResult>& out) {
  std::vector<std::pair<std::string, HamiltonianOperator>> ops;
  {
    SystemSpec s;
    ops.emplace_back("sphere 64x128", generic_system_hamiltonian(s, system_grid(s, 64, 128)));
  }
  for (double flux : {0.25, 0.5}) {
    SystemSpec s;
    s.kind = SystemKind::cylinder;
    s.B0 = 2 * flux;
    AssemblyOptions o;
    o.scheme = MagneticScheme::peierls;
    ops.emplace_back("cylinder peierls flux " + fmt(flux),
                     generic_system_hamiltonian(
                         s, system_grid(s, 64, 64, {std::nullopt, Boundary::periodic}), o));
  }
  for (auto kind : {SystemKind::sphere, SystemKind::cylinder, SystemKind::torus}) {
    SystemSpec s;
    s.kind = kind;
    s.L = 4.0;
    s.B = 0.7;
    s.B0 = 0.6;
    s.B1 = 0.4;
    const Grid g = system_grid(s, 32, 32);
    ops.emplace_back("reference " + to_string(kind), reference_hamiltonian(s, g));
    ops.emplace_back("generic " + to_string(kind), generic_system_hamiltonian(s, g));
  }
  {
    SystemSpec s;
    s.kind = SystemKind::torus;
    s.B0 = 0.2;
    ops.emplace_back("torus B0=0.2 64x64", generic_system_hamiltonian(s, system_grid(s, 64, 64)));
  }
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, H] : ops) {
    const double d = hermiticity_defect(H);
    if (d >= worst) {
      worst = d;
      worst_name = name;
    }
  }
  CheckResult h = make_check(8, "hermiticity", "weighted Hermiticity defect of every acceptance operator");
  h.threshold = 1e-12;
  h.measured = worst;
  h.passed = worst <= h.threshold;
  h.detail = std::to_string(ops.size()) + " operators, largest on " + worst_name;
  out.push_back(h);

  SystemSpec s;
  s.kind = SystemKind::torus;
  s.B0 = 0.2;
  s.B1 = 0.3;
  const Grid grid = system_grid(s, 32, 32);
  const auto H = generic_system_hamiltonian(s, grid);
  WaveFunction psi{grid, VectorC(static_cast<Eigen::Index>(grid.size()))};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double c1 = 2 * kPi * unit(rng), c2 = 2 * kPi * unit(rng);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Coord2 q = grid.coord2(i);
    const double d1 = std::remainder(q.q1 - c1, 2 * kPi);
    const double d2 = std::remainder(q.q2 - c2, 2 * kPi);
    psi.values[static_cast<Eigen::Index>(i)] =
        std::exp(-(d1 * d1 + d2 * d2) / (2 * 0.4 * 0.4)) * std::polar(1.0, 2.0 * d1 + 1.0 * d2);
  }
  psi.values /= weighted_norm(psi, H.measure);
  const auto trace = propagate_cn(H, psi, 0.01, 1000);
  double norm_drift = 0.0, energy_drift = 0.0;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    norm_drift = std::max(norm_drift, std::abs(trace.norms[i] - 1.0));
    energy_drift = std::max(energy_drift, std::abs(trace.energies[i] - trace.energies[0]) /
                                              std::abs(trace.energies[0]));
  }
  CheckResult n = make_check(8, "cn-norm-drift", "Crank-Nicolson norm drift over 1000 steps (torus, tilted B)");
  n.threshold = 1e-10;
  n.measured = norm_drift;
  n.passed = norm_drift <= n.threshold;
  n.detail = "dt=0.01, 32x32, moving Gaussian; max solve residual " + fmt(trace.max_solve_residual);
  out.push_back(n);

  CheckResult e = make_check(8, "cn-energy-drift", "Crank-Nicolson <H> relative drift over 1000 steps");
  e.threshold = 1e-8;
  e.measured = energy_drift;
  e.passed = energy_drift <= e.threshold;
  e.detail = "<H>(0) = " + fmt(trace.energies[0]);
  out.push_back(e);
}

// 9. Torus against the separated 1D oracle.
void torus_spectrum(std::uint64_t seed, std::vector<CheckResult>& out) {
  for (double B0 : {0.0, 0.2}) {
    SystemSpec spec;
    spec.kind = SystemKind::torus;
    spec.B0 = B0;
    const auto H = generic_system_hamiltonian(spec, system_grid(spec, 64, 64));
    EigenOptions opt;
    opt.seed = seed;
    const auto res = eigensolve_lowest(H, 10, opt);
    const auto oracle = oracle_spectrum(spec, 10);
    double worst = 0.0;
    int worst_i = 0;
    for (int i = 0; i < 10; ++i) {
      const double e = level_error(res.eigenvalues[i], oracle[i], 0.125);
      if (e > worst) {
        worst = e;
        worst_i = i;
      }
    }
    CheckResult c = make_check(9, B0 == 0.0 ? "torus-free" : "torus-axial-field",
                  "torus R=2, r=1, 64x64, B0=" + fmt(B0) + ": lowest 10 vs 1D oracle");
    c.threshold = 0.005;
    c.measured = worst;
    c.passed = worst <= c.threshold;
    c.detail = "worst at level " + std::to_string(worst_i) + ": " + fmt(res.eigenvalues[worst_i]) +
               " vs " + fmt(oracle[worst_i]) + " (floor 1/8)";
    out.push_back(c);
  }
}

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> table{
      {"sphere-spectrum", sphere_spectrum},
      {"cylinder-ab", cylinder_ab},
      {"reference-operators", reference_operators},
      {"gauge-invariance", gauge_invariance},
      {"geometric-potential", geometric_potential_check},
      {"adapted-metric", adapted_metric_check},
      {"no-coupling", no_coupling},
      {"unitarity", unitarity},
      {"torus-spectrum", torus_spectrum},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& validation_suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"all"};
    for (const auto& [name, fn] : suites()) n.push_back(name);
    return n;
  }();
  return names;
}

ValidationReport run_validation(const std::string& suite, std::uint64_t seed, std::ostream* log) {
  const auto& names = validation_suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw ConfigError("unknown validation suite '" + suite + "'");
  }
  ValidationReport report;
  report.suite = suite;
  report.seed = seed;
  for (const auto& [name, fn] : suites()) {
    if (suite != "all" && suite != name) continue;
    const auto start = std::chrono::steady_clock::now();
    std::vector<CheckResult> checks;
    try {
      fn(seed, checks);
    } catch (const Error& e) {
      CheckResult c = make_check(0, name, "suite raised an error");
      c.detail = e.what();
      checks.push_back(c);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& c : checks) {
      c.seconds = secs;
      if (log) {
        *log << (c.passed ? "PASS " : "FAIL ") << c.id << ": measured " << fmt(c.measured)
             << ", threshold " << fmt(c.threshold) << "\n";
      }
    }
    report.checks.insert(report.checks.end(), checks.begin(), checks.end());
  }
  return report;
}

void write_validation_json(const ValidationReport& report, const std::string& config_hash,
                           std::ostream& out) {
  Json j;
  j["generated_at"] = utc_timestamp();
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["config_hash"] = config_hash;
  j["passed"] = report.passed();
  j["checks"] = Json::array();
  for (const auto& c : report.checks) {
    Json check;
    check["criterion"] = c.criterion;
    check["id"] = c.id;
    check["title"] = c.title;
    check["passed"] = c.passed;
    check["measured"] = c.measured;
    check["threshold"] = c.threshold;
    check["detail"] = c.detail;
    j["checks"].push_back(check);
  }
  out << json_text(j);
}

}  // namespace curvedq
