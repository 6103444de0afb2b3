#include "curvedq/run.hpp"

#include "curvedq/errors.hpp"
#include "curvedq/expression.hpp"
#include "curvedq/output.hpp"
#include "curvedq/solvers.hpp"
#include "curvedq/validation.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

namespace curvedq {

SurfaceChart make_chart(const RunConfig& c) {
  if (c.surface == "sphere") return charts::sphere(c.r);
  if (c.surface == "cylinder") return charts::cylinder(c.r, c.L);
  if (c.surface == "torus") return charts::torus(c.R, c.r);
  if (c.surface == "plane") return charts::plane(c.q1, c.q2);
  if (c.surface == "bent-sheet") return charts::bent_sheet(c.bend_radius, c.q1, c.q2);
  if (c.surface == "custom") {
    std::array<Expression, 3> xyz{Expression::parse(c.custom_xyz[0], {"q1", "q2"}),
                                  Expression::parse(c.custom_xyz[1], {"q1", "q2"}),
                                  Expression::parse(c.custom_xyz[2], {"q1", "q2"})};
    auto map = [xyz](double q1, double q2) {
      return Vec3(xyz[0]({q1, q2}), xyz[1]({q1, q2}), xyz[2]({q1, q2}));
    };
    return SurfaceChart("custom", map, {c.q1, c.q2}, c.custom_periodic);
  }
  throw ConfigError("unknown surface '" + c.surface + "'");
}

CartesianPotential make_potential(const RunConfig& c) {
  CartesianPotential cp = uniform_field_potential(c.B, gauge_from_string(c.gauge));
  if (!c.E.isZero()) cp = with_uniform_electric_field(cp, c.E);
  return cp;
}

SurfacePotential make_surface_potential(const RunConfig& c, const SurfaceChart& chart,
                                        const Grid& grid) {
  SurfacePotential sp = normal_gauge_fix(chart, make_potential(c), grid);
  const Expression V = Expression::parse(c.V, {"x", "y", "z", "q1", "q2"});
  // x, y, z and V are given in the input units.
  const double ell = c.units.si ? c.units.length : 1.0;
  const double scale = c.units.si ? 1.0 / c.units.potential : 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Coord2 q = grid.coord2(i);
    const Vec3 x = chart.point(q) * ell;
    sp.v[i] += scale * V({x[0], x[1], x[2], q.q1, q.q2});
  }
  return sp;
}

HamiltonianOperator make_hamiltonian(const RunConfig& c, const SurfaceChart& chart,
                                     const Grid& grid) {
  const auto geo = sample_geometry(chart, grid, c.params);
  AssemblyOptions options;
  options.scheme = c.scheme;
  return assemble_surface_hamiltonian(geo, make_surface_potential(c, chart, grid), c.params,
                                      options);
}

namespace {

std::string csv_header(const RunConfig& c, const std::string& columns) {
  return "# curvedq config_hash=" + c.config_hash + "\n" + columns + "\n";
}

std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

Json units_json(const RunConfig& c) {
  Json u;
  u["system"] = c.units.si ? "si" : "dimensionless";
  u["mass"] = c.params.mass;
  u["charge"] = c.params.charge;
  u["hbar"] = c.params.hbar;
  if (c.units.si) {
    u["length_unit_m"] = c.units.length;
    u["energy_unit_joule"] = c.units.energy;
    u["time_unit_s"] = c.units.time;
  }
  return u;
}

Json grid_json(const Grid& grid) {
  Json g;
  g["n"] = {grid.axis(0).n, grid.axis(1).n};
  g["bc"] = {to_string(grid.axis(0).bc), to_string(grid.axis(1).bc)};
  return g;
}

std::string wavefunction_csv(const RunConfig& c, const WaveFunction& psi,
                             const std::vector<double>& measure) {
  std::ostringstream s;
  s << csv_header(c, "q1,q2,re,im,abs2,sqrt_g");
  for (std::size_t i = 0; i < psi.grid.size(); ++i) {
    const Coord2 q = psi.grid.coord2(i);
    const Complex z = psi.values[static_cast<Eigen::Index>(i)];
    s << format_double(q.q1) << ',' << format_double(q.q2) << ',' << format_double(z.real())
      << ',' << format_double(z.imag()) << ',' << format_double(std::norm(z)) << ','
      << format_double(measure[i]) << '\n';
  }
  return s.str();
}

void geometry_task(const RunConfig& c, RunOutcome& out) {
  const SurfaceChart chart = make_chart(c);
  const Grid grid = build_grid(chart, c.n1, c.n2, c.bc);
  const auto geo = sample_geometry(chart, grid, c.params);
  std::ostringstream s;
  s << csv_header(c, "q1,q2,V_S,K,M,sqrt_g");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Coord2 q = grid.coord2(i);
    const auto& gp = geo.nodes[i];
    s << format_double(q.q1) << ',' << format_double(q.q2) << ',' << format_double(gp.v_s) << ','
      << format_double(gp.gauss_curv) << ',' << format_double(gp.mean_curv) << ','
      << format_double(gp.sqrt_g) << '\n';
  }
  const std::string path = path_in(c, "geometry.csv");
  write_text_file(path, s.str());
  out.files.push_back(path);
}

void spectrum_task(const RunConfig& c, RunOutcome& out, std::ostream* log) {
  const SurfaceChart chart = make_chart(c);
  const Grid grid = build_grid(chart, c.n1, c.n2, c.bc);
  const auto H = make_hamiltonian(c, chart, grid);
  EigenOptions opt;
  opt.seed = c.seed;
  const auto res = eigensolve_lowest(H, c.k, opt);
  if (log) *log << "solved " << c.k << " levels with " << res.solver_tag << "\n";

  std::ostringstream js;
  {
    Json j;
    j["config_hash"] = c.config_hash;
    j["surface"] = c.surface;
    j["grid"] = grid_json(grid);
    j["scheme"] = to_string(c.scheme);
    j["gauge_tag"] = make_surface_potential(c, chart, grid).gauge_tag;
    j["units"] = units_json(c);
    j["solver"] = res.solver_tag;
    j["hermiticity_defect"] = hermiticity_defect(H);
    j["eigenvalues"] = res.eigenvalues;
    j["residuals"] = res.residuals;
    j["degeneracy_groups"] = degeneracy_groups(res.eigenvalues);
    js << json_text(j);
  }
  const std::string json_path = path_in(c, "spectrum.json");
  if (c.format != "csv") {
    write_text_file(json_path, js.str());
    out.files.push_back(json_path);
  }
  if (c.format != "json") {
    std::ostringstream s;
    s << csv_header(c, "index,energy,residual");
    for (std::size_t i = 0; i < res.eigenvalues.size(); ++i) {
      s << i << ',' << format_double(res.eigenvalues[i]) << ',' << format_double(res.residuals[i])
        << '\n';
    }
    const std::string path = path_in(c, "spectrum.csv");
    write_text_file(path, s.str());
    out.files.push_back(path);
  }
  const int nwf = std::min<int>(c.wavefunctions, static_cast<int>(res.eigenvectors.size()));
  for (int j = 0; j < nwf; ++j) {
    const std::string path = path_in(c, "wavefunction_" + std::to_string(j) + ".csv");
    write_text_file(path, wavefunction_csv(c, res.eigenvectors[j], H.measure));
    out.files.push_back(path);
  }
}

WaveFunction initial_state(const RunConfig& c, const HamiltonianOperator& H) {
  if (c.initial == "gaussian") {
    WaveFunction psi{H.grid, VectorC(static_cast<Eigen::Index>(H.grid.size()))};
    for (std::size_t i = 0; i < H.grid.size(); ++i) {
      const Coord2 q = H.grid.coord2(i);
      std::array<double, 2> d{};
      for (int a = 0; a < 2; ++a) {
        d[a] = q[a] - c.center[a];
        const GridAxis& ax = H.grid.axis(a);
        if (ax.bc == Boundary::periodic) d[a] = std::remainder(d[a], ax.range.span());
      }
      psi.values[static_cast<Eigen::Index>(i)] =
          std::exp(-(d[0] * d[0] + d[1] * d[1]) / (2.0 * c.width * c.width)) *
          std::polar(1.0, c.momentum[0] * d[0] + c.momentum[1] * d[1]);
    }
    const double norm = weighted_norm(psi, H.measure);
    if (!(norm > 0.0)) throw TaskError("initial Gaussian vanishes on the grid");
    psi.values /= norm;
    return psi;
  }
  int j = 0;
  if (c.initial != "ground") {
    try {
      j = std::stoi(c.initial.substr(std::string("eigenstate:").size()));
    } catch (const std::exception&) {
      throw ConfigError("task.initial: cannot read eigenstate index in '" + c.initial + "'");
    }
    if (j < 0) throw ConfigError("task.initial: eigenstate index must be non-negative");
  }
  EigenOptions opt;
  opt.seed = c.seed;
  auto res = eigensolve_lowest(H, j + 1, opt);
  return res.eigenvectors[j];
}

void evolve_task(const RunConfig& c, RunOutcome& out) {
  const SurfaceChart chart = make_chart(c);
  const Grid grid = build_grid(chart, c.n1, c.n2, c.bc);
  const auto H = make_hamiltonian(c, chart, grid);
  const WaveFunction psi0 = initial_state(c, H);

  std::vector<ObservableSpec> obs(2);
  for (int a = 0; a < 2; ++a) {
    obs[a].name = a == 0 ? "<q1>" : "<q2>";
    obs[a].kind = ObservableKind::position;
    obs[a].values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) obs[a].values[i] = grid.coord2(i)[a];
  }
  EvolutionOptions opt;
  opt.stride = c.stride;
  if (c.wavefunctions > 0) opt.snapshot_stride = std::max(1, c.steps);
  const auto trace = propagate_cn(H, psi0, c.dt, c.steps, obs, opt);
  out.warnings.insert(out.warnings.end(), trace.warnings.begin(), trace.warnings.end());

  const double t_unit = c.units.si ? c.units.time : 1.0;
  std::ostringstream s;
  s << csv_header(c, "t,norm,energy,<q1>,<q2>");
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    s << format_double(trace.times[i] * t_unit) << ',' << format_double(trace.norms[i]) << ','
      << format_double(trace.energies[i]) << ',' << format_double(trace.observables[0][i]) << ','
      << format_double(trace.observables[1][i]) << '\n';
  }
  const std::string path = path_in(c, "trace.csv");
  write_text_file(path, s.str());
  out.files.push_back(path);

  if (c.format != "csv") {
    std::ostringstream js;
    {
      Json j;
      j["config_hash"] = c.config_hash;
      j["surface"] = c.surface;
      j["grid"] = grid_json(grid);
      j["scheme"] = to_string(c.scheme);
      j["units"] = units_json(c);
      j["dt"] = c.dt * t_unit;
      j["steps"] = c.steps;
      j["initial"] = c.initial;
      j["max_solve_residual"] = trace.max_solve_residual;
      double drift = 0.0;
      for (double n : trace.norms) drift = std::max(drift, std::abs(n - 1.0));
      j["max_norm_drift"] = drift;
      j["warnings"] = trace.warnings;
      js << json_text(j);
    }
    const std::string jpath = path_in(c, "evolution.json");
    write_text_file(jpath, js.str());
    out.files.push_back(jpath);
  }
  if (c.wavefunctions > 0) {
    const std::string wpath = path_in(c, "wavefunction_final.csv");
    write_text_file(wpath, wavefunction_csv(c, trace.snapshots.back(), H.measure));
    out.files.push_back(wpath);
  }
}

void validate_task(const RunConfig& c, RunOutcome& out, std::ostream* log) {
  const ValidationReport report = run_validation(c.suite, c.seed, log);
  std::ostringstream js;
  write_validation_json(report, c.config_hash, js);
  const std::string path = path_in(c, "validation.json");
  write_text_file(path, js.str());
  out.files.push_back(path);
  if (!report.passed()) out.exit_code = 1;
}

}  // namespace

RunOutcome run_task(const RunConfig& c, std::ostream* log) {
  RunOutcome out;
  try {
    switch (c.task) {
      case TaskKind::geometry:
        geometry_task(c, out);
        break;
      case TaskKind::spectrum:
        spectrum_task(c, out, log);
        break;
      case TaskKind::evolve:
        evolve_task(c, out);
        break;
      case TaskKind::validate:
        validate_task(c, out, log);
        break;
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw TaskError(to_string(c.task) + " task failed: " + e.what());
  }
  return out;
}

}  // namespace curvedq
