#include "cli.hpp"

#include "curvedq/config.hpp"
#include "curvedq/errors.hpp"
#include "curvedq/run.hpp"
#include "curvedq/validation.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace curvedq {

namespace {

void apply_thread_cap() {
  if (const char* env = std::getenv("CURVEDQ_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) Eigen::setNbThreads(n);
  }
}

std::vector<double> split_numbers(const std::string& text, char sep, const std::string& what) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot read '" + text + "'");
    }
  }
  return xs;
}

struct CommonOptions {
  std::optional<std::string> output_dir;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  bool verbose = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--output-dir", output_dir, "Directory for result files");
    cmd->add_option("--format", format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    cmd->add_option("--seed", seed, "Seed for randomized checks and starting vectors");
    cmd->add_flag("--verbose", verbose, "Progress on stderr");
  }

  void apply(ConfigDocument& doc) const {
    if (output_dir) doc.set("output.dir", *output_dir);
    if (format) doc.set("output.format", *format);
    if (seed) doc.set("output.seed", static_cast<double>(*seed));
    if (verbose) doc.set("output.verbose", true);
  }
};

int execute(const ConfigDocument& doc, std::ostream& out, std::ostream& err) {
  const RunConfig config = interpret_config(doc);
  const RunOutcome outcome = run_task(config, config.verbose ? &err : nullptr);
  for (const auto& w : outcome.warnings) err << "curvedq: warning: " << w << "\n";
  for (const auto& f : outcome.files) out << f << "\n";
  if (outcome.exit_code != 0) err << "curvedq: validation failed\n";
  return outcome.exit_code;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Charged particle on a curved surface: geometry, spectra, evolution"};
  app.require_subcommand(1);

  std::string config_path;
  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Execute the task described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  run_opts.add_to(run);

  std::string suite = "all";
  CommonOptions val_opts;
  auto* validate = app.add_subcommand("validate", "Run validation suites");
  validate->add_option("--suite", suite, "Suite name")
      ->check(CLI::IsMember(validation_suite_names()));
  val_opts.add_to(validate);

  std::string surface = "sphere", field = "0,0,0", n = "64x64", gauge = "symmetric",
              scheme = "central";
  std::optional<double> r, R, L;
  int k = 10;
  int wavefunctions = 1;
  CommonOptions spec_opts;
  auto* spectrum = app.add_subcommand("spectrum", "Lowest eigenvalues of a builtin surface");
  spectrum->add_option("--surface", surface, "sphere, cylinder, torus, plane or bent-sheet");
  spectrum->add_option("--r", r, "Radius (tube radius for the torus)");
  spectrum->add_option("--R", R, "Torus major radius");
  spectrum->add_option("--L", L, "Cylinder length");
  spectrum->add_option("--B", field, "Uniform field Bx,By,Bz");
  spectrum->add_option("--k", k, "Number of levels");
  spectrum->add_option("--n", n, "Grid size n1xn2");
  spectrum->add_option("--gauge", gauge, "symmetric, landau-x, landau-y or landau-z");
  spectrum->add_option("--scheme", scheme, "central or peierls");
  spectrum->add_option("--wavefunctions", wavefunctions, "Eigenvectors written as CSV");
  spec_opts.add_to(spectrum);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  apply_thread_cap();
  try {
    if (*run) {
      ConfigDocument doc = ConfigDocument::load(config_path);
      run_opts.apply(doc);
      return execute(doc, out, err);
    }
    if (*validate) {
      ConfigDocument doc;
      doc.set("task.kind", std::string("validate"));
      doc.set("task.suite", suite);
      val_opts.apply(doc);
      return execute(doc, out, err);
    }
    ConfigDocument doc;
    doc.set("task.kind", std::string("spectrum"));
    doc.set("surface.name", surface);
    if (r) doc.set("surface.r", *r);
    if (R) doc.set("surface.R", *R);
    if (L) doc.set("surface.L", *L);
    const auto B = split_numbers(field, ',', "--B");
    if (B.size() != 3) throw ConfigError("--B: expected three components Bx,By,Bz");
    doc.set("field.B", B);
    doc.set("field.gauge", gauge);
    doc.set("grid.scheme", scheme);
    const auto sizes = split_numbers(n, 'x', "--n");
    if (sizes.size() != 2) throw ConfigError("--n: expected n1xn2");
    doc.set("grid.n", sizes);
    doc.set("task.k", static_cast<double>(k));
    doc.set("output.wavefunctions", static_cast<double>(wavefunctions));
    spec_opts.apply(doc);
    return execute(doc, out, err);
  } catch (const ConfigError& e) {
    err << "curvedq: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "curvedq: error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace curvedq
