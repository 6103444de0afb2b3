#pragma once

// Validation suites: analytic-oracle and property checks run by
// `curvedq validate` and by the acceptance test.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace curvedq {

struct CheckResult {
  int criterion = 0;
  std::string id;
  std::string title;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  /// Wall time; kept out of serialized reports so they stay reproducible.
  double seconds = 0.0;
};

struct ValidationReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// Suite names accepted by run_validation, "all" first.
const std::vector<std::string>& validation_suite_names();

/// Throws ConfigError for an unknown suite. Progress lines go to `log` when given.
ValidationReport run_validation(const std::string& suite, std::uint64_t seed,
                                std::ostream* log = nullptr);

/// validation.json; `generated_at` is the only time-dependent line.
void write_validation_json(const ValidationReport& report, const std::string& config_hash,
                           std::ostream& out);

}  // namespace curvedq
