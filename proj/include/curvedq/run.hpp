#pragma once

// Task pipelines behind `curvedq run`: build the chart, grid, potential and
// Hamiltonian a RunConfig describes, execute the task and write its files.

#include "curvedq/config.hpp"
#include "curvedq/discretization.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace curvedq {

SurfaceChart make_chart(const RunConfig& config);

/// Uniform B in the configured gauge plus the uniform E field.
CartesianPotential make_potential(const RunConfig& config);

/// Normal-gauge surface potential with the V expression added to v.
SurfacePotential make_surface_potential(const RunConfig& config, const SurfaceChart& chart,
                                        const Grid& grid);

HamiltonianOperator make_hamiltonian(const RunConfig& config, const SurfaceChart& chart,
                                     const Grid& grid);

struct RunOutcome {
  /// 0 on success, 1 when a validation check failed.
  int exit_code = 0;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

/// Runs the configured task. Module errors propagate; anything else that
/// goes wrong while running is reported as TaskError.
RunOutcome run_task(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace curvedq
