#pragma once

// Lowest eigenpairs, Crank-Nicolson propagation and expectation values for
// operators assembled by the discretization module.

#include "curvedq/discretization.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace curvedq {

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<WaveFunction> eigenvectors;
  /// ||H psi - E psi||_W for each pair.
  std::vector<double> residuals;
  std::string solver_tag;
  int iterations = 0;
};

struct EigenOptions {
  /// Problems up to this size are solved densely.
  std::size_t dense_threshold = 1100;
  /// Residual tolerance relative to max(1, |E|).
  double tolerance = 1e-8;
  int max_iterations = 400;
  std::uint64_t seed = 7;
};

/// k lowest eigenpairs of H, computed on A = W^1/2 H W^-1/2. Above the dense
/// threshold a shift-invert block Krylov iteration with full
/// reorthogonalization is used, shifted below a Gershgorin bound.
SpectrumResult eigensolve_lowest(const HamiltonianOperator& H, int k,
                                 const EigenOptions& options = {});

/// Sizes of runs of eigenvalues whose consecutive relative gap is below `rel_gap`.
std::vector<int> degeneracy_groups(const std::vector<double>& eigenvalues, double rel_gap = 1e-8);

/// Lower and upper Gershgorin bounds of the spectrum of H.
std::pair<double, double> gershgorin_bounds(const HamiltonianOperator& H);

enum class ObservableKind {
  energy,
  /// Multiplication by a real function sampled at the nodes.
  position,
  /// -i hbar d_axis; spectral on periodic axes, central difference otherwise.
  canonical_momentum,
  /// (1/m)(-i hbar d_axis - Q A_axis), with A_axis sampled at the nodes.
  current,
};

struct ObservableSpec {
  std::string name;
  ObservableKind kind = ObservableKind::energy;
  int axis = 0;
  std::vector<double> values;
};

/// <psi|O|psi>_W; psi need not be normalized.
Complex expectation_value(const HamiltonianOperator& H, const WaveFunction& psi,
                          const ObservableSpec& observable);

/// -i hbar d_axis psi at every node.
VectorC canonical_momentum(const Grid& grid, const VectorC& psi, int axis, double hbar);

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> energies;
  std::vector<std::string> observable_names;
  /// series[j][i] = Re <O_j> at times[i]
  std::vector<std::vector<double>> observables;
  std::vector<WaveFunction> snapshots;
  std::vector<std::string> warnings;
  double max_solve_residual = 0.0;
};

struct EvolutionOptions {
  /// Record every `stride` steps (and always the last step).
  int stride = 1;
  /// Store a snapshot every `snapshot_stride` steps; 0 disables snapshots.
  int snapshot_stride = 0;
  double solve_tolerance = 1e-12;
};

/// Crank-Nicolson: (I + i dt H / 2hbar) psi_{n+1} = (I - i dt H / 2hbar) psi_n.
EvolutionTrace propagate_cn(const HamiltonianOperator& H, const WaveFunction& psi0, double dt,
                            int steps, const std::vector<ObservableSpec>& observables = {},
                            const EvolutionOptions& options = {});

}  // namespace curvedq
