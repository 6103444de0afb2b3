#include "curvedq/solvers.hpp"

#include "curvedq/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace curvedq {

namespace {

using MatrixC = Eigen::MatrixXcd;

/// Rotates the phase so the largest component is real and positive.
void fix_phase(Eigen::Ref<VectorC> v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (std::abs(v[imax]) > 0.0) v *= std::conj(v[imax]) / std::abs(v[imax]);
}

SparseC symmetrized(const HamiltonianOperator& H, const Eigen::VectorXd& sqrt_w) {
  const SparseC A0 = sqrt_w.cast<Complex>().asDiagonal() * H.matrix *
                     sqrt_w.cwiseInverse().cast<Complex>().asDiagonal();
  const SparseC adj = A0.adjoint();
  SparseC A = 0.5 * (A0 + adj);
  A.makeCompressed();
  return A;
}

MatrixC orthonormal_basis(const MatrixC& V) {
  Eigen::HouseholderQR<MatrixC> qr(V);
  return qr.householderQ() * MatrixC::Identity(V.rows(), V.cols());
}

SpectrumResult finish(const HamiltonianOperator& H, const Eigen::VectorXd& sqrt_w,
                      const Eigen::VectorXd& theta, const MatrixC& Y, const SparseC& A, int k,
                      std::string tag, int iterations) {
  SpectrumResult out;
  out.solver_tag = std::move(tag);
  out.iterations = iterations;
  for (int j = 0; j < k; ++j) {
    VectorC y = Y.col(j);
    fix_phase(y);
    out.eigenvalues.push_back(theta[j]);
    out.residuals.push_back((A * y - theta[j] * y).norm());
    out.eigenvectors.push_back(
        WaveFunction{H.grid, (y.array() / sqrt_w.cast<Complex>().array()).matrix()});
  }
  return out;
}

}  // namespace

std::pair<double, double> gershgorin_bounds(const HamiltonianOperator& H) {
  // Row discs of H; H is similar to a Hermitian matrix so the spectrum is real.
  const SparseC rows = H.matrix.transpose();  // column-major access to rows of H
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
    double center = 0.0, radius = 0.0;
    for (SparseC::InnerIterator it(rows, r); it; ++it) {
      if (it.index() == r) {
        center = it.value().real();
        radius += std::abs(it.value().imag());
      } else {
        radius += std::abs(it.value());
      }
    }
    lo = std::min(lo, center - radius);
    hi = std::max(hi, center + radius);
  }
  return {lo, hi};
}

std::vector<int> degeneracy_groups(const std::vector<double>& eigenvalues, double rel_gap) {
  std::vector<int> groups;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const bool joins = i > 0 && std::abs(eigenvalues[i] - eigenvalues[i - 1]) <=
                                    rel_gap * std::max(1.0, std::abs(eigenvalues[i]));
    if (joins) {
      ++groups.back();
    } else {
      groups.push_back(1);
    }
  }
  return groups;
}

SpectrumResult eigensolve_lowest(const HamiltonianOperator& H, int k, const EigenOptions& options) {
  const auto N = static_cast<Eigen::Index>(H.grid.size());
  if (k <= 0 || k >= N) throw ConvergenceFailure("requested eigenpair count must satisfy 0 < k < N");
  const double defect = hermiticity_defect(H);
  if (!(defect <= 1e-10)) {
    throw NonHermitianAssembly("operator is not Hermitian under W (defect " +
                               std::to_string(defect) + ")");
  }
  const Eigen::VectorXd sqrt_w = H.weights().cwiseSqrt();
  const SparseC A = symmetrized(H, sqrt_w);

  if (static_cast<std::size_t>(N) <= options.dense_threshold) {
    const MatrixC dense(A);
    Eigen::SelfAdjointEigenSolver<MatrixC> es(dense);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("dense eigensolver failed");
    return finish(H, sqrt_w, es.eigenvalues().head(k),
                  es.eigenvectors().leftCols(k), A, k, "dense-selfadjoint", 1);
  }

  const auto [lower, upper] = gershgorin_bounds(H);
  const double sigma = lower - 1e-2 * std::max(1.0, std::abs(lower));
  SparseC shifted = A;
  for (Eigen::Index i = 0; i < N; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLDLT<SparseC> factor(shifted);
  if (factor.info() != Eigen::Success) {
    throw ConvergenceFailure("factorization of the shifted operator failed (sigma = " +
                             std::to_string(sigma) + ")");
  }

  const Eigen::Index b = std::min<Eigen::Index>(N / 3, k + std::max(8, k / 2));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  MatrixC X(N, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    for (Eigen::Index i = 0; i < N; ++i) X(i, j) = Complex(normal(rng), normal(rng));
  }
  X = orthonormal_basis(X);

  Eigen::VectorXd theta;
  std::vector<double> worst;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    MatrixC V(N, 3 * b);
    V.leftCols(b) = X;
    MatrixC Y1 = factor.solve(X);
    Y1 = orthonormal_basis(Y1);
    V.middleCols(b, b) = Y1;
    V.rightCols(b) = factor.solve(Y1);
    const MatrixC Q = orthonormal_basis(V);

    const MatrixC AQ = A * Q;
    MatrixC T = Q.adjoint() * AQ;
    T = 0.5 * (T + T.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixC> es(T);
    theta = es.eigenvalues().head(b);
    X = Q * es.eigenvectors().leftCols(b);

    const MatrixC R = AQ * es.eigenvectors().leftCols(k) - X.leftCols(k) * theta.head(k).asDiagonal();
    double worst_ratio = 0.0;
    for (int j = 0; j < k; ++j) {
      worst_ratio = std::max(worst_ratio, R.col(j).norm() / std::max(1.0, std::abs(theta[j])));
    }
    worst.push_back(worst_ratio);
    if (worst_ratio <= options.tolerance) {
      return finish(H, sqrt_w, theta, X, A, k, "shift-invert-block-krylov", iter);
    }
  }
  std::ostringstream msg;
  msg << "block Krylov did not converge in " << options.max_iterations
      << " iterations (sigma = " << sigma << ", last relative residual "
      << (worst.empty() ? 0.0 : worst.back()) << ", tolerance " << options.tolerance << ")";
  throw ConvergenceFailure(msg.str());
}

VectorC canonical_momentum(const Grid& grid, const VectorC& psi, int axis, double hbar) {
  const GridAxis& ax = grid.axis(axis);
  VectorC out = VectorC::Zero(psi.size());
  if (ax.bc == Boundary::periodic) {
    Eigen::FFT<double> fft;
    const int n = ax.n;
    std::vector<Complex> line(n), spec(n);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (grid.multi_index(p)[axis] != 0) continue;
      auto m = grid.multi_index(p);
      for (int i = 0; i < n; ++i) {
        m[axis] = i;
        line[i] = psi[static_cast<Eigen::Index>(grid.index(m))];
      }
      fft.fwd(spec, line);
      for (int j = 0; j < n; ++j) {
        const int freq = j <= n / 2 ? j : j - n;
        const double kappa = (2 * j == n) ? 0.0 : 2.0 * std::numbers::pi * freq / ax.range.span();
        spec[j] *= hbar * kappa;  // -i hbar (i kappa)
      }
      fft.inv(line, spec);
      for (int i = 0; i < n; ++i) {
        m[axis] = i;
        out[static_cast<Eigen::Index>(grid.index(m))] = line[i];
      }
    }
    return out;
  }
  const SparseC D = stencil::central_difference(grid, axis);
  return Complex(0.0, -hbar) * (D * psi);
}

Complex expectation_value(const HamiltonianOperator& H, const WaveFunction& psi,
                          const ObservableSpec& observable) {
  if (!(psi.grid == H.grid)) throw GridMismatch("wavefunction and operator grids differ");
  const Eigen::VectorXd w = H.weights();
  VectorC o_psi;
  switch (observable.kind) {
    case ObservableKind::energy:
      o_psi = H.matrix * psi.values;
      break;
    case ObservableKind::position:
      if (observable.values.size() != H.grid.size()) {
        throw GridMismatch("observable '" + observable.name + "' has wrong length");
      }
      o_psi = psi.values.cwiseProduct(
          Eigen::Map<const Eigen::VectorXd>(observable.values.data(), w.size()).cast<Complex>());
      break;
    case ObservableKind::canonical_momentum:
      o_psi = canonical_momentum(H.grid, psi.values, observable.axis, H.params.hbar);
      break;
    case ObservableKind::current: {
      if (observable.values.size() != H.grid.size()) {
        throw GridMismatch("observable '" + observable.name + "' has wrong length");
      }
      const VectorC p = canonical_momentum(H.grid, psi.values, observable.axis, H.params.hbar);
      const Eigen::Map<const Eigen::VectorXd> a(observable.values.data(), w.size());
      o_psi = (p - H.params.charge * psi.values.cwiseProduct(a.cast<Complex>())) / H.params.mass;
      break;
    }
  }
  const Complex num = (psi.values.conjugate().array() * o_psi.array() * w.cast<Complex>().array()).sum();
  const double den = (psi.values.cwiseAbs2().array() * w.array()).sum();
  return num / den;
}

EvolutionTrace propagate_cn(const HamiltonianOperator& H, const WaveFunction& psi0, double dt,
                            int steps, const std::vector<ObservableSpec>& observables,
                            const EvolutionOptions& options) {
  if (!(psi0.grid == H.grid)) throw GridMismatch("initial state and operator grids differ");
  if (!(dt > 0.0) || steps < 0) throw LinearSolveFailure("time step must be positive");
  EvolutionTrace trace;
  const auto N = static_cast<Eigen::Index>(H.grid.size());
  const double radius = std::max(std::abs(gershgorin_bounds(H).first),
                                 std::abs(gershgorin_bounds(H).second));
  if (dt * radius > 2.0) {
    std::ostringstream msg;
    msg << "dt * spectral radius estimate = " << dt * radius << " exceeds 2";
    trace.warnings.push_back(msg.str());
  }

  const Complex tau(0.0, dt / (2.0 * H.params.hbar));
  SparseC identity(N, N);
  identity.setIdentity();
  const SparseC lhs = identity + tau * H.matrix;
  const SparseC rhs_op = identity - tau * H.matrix;
  Eigen::SparseLU<SparseC> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) throw LinearSolveFailure("Crank-Nicolson factorization failed");

  const Eigen::VectorXd w = H.weights();
  const ObservableSpec energy{"energy", ObservableKind::energy, 0, {}};
  trace.observable_names.reserve(observables.size());
  for (const auto& o : observables) trace.observable_names.push_back(o.name);
  trace.observables.resize(observables.size());

  WaveFunction psi = psi0;
  auto record = [&](int step) {
    trace.times.push_back(step * dt);
    trace.norms.push_back(std::sqrt((psi.values.cwiseAbs2().array() * w.array()).sum()));
    trace.energies.push_back(expectation_value(H, psi, energy).real());
    for (std::size_t j = 0; j < observables.size(); ++j) {
      trace.observables[j].push_back(expectation_value(H, psi, observables[j]).real());
    }
  };
  record(0);
  if (options.snapshot_stride > 0) trace.snapshots.push_back(psi);

  for (int step = 1; step <= steps; ++step) {
    const VectorC rhs = rhs_op * psi.values;
    VectorC next = lu.solve(rhs);
    const double res = (lhs * next - rhs).norm() / std::max(rhs.norm(), 1e-300);
    trace.max_solve_residual = std::max(trace.max_solve_residual, res);
    if (lu.info() != Eigen::Success || !(res <= options.solve_tolerance)) {
      throw LinearSolveFailure("Crank-Nicolson solve residual " + std::to_string(res) +
                               " at step " + std::to_string(step));
    }
    psi.values = std::move(next);
    if (step % std::max(1, options.stride) == 0 || step == steps) record(step);
    if (options.snapshot_stride > 0 && step % options.snapshot_stride == 0) {
      trace.snapshots.push_back(psi);
    }
  }
  return trace;
}

}  // namespace curvedq
