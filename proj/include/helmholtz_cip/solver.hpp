#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/IterativeSolvers>

#include "helmholtz_cip/assembly.hpp"
#include "helmholtz_cip/error.hpp"
#include "helmholtz_cip/types.hpp"

namespace helmholtz_cip {

enum class SolverMethod { direct, iterative };

struct SolveOptions {
  double tolerance = 1e-10;
  SolverMethod method = SolverMethod::direct;
  int max_iterations = 2000;
  int restart = 200;
  // Reciprocal condition estimate below which the system counts as singular.
  double singular_rcond = 1e-13;
};

struct SolveReport {
  ComplexVector solution;
  double relative_residual = 0.0;
  int iterations = 0;  // GMRES iterations, or refinement steps for the direct method
  double rcond_estimate = 0.0;
  double seconds = 0.0;
  SolverMethod method = SolverMethod::direct;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline double relative_residual(const ComplexSparse& a, const ComplexVector& z, const ComplexVector& b) {
  const double bnorm = b.norm();
  const double rnorm = (a * z - b).norm();
  return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

inline double norm1(const ComplexSparse& a) {
  double best = 0.0;
  for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
    double s = 0.0;
    for (ComplexSparse::InnerIterator it(a, col); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

// Deterministic probe vector with entries in [-1, 1].
inline ComplexVector probe_vector(Eigen::Index n) {
  ComplexVector w(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  const auto next = [&state] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) / static_cast<double>(1ULL << 53) * 2.0 - 1.0;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = next();
    w[i] = Complex(re, next());
  }
  return w;
}

}  // namespace detail

inline SolveReport solve(const SparseComplexSystem& system, const SolveOptions& options = {}) {
  if (system.matrix.rows() != system.matrix.cols() || system.matrix.rows() != system.rhs.size()) {
    throw Error(ErrorKind::dimension_mismatch, "solve: system is not square or rhs length differs");
  }
  if (!(options.tolerance > 0.0) || options.tolerance > 1e-6) {
    throw Error(ErrorKind::invalid_argument, "solve: tolerance must lie in (0, 1e-6]");
  }
  const auto start = std::chrono::steady_clock::now();
  const ComplexSparse& a = system.matrix;
  const ComplexVector& b = system.rhs;
  SolveReport report;
  report.method = options.method;

  if (options.method == SolverMethod::direct) {
    // Symmetric strategy: the pattern is structurally symmetric and the
    // diagonal dominates enough for diagonal pivoting to be accepted.
    Eigen::UmfPackLU<ComplexSparse> lu;
    lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
    lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorKind::singular_system, "solve: LU factorization failed (singular matrix)");
    }
    const ComplexVector w = detail::probe_vector(a.rows());
    const ComplexVector aw = lu.solve(w);
    const double anorm = detail::norm1(a);
    const double growth = aw.lpNorm<1>() / w.lpNorm<1>();
    report.rcond_estimate = (anorm > 0.0 && std::isfinite(growth) && growth > 0.0) ? 1.0 / (anorm * growth) : 0.0;
    if (!(report.rcond_estimate >= options.singular_rcond)) {
      throw Error(ErrorKind::singular_system,
                  "solve: system is numerically singular (rcond estimate " + std::to_string(report.rcond_estimate) + ")");
    }
    report.solution = lu.solve(b);
    report.relative_residual = detail::relative_residual(a, report.solution, b);
    // A few steps of iterative refinement if the first solve falls short.
    while (report.relative_residual > options.tolerance && report.iterations < 3) {
      const ComplexVector residual = b - a * report.solution;
      report.solution += lu.solve(residual);
      report.relative_residual = detail::relative_residual(a, report.solution, b);
      ++report.iterations;
    }
  } else {
    Eigen::GMRES<ComplexSparse, Eigen::IncompleteLUT<Complex>> gmres;
    gmres.setMaxIterations(options.max_iterations);
    gmres.set_restart(options.restart);
    gmres.compute(a);
    if (gmres.info() != Eigen::Success) {
      throw Error(ErrorKind::singular_system, "solve: incomplete LU preconditioner failed");
    }
    // GMRES monitors the preconditioned residual; tighten until the true one meets the target.
    double inner = options.tolerance * 0.5;
    report.solution = ComplexVector::Zero(b.size());
    for (int round = 0; round < 4; ++round) {
      gmres.setTolerance(inner);
      report.solution = gmres.solveWithGuess(b, report.solution);
      report.iterations += static_cast<int>(gmres.iterations());
      report.relative_residual = detail::relative_residual(a, report.solution, b);
      if (report.relative_residual <= options.tolerance || gmres.info() == Eigen::NoConvergence) break;
      inner *= 0.1;
    }
  }

  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!std::isfinite(report.relative_residual) || report.relative_residual > options.tolerance) {
    throw Error(ErrorKind::not_converged, "solve: relative residual " + detail::sci(report.relative_residual) +
                                              " exceeds tolerance " + detail::sci(options.tolerance));
  }
  return report;
}

}  // namespace helmholtz_cip
