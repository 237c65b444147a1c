#pragma once

#include <cstdint>

#include "ipvr/common.hpp"
#include "ipvr/problems.hpp"

namespace ipvr::harness {

struct ReferenceOptions {
  double tol = 1e-12;                 ///< bound on ||x - T(x)||, T the prox-gradient map
  std::int64_t max_iterations = 1000000;
  /// Dimension up to which the Hessian bounds come from a dense eigensolve;
  /// above it L is estimated by power iteration.
  Index dense_eigen_limit = 2000;
};

struct ReferenceResult {
  Vector x_star;
  double f_star = 0.0;
  double residual = 0.0;
  std::int64_t iterations = 0;
  double L = 0.0;       ///< step 1/L
  double sigma = 0.0;   ///< strong convexity estimate used for the restart period
  std::int64_t restart_period = 0;
};

/// Deterministic full-gradient FISTA with restart (fixed period p0 from the
/// Hessian bounds plus the gradient-based adaptive test), run until the
/// prox-gradient fixed-point residual ||x - prox_{psi/L}(x - grad f(x)/L)||
/// is at most tol. Throws ConvergenceError carrying the achieved residual
/// when max_iterations is reached.
ReferenceResult compute_reference_optimum(const FiniteSumObjective& prob, const Regularizer& reg,
                                          const ReferenceOptions& options = {});

/// ||x - prox_{psi/L}(x - grad f(x)/L)||
double prox_gradient_residual(const FiniteSumObjective& prob, const Regularizer& reg,
                              const Vector& x, double L);

}  // namespace ipvr::harness
