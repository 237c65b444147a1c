#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "ipvr/common.hpp"

namespace ipvr {

/// A symmetric linear operator v -> Av, given as a callable.
using LinearOperator = std::function<Vector(const Vector&)>;

struct SpectralBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

struct PowerIterationOptions {
  int max_iterations = 1000;
  /// Relative change of the Rayleigh quotient between sweeps.
  double rq_tolerance = 1e-8;
  /// Certificate: ||Av - lambda v|| <= residual_tolerance * lambda * ||v||.
  double residual_tolerance = 1e-6;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct EigenEstimate {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  double residual = 0.0;
};

/// Power iteration for the dominant eigenpair of a symmetric PSD operator.
/// Throws ConvergenceError (carrying the last Rayleigh quotient) when the
/// certificate is not met within the iteration cap.
EigenEstimate largest_eigenpair(const LinearOperator& op, Index dim,
                                const PowerIterationOptions& options = {});

/// Inverse power iteration for the smallest eigenpair of an SPD operator.
/// `inverse` applies op^{-1}; the returned pair is certified against `op`.
EigenEstimate smallest_eigenpair(const LinearOperator& op,
                                 const LinearOperator& inverse, Index dim,
                                 const PowerIterationOptions& options = {});

/// Exact extremes of a positive diagonal.
SpectralBounds eigen_bounds(const Vector& diagonal);

/// Certified power / inverse-power estimates for a dense SPD matrix.
/// Throws NumericalError when the matrix is not numerically positive definite.
SpectralBounds eigen_bounds(const DenseMatrix& symmetric,
                            const PowerIterationOptions& options = {});

enum class PreconditionerKind { Identity, Diagonal, Dense };

/// Fixed SPD matrix M defining the metric ||x||_M = sqrt(x^T M x).
///
/// Immutable after construction. The dense kind is symmetrized and factorized
/// once; copies share the factorization.
class Preconditioner {
 public:
  static Preconditioner identity(Index dim);
  /// Throws InputError unless every entry is finite and > 0.
  static Preconditioner diagonal(Vector entries);
  /// Throws NumericalError if the (symmetrized) matrix is not SPD.
  static Preconditioner dense(const DenseMatrix& matrix,
                              const PowerIterationOptions& options = {});

  PreconditionerKind kind() const noexcept { return kind_; }
  Index dim() const noexcept { return dim_; }
  double lambda_min() const noexcept { return bounds_.lambda_min; }
  double lambda_max() const noexcept { return bounds_.lambda_max; }
  double cond() const noexcept { return bounds_.lambda_max / bounds_.lambda_min; }
  /// True for Identity and Diagonal kinds.
  bool is_diagonal() const noexcept { return kind_ != PreconditionerKind::Dense; }

  Vector apply(const Vector& v) const;
  /// out <- M v without allocating (out must not alias v).
  void apply_to(const Vector& v, Vector& out) const;
  Vector solve(const Vector& v) const;
  double m_norm(const Vector& v) const;
  double m_inner(const Vector& u, const Vector& v) const;

  /// Diagonal of M (all ones for Identity).
  Vector diagonal() const;
  DenseMatrix to_dense() const;

  /// Solve with the lower Cholesky factor L (M = L L^T); for diagonal kinds
  /// this divides by sqrt(diag). Used to whiten operators.
  Vector solve_lower(const Vector& v) const;

 private:
  struct DenseState;

  Preconditioner() = default;

  PreconditionerKind kind_ = PreconditionerKind::Identity;
  Index dim_ = 0;
  Vector diag_;
  std::shared_ptr<const DenseState> dense_;
  SpectralBounds bounds_{1.0, 1.0};
};

struct MetricConditioning {
  double L_M = 0.0;      ///< largest eigenvalue of M^{-1/2} H M^{-1/2}
  double sigma_M = 0.0;  ///< smallest eigenvalue of M^{-1/2} H M^{-1/2}
  double kappa_M = 0.0;  ///< L_M / sigma_M (infinite when not strongly convex)
  bool strongly_convex = false;  ///< false when sigma_M < 1e-14
};

/// Smoothness and strong convexity of a quadratic with Hessian H measured in
/// the M-norm. H is materialized column by column, so this is meant for
/// moderate dimensions.
MetricConditioning metric_conditioning(const LinearOperator& hessian,
                                       const Preconditioner& M,
                                       const PowerIterationOptions& options = {});

}  // namespace ipvr
