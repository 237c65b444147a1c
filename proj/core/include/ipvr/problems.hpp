#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ipvr/common.hpp"
#include "ipvr/data_matrix.hpp"
#include "ipvr/metric.hpp"

namespace ipvr {

enum class ProblemKind { LeastSquares, Logistic, NonconvexQuadSum };

/// Smooth part f(x) = (1/n) sum_i f_i(x) of a composite objective.
///
///   LeastSquares:     f_i = 1/2 (a_i^T x - b_i)^2 + lambda2 ||x||^2
///   Logistic:         f_i = ln(1 + exp(-b_i a_i^T x)) + lambda2 ||x||^2
///   NonconvexQuadSum: f_i = 1/2 x^T (c_i c_i^T + D_i I) x + bvec^T x
///
/// Immutable after construction; all member functions are safe to call
/// concurrently.
class FiniteSumObjective {
 public:
  static FiniteSumObjective least_squares(DataMatrix A, Vector b, double lambda2);
  /// Labels outside {-1, +1} are accepted verbatim and recorded in warnings().
  static FiniteSumObjective logistic(DataMatrix A, Vector b, double lambda2);
  /// `d_sign` holds the scalar D_i of each component; the D_i must cancel.
  static FiniteSumObjective nonconvex_quad_sum(DataMatrix C, Vector d_sign, Vector bvec);

  ProblemKind kind() const noexcept { return kind_; }
  Index n() const noexcept { return data_.rows(); }
  Index d() const noexcept { return data_.cols(); }
  double lambda2() const noexcept { return lambda2_; }
  const DataMatrix& data() const noexcept { return data_; }
  /// b for LeastSquares / Logistic, the D_i for NonconvexQuadSum.
  const Vector& labels() const noexcept { return labels_; }
  /// bvec for NonconvexQuadSum; empty otherwise.
  const Vector& linear_term() const noexcept { return linear_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  Vector component_gradient(Index i, const Vector& x) const;
  /// out += scale * grad f_i(x)
  void add_component_gradient(Index i, const Vector& x, double scale, Vector& out) const;
  Vector full_gradient(const Vector& x) const;
  /// f(x), including the lambda2 ||x||^2 term.
  double smooth_value(const Vector& x) const;
  /// Hessian of f at x as an operator (x is ignored by the quadratic kinds).
  /// The operator refers to this objective, which must outlive it.
  LinearOperator hessian(const Vector& x) const;
  /// Dense Hessian of f at x; for Logistic at x = 0 this is (1/4n) B^T B + 2 lambda2 I.
  DenseMatrix hessian_matrix(const Vector& x) const;
  /// Upper bound on the M-smoothness of every component, max_i L_i^M.
  double component_smoothness_bound(const Preconditioner& M) const;

 private:
  FiniteSumObjective(ProblemKind kind, DataMatrix data, Vector labels, Vector linear,
                     double lambda2);
  // Row weights w and shift s such that the Hessian is A^T diag(w) A + s I.
  std::pair<Vector, double> curvature_weights(const Vector& x) const;

  ProblemKind kind_;
  DataMatrix data_;
  Vector labels_;
  Vector linear_;
  double lambda2_ = 0.0;
  double mean_shift_ = 0.0;  // (1/n) sum_i D_i
  std::vector<std::string> warnings_;
};

enum class RegularizerKind { Zero, L1 };

/// psi(x): zero or lambda1 ||x||_1.
class Regularizer {
 public:
  static Regularizer zero() noexcept { return Regularizer(RegularizerKind::Zero, 0.0); }
  /// Throws InputError unless lambda1 > 0.
  static Regularizer l1(double lambda1);

  RegularizerKind kind() const noexcept { return kind_; }
  double lambda1() const noexcept { return lambda1_; }
  double value(const Vector& x) const;

 private:
  Regularizer(RegularizerKind kind, double lambda1) : kind_(kind), lambda1_(lambda1) {}

  RegularizerKind kind_;
  double lambda1_;
};

/// sign(v) max(|v| - threshold, 0)
inline double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

/// prox_{t psi}(x). Throws InputError for t <= 0.
Vector prox(const Regularizer& reg, const Vector& x, double t);
/// In-place variant used on hot paths; t must be positive.
void prox_in_place(const Regularizer& reg, Vector& x, double t);

/// F(x) = f(x) + psi(x)
double objective_value(const FiniteSumObjective& prob, const Regularizer& reg,
                       const Vector& x);

/// Preconditioners built from the data:
///   Full      -> Hessian of the data-fit term: (1/n) A^T A, (1/4n) B^T B, or
///                (1/n) sum c_i c_i^T
///   DiagShift -> diagonal of the same matrix plus alpha I
struct PreconditionerChoice {
  enum class Kind { Full, DiagShift };
  Kind kind = Kind::DiagShift;
  double alpha = 0.0;

  static PreconditionerChoice full() { return {Kind::Full, 0.0}; }
  static PreconditionerChoice diag_shift(double alpha) { return {Kind::DiagShift, alpha}; }
};

Preconditioner build_preconditioner(const FiniteSumObjective& prob,
                                    const PreconditionerChoice& choice);

/// Synthetic sum-of-nonconvex instance: unit-norm random a_i, spikes 5i on the
/// i-th coordinate of the first d components, D_i = -100 for the first half
/// and +100 for the second, bvec standard normal. Requires n even, n >= 2d.
FiniteSumObjective gen_sum_of_nonconvex(Index n, Index d, std::uint64_t seed);

}  // namespace ipvr
