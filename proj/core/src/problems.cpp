#include "ipvr/problems.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace ipvr {
namespace {

// 1 / (1 + exp(-t)) without overflow.
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// ln(1 + exp(u)) computed as max(u, 0) + ln(1 + exp(-|u|)).
double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

void check_index(Index i, Index n) {
  if (i < 0 || i >= n) {
    throw InputError("component index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(n) + ")");
  }
}

}  // namespace

FiniteSumObjective::FiniteSumObjective(ProblemKind kind, DataMatrix data, Vector labels,
                                       Vector linear, double lambda2)
    : kind_(kind),
      data_(std::move(data)),
      labels_(std::move(labels)),
      linear_(std::move(linear)),
      lambda2_(lambda2) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InputError("objective needs n >= 1 and d >= 1 (got n=" +
                     std::to_string(data_.rows()) + ", d=" + std::to_string(data_.cols()) +
                     ")");
  }
  detail::require_dim(labels_.size(), data_.rows(), "objective labels");
  if (!labels_.allFinite()) throw InputError("objective labels must be finite");
  if (!(lambda2_ >= 0.0) || !std::isfinite(lambda2_)) {
    throw InputError("lambda2 must be a finite nonnegative number");
  }
}

FiniteSumObjective FiniteSumObjective::least_squares(DataMatrix A, Vector b, double lambda2) {
  return FiniteSumObjective(ProblemKind::LeastSquares, std::move(A), std::move(b), Vector(),
                            lambda2);
}

FiniteSumObjective FiniteSumObjective::logistic(DataMatrix A, Vector b, double lambda2) {
  FiniteSumObjective obj(ProblemKind::Logistic, std::move(A), std::move(b), Vector(), lambda2);
  Index odd = 0;
  for (Index i = 0; i < obj.labels_.size(); ++i) {
    if (std::abs(obj.labels_[i]) != 1.0) ++odd;
  }
  if (odd > 0) {
    std::ostringstream msg;
    msg << odd << " logistic label(s) are not in {-1, +1}; using them verbatim";
    obj.warnings_.push_back(msg.str());
  }
  return obj;
}

FiniteSumObjective FiniteSumObjective::nonconvex_quad_sum(DataMatrix C, Vector d_sign,
                                                          Vector bvec) {
  detail::require_dim(bvec.size(), C.cols(), "nonconvex_quad_sum linear term");
  FiniteSumObjective obj(ProblemKind::NonconvexQuadSum, std::move(C), std::move(d_sign),
                         std::move(bvec), 0.0);
  const double total = obj.labels_.sum();
  if (std::abs(total) > 1e-9 * obj.labels_.cwiseAbs().sum()) {
    throw InputError("nonconvex_quad_sum: the D_i must sum to zero");
  }
  obj.mean_shift_ = total / static_cast<double>(obj.n());
  return obj;
}

void FiniteSumObjective::add_component_gradient(Index i, const Vector& x, double scale,
                                                Vector& out) const {
  check_index(i, n());
  detail::require_dim(x.size(), d(), "component_gradient");
  switch (kind_) {
    case ProblemKind::LeastSquares: {
      const double r = data_.row_dot(i, x) - labels_[i];
      data_.add_row(i, scale * r, out);
      if (lambda2_ != 0.0) out.noalias() += (scale * 2.0 * lambda2_) * x;
      break;
    }
    case ProblemKind::Logistic: {
      const double bi = labels_[i];
      const double margin = bi * data_.row_dot(i, x);
      // d/dz ln(1 + exp(-b z)) = -b * sigmoid(-b z)
      data_.add_row(i, -scale * bi * sigmoid(-margin), out);
      if (lambda2_ != 0.0) out.noalias() += (scale * 2.0 * lambda2_) * x;
      break;
    }
    case ProblemKind::NonconvexQuadSum: {
      data_.add_row(i, scale * data_.row_dot(i, x), out);
      out.noalias() += (scale * labels_[i]) * x + scale * linear_;
      break;
    }
  }
}

Vector FiniteSumObjective::component_gradient(Index i, const Vector& x) const {
  Vector out = Vector::Zero(d());
  add_component_gradient(i, x, 1.0, out);
  return out;
}

Vector FiniteSumObjective::full_gradient(const Vector& x) const {
  detail::require_dim(x.size(), d(), "full_gradient");
  const double inv_n = 1.0 / static_cast<double>(n());
  const Vector z = data_.multiply(x);
  switch (kind_) {
    case ProblemKind::LeastSquares: {
      Vector g = inv_n * data_.multiply_transpose(z - labels_);
      if (lambda2_ != 0.0) g.noalias() += 2.0 * lambda2_ * x;
      return g;
    }
    case ProblemKind::Logistic: {
      Vector coeff(n());
      for (Index i = 0; i < n(); ++i) {
        coeff[i] = -labels_[i] * sigmoid(-labels_[i] * z[i]);
      }
      Vector g = inv_n * data_.multiply_transpose(coeff);
      if (lambda2_ != 0.0) g.noalias() += 2.0 * lambda2_ * x;
      return g;
    }
    case ProblemKind::NonconvexQuadSum:
      break;
  }
  Vector g = inv_n * data_.multiply_transpose(z);
  g.noalias() += mean_shift_ * x + linear_;
  return g;
}

double FiniteSumObjective::smooth_value(const Vector& x) const {
  detail::require_dim(x.size(), d(), "smooth_value");
  const double inv_n = 1.0 / static_cast<double>(n());
  const Vector z = data_.multiply(x);
  switch (kind_) {
    case ProblemKind::LeastSquares:
      return 0.5 * inv_n * (z - labels_).squaredNorm() + lambda2_ * x.squaredNorm();
    case ProblemKind::Logistic: {
      double acc = 0.0;
      for (Index i = 0; i < n(); ++i) acc += softplus(-labels_[i] * z[i]);
      return inv_n * acc + lambda2_ * x.squaredNorm();
    }
    case ProblemKind::NonconvexQuadSum:
      break;
  }
  return 0.5 * inv_n * z.squaredNorm() + 0.5 * mean_shift_ * x.squaredNorm() +
         linear_.dot(x);
}

std::pair<Vector, double> FiniteSumObjective::curvature_weights(const Vector& x) const {
  const double inv_n = 1.0 / static_cast<double>(n());
  Vector weights = Vector::Constant(n(), inv_n);
  double shift = 2.0 * lambda2_;
  if (kind_ == ProblemKind::Logistic) {
    detail::require_dim(x.size(), d(), "hessian");
    const Vector z = data_.multiply(x);
    for (Index i = 0; i < n(); ++i) {
      const double s = sigmoid(-labels_[i] * z[i]);
      weights[i] = inv_n * s * (1.0 - s) * labels_[i] * labels_[i];
    }
  } else if (kind_ == ProblemKind::NonconvexQuadSum) {
    shift = mean_shift_;
  }
  return {std::move(weights), shift};
}

LinearOperator FiniteSumObjective::hessian(const Vector& x) const {
  auto [weights, shift] = curvature_weights(x);
  return [this, weights = std::move(weights), shift](const Vector& v) -> Vector {
    Vector az = data_.multiply(v);
    az.array() *= weights.array();
    Vector out = data_.multiply_transpose(az);
    out.noalias() += shift * v;
    return out;
  };
}

DenseMatrix FiniteSumObjective::hessian_matrix(const Vector& x) const {
  const auto [weights, shift] = curvature_weights(x);
  DenseMatrix h = data_.weighted_gram(weights);
  h.diagonal().array() += shift;
  return h;
}

double FiniteSumObjective::component_smoothness_bound(const Preconditioner& M) const {
  detail::require_dim(M.dim(), d(), "component_smoothness_bound");
  double worst = 0.0;
  Vector a(d());
  for (Index i = 0; i < n(); ++i) {
    a.setZero();
    data_.add_row(i, 1.0, a);
    const double quad = a.dot(M.solve(a));
    double li = 0.0;
    switch (kind_) {
      case ProblemKind::LeastSquares:
        li = quad;
        break;
      case ProblemKind::Logistic:
        li = 0.25 * labels_[i] * labels_[i] * quad;
        break;
      case ProblemKind::NonconvexQuadSum:
        li = quad + std::abs(labels_[i]) / M.lambda_min();
        break;
    }
    worst = std::max(worst, li);
  }
  return worst + 2.0 * lambda2_ / M.lambda_min();
}

Regularizer Regularizer::l1(double lambda1) {
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) {
    throw InputError("L1 regularizer needs lambda1 > 0");
  }
  return Regularizer(RegularizerKind::L1, lambda1);
}

double Regularizer::value(const Vector& x) const {
  return kind_ == RegularizerKind::L1 ? lambda1_ * x.lpNorm<1>() : 0.0;
}

void prox_in_place(const Regularizer& reg, Vector& x, double t) {
  if (reg.kind() == RegularizerKind::Zero) return;
  const double threshold = t * reg.lambda1();
  for (Index j = 0; j < x.size(); ++j) x[j] = soft_threshold(x[j], threshold);
}

Vector prox(const Regularizer& reg, const Vector& x, double t) {
  if (!(t > 0.0)) throw InputError("prox: step t must be positive");
  Vector out = x;
  prox_in_place(reg, out, t);
  return out;
}

double objective_value(const FiniteSumObjective& prob, const Regularizer& reg,
                       const Vector& x) {
  return prob.smooth_value(x) + reg.value(x);
}

Preconditioner build_preconditioner(const FiniteSumObjective& prob,
                                    const PreconditionerChoice& choice) {
  const double inv_n = 1.0 / static_cast<double>(prob.n());
  Vector weights = Vector::Constant(prob.n(), inv_n);
  if (prob.kind() == ProblemKind::Logistic) {
    // B = diag(b) A, so B^T B = A^T diag(b^2) A.
    weights = (0.25 * inv_n) * prob.labels().cwiseAbs2();
  }
  if (choice.kind == PreconditionerChoice::Kind::DiagShift) {
    if (!(choice.alpha > 0.0)) {
      throw InputError("build_preconditioner: DiagShift needs alpha > 0");
    }
    Vector diag = prob.data().weighted_column_squares(weights);
    diag.array() += choice.alpha;
    return Preconditioner::diagonal(std::move(diag));
  }
  try {
    return Preconditioner::dense(prob.data().weighted_gram(weights));
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("build_preconditioner(Full): ") + e.what() +
                         "; use DiagShift with alpha > 0 instead");
  }
}

FiniteSumObjective gen_sum_of_nonconvex(Index n, Index d, std::uint64_t seed) {
  if (d < 1) throw InputError("gen_sum_of_nonconvex: d must be positive");
  if (n % 2 != 0) throw InputError("gen_sum_of_nonconvex: n must be even");
  if (n < 2 * d) throw InputError("gen_sum_of_nonconvex: n must be at least 2d");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix c(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) c(i, j) = normal(rng);
    c.row(i).normalize();
  }
  // g_i = 5i e_i for the (1-based) first d components.
  for (Index i = 0; i < d; ++i) c(i, i) += 5.0 * static_cast<double>(i + 1);

  Vector d_sign(n);
  d_sign.head(n / 2).setConstant(-100.0);
  d_sign.tail(n / 2).setConstant(100.0);

  Vector bvec(d);
  for (Index j = 0; j < d; ++j) bvec[j] = normal(rng);

  return FiniteSumObjective::nonconvex_quad_sum(DataMatrix(std::move(c)), std::move(d_sign),
                                                std::move(bvec));
}

}  // namespace ipvr
