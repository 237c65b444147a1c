#include "ipvr/metric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace ipvr {

struct Preconditioner::DenseState {
  DenseMatrix matrix;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

namespace {

Vector seeded_unit_vector(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = normal(rng);
  const double nrm = v.norm();
  if (nrm == 0.0) {
    v.setOnes();
    return v / std::sqrt(static_cast<double>(dim));
  }
  return v / nrm;
}

// Shared loop for power iteration on `iterate` (op or its inverse). The
// Rayleigh quotient of `iterate` drives the stopping rule; `certify` maps the
// iterate's RQ to the eigenvalue of the target operator and checks its residual.
template <typename Certify>
EigenEstimate power_loop(const LinearOperator& iterate, Index dim,
                         const PowerIterationOptions& opt, Certify certify,
                         const char* what) {
  if (dim <= 0) throw InputError(std::string(what) + ": empty operator");
  Vector v = seeded_unit_vector(dim, opt.seed);
  double previous = std::numeric_limits<double>::quiet_NaN();
  double last_value = 0.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Vector w = iterate(v);
    detail::require_dim(w.size(), dim, what);
    const double rq = v.dot(w);
    const double own_residual = (w - rq * v).norm();
    const auto [value, residual] = certify(rq, v, own_residual);
    last_value = value;
    const bool rq_settled =
        it > 1 && std::abs(rq - previous) <= opt.rq_tolerance * std::abs(rq);
    const bool certified = residual <= opt.residual_tolerance * std::abs(value);
    if ((own_residual == 0.0 || rq_settled) && certified) {
      return EigenEstimate{value, v, it, residual};
    }
    const double nrm = w.norm();
    if (nrm == 0.0 || !std::isfinite(nrm)) break;
    v = w / nrm;
    previous = rq;
  }
  std::ostringstream msg;
  msg << what << ": no certified eigenpair after " << opt.max_iterations
      << " iterations (last Rayleigh quotient " << last_value << ")";
  throw ConvergenceError(msg.str(), last_value);
}

SpectralBounds dense_bounds(const DenseMatrix& m,
                            const Eigen::LLT<Eigen::MatrixXd>& llt,
                            const PowerIterationOptions& opt) {
  const Index dim = m.rows();
  const LinearOperator op = [&m](const Vector& v) -> Vector { return m * v; };
  const LinearOperator inv = [&llt](const Vector& v) -> Vector {
    return llt.solve(v);
  };
  const EigenEstimate hi = largest_eigenpair(op, dim, opt);
  const EigenEstimate lo = smallest_eigenpair(op, inv, dim, opt);
  if (!(lo.value > 0.0)) {
    throw NumericalError("eigen_bounds: smallest eigenvalue is not positive");
  }
  // Power iteration can land slightly on either side when the spectrum is flat.
  return SpectralBounds{std::min(lo.value, hi.value),
                        std::max(lo.value, hi.value)};
}

}  // namespace

EigenEstimate largest_eigenpair(const LinearOperator& op, Index dim,
                                const PowerIterationOptions& options) {
  auto certify = [](double rq, const Vector&, double own_residual) {
    return std::pair<double, double>{rq, own_residual};
  };
  return power_loop(op, dim, options, certify, "largest_eigenpair");
}

EigenEstimate smallest_eigenpair(const LinearOperator& op,
                                 const LinearOperator& inverse, Index dim,
                                 const PowerIterationOptions& options) {
  auto certify = [&op](double rq, const Vector& v, double) {
    if (!(rq > 0.0)) {
      return std::pair<double, double>{0.0, std::numeric_limits<double>::infinity()};
    }
    const double lambda = 1.0 / rq;
    const Vector mv = op(v);
    return std::pair<double, double>{lambda, (mv - lambda * v).norm()};
  };
  return power_loop(inverse, dim, options, certify, "smallest_eigenpair");
}

SpectralBounds eigen_bounds(const Vector& diagonal) {
  if (diagonal.size() == 0) throw InputError("eigen_bounds: empty diagonal");
  if (!diagonal.allFinite() || diagonal.minCoeff() <= 0.0) {
    throw InputError("eigen_bounds: diagonal entries must be finite and positive");
  }
  return SpectralBounds{diagonal.minCoeff(), diagonal.maxCoeff()};
}

SpectralBounds eigen_bounds(const DenseMatrix& symmetric,
                            const PowerIterationOptions& options) {
  detail::require_dim(symmetric.cols(), symmetric.rows(), "eigen_bounds");
  const Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(symmetric)};
  if (llt.info() != Eigen::Success) {
    throw NumericalError("eigen_bounds: matrix is not positive definite");
  }
  return dense_bounds(symmetric, llt, options);
}

Preconditioner Preconditioner::identity(Index dim) {
  if (dim <= 0) throw InputError("Preconditioner::identity: dimension must be positive");
  Preconditioner p;
  p.kind_ = PreconditionerKind::Identity;
  p.dim_ = dim;
  p.bounds_ = {1.0, 1.0};
  return p;
}

Preconditioner Preconditioner::diagonal(Vector entries) {
  Preconditioner p;
  p.bounds_ = eigen_bounds(entries);
  p.kind_ = PreconditionerKind::Diagonal;
  p.dim_ = entries.size();
  p.diag_ = std::move(entries);
  return p;
}

Preconditioner Preconditioner::dense(const DenseMatrix& matrix,
                                     const PowerIterationOptions& options) {
  if (matrix.rows() == 0) throw InputError("Preconditioner::dense: empty matrix");
  detail::require_dim(matrix.cols(), matrix.rows(), "Preconditioner::dense");
  if (!matrix.allFinite()) {
    throw InputError("Preconditioner::dense: matrix has non-finite entries");
  }
  const double scale = matrix.cwiseAbs().maxCoeff();
  const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale) {
    throw InputError("Preconditioner::dense: matrix is not symmetric");
  }

  auto state = std::make_shared<DenseState>();
  state->matrix = 0.5 * (matrix + matrix.transpose());
  state->llt.compute(Eigen::MatrixXd(state->matrix));
  if (state->llt.info() != Eigen::Success) {
    throw NumericalError(
        "Preconditioner::dense: Cholesky factorization failed; the matrix is "
        "not positive definite (a rank-deficient Gram matrix needs a diagonal "
        "shift or a ridge term)");
  }
  const SpectralBounds bounds = dense_bounds(state->matrix, state->llt, options);
  if (bounds.lambda_max / bounds.lambda_min > 1e14) {
    throw NumericalError(
        "Preconditioner::dense: matrix is numerically singular (condition "
        "number above 1e14)");
  }

  Preconditioner p;
  p.kind_ = PreconditionerKind::Dense;
  p.dim_ = matrix.rows();
  p.dense_ = std::move(state);
  p.bounds_ = bounds;
  return p;
}

Vector Preconditioner::apply(const Vector& v) const {
  Vector out(dim_);
  apply_to(v, out);
  return out;
}

void Preconditioner::apply_to(const Vector& v, Vector& out) const {
  detail::require_dim(v.size(), dim_, "Preconditioner::apply");
  out.resize(dim_);
  switch (kind_) {
    case PreconditionerKind::Identity:
      out = v;
      break;
    case PreconditionerKind::Diagonal:
      out = diag_.cwiseProduct(v);
      break;
    case PreconditionerKind::Dense:
      out.noalias() = dense_->matrix * v;
      break;
  }
}

Vector Preconditioner::solve(const Vector& v) const {
  detail::require_dim(v.size(), dim_, "Preconditioner::solve");
  switch (kind_) {
    case PreconditionerKind::Identity:
      return v;
    case PreconditionerKind::Diagonal:
      return v.cwiseQuotient(diag_);
    case PreconditionerKind::Dense:
      break;
  }
  return dense_->llt.solve(v);
}

Vector Preconditioner::solve_lower(const Vector& v) const {
  detail::require_dim(v.size(), dim_, "Preconditioner::solve_lower");
  switch (kind_) {
    case PreconditionerKind::Identity:
      return v;
    case PreconditionerKind::Diagonal:
      return v.cwiseQuotient(diag_.cwiseSqrt());
    case PreconditionerKind::Dense:
      break;
  }
  return dense_->llt.matrixL().solve(v);
}

double Preconditioner::m_inner(const Vector& u, const Vector& v) const {
  detail::require_dim(u.size(), dim_, "Preconditioner::m_inner");
  return u.dot(apply(v));
}

double Preconditioner::m_norm(const Vector& v) const {
  return std::sqrt(std::max(0.0, m_inner(v, v)));
}

Vector Preconditioner::diagonal() const {
  switch (kind_) {
    case PreconditionerKind::Identity:
      return Vector::Ones(dim_);
    case PreconditionerKind::Diagonal:
      return diag_;
    case PreconditionerKind::Dense:
      break;
  }
  return dense_->matrix.diagonal();
}

DenseMatrix Preconditioner::to_dense() const {
  if (kind_ == PreconditionerKind::Dense) return dense_->matrix;
  DenseMatrix m = DenseMatrix::Zero(dim_, dim_);
  m.diagonal() = diagonal();
  return m;
}

MetricConditioning metric_conditioning(const LinearOperator& hessian,
                                       const Preconditioner& M,
                                       const PowerIterationOptions& options) {
  const Index dim = M.dim();
  // Whitened operator C = L^{-1} H L^{-T}, similar to M^{-1/2} H M^{-1/2}.
  Eigen::MatrixXd lh(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    const Vector col = hessian(Vector::Unit(dim, j));
    detail::require_dim(col.size(), dim, "metric_conditioning");
    lh.col(j) = M.solve_lower(col);
  }
  // lh = L^{-1} H; C = (L^{-1} (L^{-1} H)^T)^T, and H is symmetric.
  Eigen::MatrixXd c(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    c.col(j) = M.solve_lower(lh.row(j).transpose());
  }
  c = 0.5 * (c + c.transpose()).eval();

  const LinearOperator op = [&c](const Vector& v) -> Vector { return c * v; };
  MetricConditioning out;
  try {
    out.L_M = largest_eigenpair(op, dim, options).value;
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) {
      const LinearOperator inv = [&llt](const Vector& v) -> Vector {
        return llt.solve(v);
      };
      try {
        out.sigma_M = smallest_eigenpair(op, inv, dim, options).value;
      } catch (const ConvergenceError& e) {
        // A near-singular whitened Hessian stalls inverse iteration.
        if (e.last_value() >= 1e-14) throw;
        out.sigma_M = std::max(0.0, e.last_value());
      }
    }
  } catch (const ConvergenceError&) {
    // Clustered extremes defeat the residual certificate; C is already
    // materialized, so take its spectrum directly.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericalError("metric_conditioning: eigensolver failed");
    }
    out.L_M = es.eigenvalues().maxCoeff();
    out.sigma_M = std::max(0.0, es.eigenvalues().minCoeff());
  }
  out.strongly_convex = out.sigma_M >= 1e-14;
  out.kappa_M = out.strongly_convex ? out.L_M / out.sigma_M
                                    : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace ipvr
