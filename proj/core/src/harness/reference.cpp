#include "ipvr/harness/reference.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ipvr/metric.hpp"
#include "ipvr/theory.hpp"

namespace ipvr::harness {
namespace {

struct CurvatureBounds {
  double L = 0.0;
  double sigma = 0.0;
};

// For the quadratic kinds the Hessian is constant; for logistic the Hessian
// at 0 dominates every other one, and only the ridge term bounds it below.
CurvatureBounds curvature_bounds(const FiniteSumObjective& prob, const ReferenceOptions& opt) {
  const Vector zero = Vector::Zero(prob.d());
  CurvatureBounds out;
  if (prob.d() <= opt.dense_eigen_limit) {
    const Eigen::MatrixXd H = prob.hessian_matrix(zero);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
      throw NumericalError("reference: eigensolver failed on the Hessian");
    }
    out.L = eig.eigenvalues().maxCoeff();
    out.sigma = eig.eigenvalues().minCoeff();
  } else {
    out.L = largest_eigenpair(prob.hessian(zero), prob.d()).value;
    out.sigma = 0.0;
  }
  if (prob.kind() == ProblemKind::Logistic) out.sigma = 2.0 * prob.lambda2();
  if (!(out.L > 0.0) || !std::isfinite(out.L)) {
    throw NumericalError("reference: smoothness constant is not positive");
  }
  // Guard against rounding in the top eigenvalue.
  out.L *= 1.0 + 1e-10;
  return out;
}

}  // namespace

double prox_gradient_residual(const FiniteSumObjective& prob, const Regularizer& reg,
                              const Vector& x, double L) {
  Vector t = x - prob.full_gradient(x) / L;
  prox_in_place(reg, t, 1.0 / L);
  return (x - t).norm();
}

ReferenceResult compute_reference_optimum(const FiniteSumObjective& prob, const Regularizer& reg,
                                          const ReferenceOptions& options) {
  if (!(options.tol > 0.0)) throw InputError("reference: tol must be positive");
  if (options.max_iterations < 1) throw InputError("reference: max_iterations must be >= 1");
  const CurvatureBounds bounds = curvature_bounds(prob, options);
  const double L = bounds.L;
  const double step = 1.0 / L;

  ReferenceResult out;
  out.L = L;
  out.sigma = bounds.sigma;
  const double kappa = bounds.sigma > 0.0 ? L / bounds.sigma : HUGE_VAL;
  out.restart_period = std::isfinite(kappa) && kappa < 1e16
                           ? static_cast<std::int64_t>(theory::restart_block(std::max(1.0, kappa)))
                           : options.max_iterations;

  Vector x = Vector::Zero(prob.d());
  Vector y = x;
  Vector x_next(prob.d());
  double theta = 1.0;
  std::int64_t since_restart = 0;
  double residual = HUGE_VAL;
  for (std::int64_t it = 1; it <= options.max_iterations; ++it) {
    const Vector grad = prob.full_gradient(y);
    x_next = y - step * grad;
    prox_in_place(reg, x_next, step);
    ++since_restart;
    const bool adaptive = (y - x_next).dot(x_next - x) > 0.0;
    if (adaptive || since_restart >= out.restart_period) {
      theta = 1.0;
      since_restart = 0;
      y = x_next;
    } else {
      const double theta_next = theory::fista_theta_next(theta);
      y = x_next + ((theta - 1.0) / theta_next) * (x_next - x);
      theta = theta_next;
    }
    x.swap(x_next);
    if (it % 10 == 0 || it == options.max_iterations) {
      residual = prox_gradient_residual(prob, reg, x, L);
      if (!std::isfinite(residual)) {
        throw NumericalError("reference: iterates became non-finite");
      }
      if (residual <= options.tol) {
        out.iterations = it;
        break;
      }
    }
  }
  if (!(residual <= options.tol)) {
    throw ConvergenceError("reference: reached " + std::to_string(options.max_iterations) +
                               " iterations with residual " + std::to_string(residual),
                           residual);
  }
  out.residual = residual;
  out.f_star = objective_value(prob, reg, x);
  out.x_star = std::move(x);
  return out;
}

}  // namespace ipvr::harness
