#include "ipvr/harness/synthetic.hpp"

#include <cmath>
#include <random>

#include <Eigen/QR>

namespace ipvr::harness {
namespace {

Eigen::MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) g(i, j) = normal(rng);
  }
  return g;
}

// First `cols` columns of a Haar-like orthogonal matrix.
Eigen::MatrixXd orthonormal(Index rows, Index cols, std::mt19937_64& rng) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rows, cols, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

}  // namespace

DenseMatrix ill_conditioned_design(Index n, Index d, double cond, std::uint64_t seed) {
  if (d < 1 || n < d) throw InputError("ill_conditioned_design: need 1 <= d <= n");
  if (!(cond >= 1.0) || !std::isfinite(cond)) {
    throw InputError("ill_conditioned_design: cond must be finite and >= 1");
  }
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd Q = orthonormal(n, d, rng);
  const Eigen::MatrixXd V = orthonormal(d, d, rng);
  Vector s(d);
  for (Index j = 0; j < d; ++j) {
    const double t = d == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(d - 1);
    s[j] = std::pow(cond, -0.5 * t);
  }
  const double scale = std::sqrt(static_cast<double>(n));
  DenseMatrix A = scale * Q * s.asDiagonal() * V.transpose();
  return A;
}

Dataset gen_synthetic(Index n, Index d, double cond, std::uint64_t seed, SyntheticKind kind) {
  DenseMatrix A = ill_conditioned_design(n, d, cond, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution keep(0.2);
  Vector x_true = Vector::Zero(d);
  for (Index j = 0; j < d; ++j) {
    if (keep(rng)) x_true[j] = normal(rng);
  }
  if (x_true.isZero()) x_true[0] = 1.0;
  Vector b = A * x_true;
  const double noise = kind == SyntheticKind::Regression ? 0.01 : 0.1;
  for (Index i = 0; i < n; ++i) b[i] += noise * normal(rng);
  if (kind == SyntheticKind::Classification) {
    for (Index i = 0; i < n; ++i) b[i] = b[i] >= 0.0 ? 1.0 : -1.0;
  }
  Dataset out;
  out.features = A.sparseView(0.0, 0.0);
  out.features.makeCompressed();
  out.labels = std::move(b);
  out.source_path = "<synthetic>";
  return out;
}

}  // namespace ipvr::harness
