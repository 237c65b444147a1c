#include "ipvr/data_matrix.hpp"

namespace ipvr {

DataMatrix::DataMatrix(DenseMatrix dense) : storage_(std::move(dense)) {}

DataMatrix::DataMatrix(SparseMatrix sparse) : storage_(std::move(sparse)) {
  std::get<SparseMatrix>(storage_).makeCompressed();
}

Index DataMatrix::rows() const noexcept {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

Index DataMatrix::cols() const noexcept {
  return std::visit([](const auto& m) { return m.cols(); }, storage_);
}

double DataMatrix::row_dot(Index i, const Vector& x) const {
  if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
    return d->row(i).dot(x);
  }
  const auto& s = std::get<SparseMatrix>(storage_);
  double acc = 0.0;
  for (SparseMatrix::InnerIterator it(s, i); it; ++it) acc += it.value() * x[it.col()];
  return acc;
}

void DataMatrix::add_row(Index i, double alpha, Vector& out) const {
  if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
    out.noalias() += alpha * d->row(i).transpose();
    return;
  }
  const auto& s = std::get<SparseMatrix>(storage_);
  for (SparseMatrix::InnerIterator it(s, i); it; ++it) out[it.col()] += alpha * it.value();
}

double DataMatrix::row_squared_norm(Index i) const {
  if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return d->row(i).squaredNorm();
  const auto& s = std::get<SparseMatrix>(storage_);
  double acc = 0.0;
  for (SparseMatrix::InnerIterator it(s, i); it; ++it) acc += it.value() * it.value();
  return acc;
}

Vector DataMatrix::multiply(const Vector& x) const {
  return std::visit([&x](const auto& m) -> Vector { return m * x; }, storage_);
}

Vector DataMatrix::multiply_transpose(const Vector& r) const {
  return std::visit([&r](const auto& m) -> Vector { return m.transpose() * r; },
                    storage_);
}

DenseMatrix DataMatrix::weighted_gram(const Vector& weights) const {
  if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
    DenseMatrix g = d->transpose() * weights.asDiagonal() * (*d);
    return g;
  }
  const auto& s = std::get<SparseMatrix>(storage_);
  const SparseMatrix g = s.transpose() * weights.asDiagonal() * s;
  return DenseMatrix(g);
}

Vector DataMatrix::weighted_column_squares(const Vector& weights) const {
  Vector out = Vector::Zero(cols());
  if (const auto* d = std::get_if<DenseMatrix>(&storage_)) {
    for (Index i = 0; i < d->rows(); ++i) {
      out.noalias() += weights[i] * d->row(i).transpose().cwiseAbs2();
    }
    return out;
  }
  const auto& s = std::get<SparseMatrix>(storage_);
  for (Index i = 0; i < s.rows(); ++i) {
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) {
      out[it.col()] += weights[i] * it.value() * it.value();
    }
  }
  return out;
}

DenseMatrix DataMatrix::to_dense() const {
  if (const auto* d = std::get_if<DenseMatrix>(&storage_)) return *d;
  return DenseMatrix(std::get<SparseMatrix>(storage_));
}

SparseMatrix DataMatrix::to_sparse() const {
  if (const auto* s = std::get_if<SparseMatrix>(&storage_)) return *s;
  return std::get<DenseMatrix>(storage_).sparseView();
}

}  // namespace ipvr
