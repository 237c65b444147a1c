#pragma once

#include <Eigen/SparseCore>

#include <variant>

#include "ipvr/common.hpp"

namespace ipvr {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row-oriented n x d data matrix, stored densely or as sparse rows.
///
/// All row operations are O(nnz(row)); products with the whole matrix use the
/// underlying Eigen kernels.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(DenseMatrix dense);
  explicit DataMatrix(SparseMatrix sparse);

  Index rows() const noexcept;
  Index cols() const noexcept;
  bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(storage_); }

  /// a_i^T x
  double row_dot(Index i, const Vector& x) const;
  /// out += alpha * a_i
  void add_row(Index i, double alpha, Vector& out) const;
  double row_squared_norm(Index i) const;

  /// A x
  Vector multiply(const Vector& x) const;
  /// A^T r
  Vector multiply_transpose(const Vector& r) const;
  /// A^T diag(weights) A, dense d x d.
  DenseMatrix weighted_gram(const Vector& weights) const;
  /// diag(A^T diag(weights) A)
  Vector weighted_column_squares(const Vector& weights) const;

  DenseMatrix to_dense() const;
  SparseMatrix to_sparse() const;

 private:
  std::variant<DenseMatrix, SparseMatrix> storage_;
};

}  // namespace ipvr
