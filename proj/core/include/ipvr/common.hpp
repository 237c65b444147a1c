#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ipvr {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
/// Dense matrices are stored row-major throughout the library.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: dimension mismatches, invalid parameters, malformed data
/// or configuration. The CLI maps these to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver its result (failed factorization,
/// iteration cap reached). The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap. Carries the last estimate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double last_value)
      : NumericalError(what), last_value_(last_value) {}
  double last_value() const noexcept { return last_value_; }

 private:
  double last_value_;
};

/// A self-verified certificate failed. Indicates a bug, not a user error.
class DefectError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require_dim(Index got, Index expected, const char* what) {
  if (got != expected) {
    throw InputError(std::string(what) + ": dimension mismatch (got " +
                     std::to_string(got) + ", expected " +
                     std::to_string(expected) + ")");
  }
}

}  // namespace detail
}  // namespace ipvr
