#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "ipvr/common.hpp"
#include "ipvr/data_matrix.hpp"

namespace ipvr::harness {

/// Labeled sparse data, 0-based columns.
struct Dataset {
  SparseMatrix features;
  Vector labels;
  std::string source_path;

  Index n() const { return features.rows(); }
  Index d() const { return features.cols(); }
};

/// Malformed LIBSVM input. Line and column are 1-based.
class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& message);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses `label idx:value ...` lines with 1-based, strictly increasing
/// indices. Blank lines and lines starting with '#' are skipped. The feature
/// dimension is 1 + the largest index unless `d` is given, in which case it
/// must not be smaller.
Dataset parse_libsvm(std::istream& in, std::optional<Index> d = std::nullopt,
                     const std::string& source = "<stream>");
Dataset parse_libsvm(const std::string& path, std::optional<Index> d = std::nullopt);

/// Writes explicit entries with 17 significant digits.
void write_libsvm(std::ostream& out, const Dataset& data);
void write_libsvm(const std::string& path, const Dataset& data);

}  // namespace ipvr::harness
