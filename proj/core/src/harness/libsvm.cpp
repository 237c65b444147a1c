#include "ipvr/harness/libsvm.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

namespace ipvr::harness {
namespace {

// Eigen's default sparse storage index is int.
constexpr std::uint64_t kMaxColumns = std::numeric_limits<int>::max() - 1;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> split(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_index(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column,
                       const std::string& message)
    : InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                 message),
      line_(line),
      column_(column) {}

Dataset parse_libsvm(std::istream& in, std::optional<Index> d, const std::string& source) {
  std::vector<Eigen::Triplet<double, int>> entries;
  std::vector<double> labels;
  std::uint64_t max_col = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split(line);
    if (tokens.empty() || tokens.front().text.front() == '#') continue;
    const auto fail = [&](const Token& t, const std::string& msg) {
      return ParseError(source, line_no, t.column, msg + " '" + std::string(t.text) + "'");
    };
    double label = 0.0;
    if (!parse_double(tokens[0].text, label) || !std::isfinite(label)) {
      throw fail(tokens[0], "invalid label");
    }
    const int row = static_cast<int>(labels.size());
    std::uint64_t prev = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const Token& t = tokens[k];
      const auto colon = t.text.find(':');
      if (colon == std::string_view::npos) throw fail(t, "expected index:value, got");
      std::uint64_t idx = 0;
      if (!parse_index(t.text.substr(0, colon), idx)) throw fail(t, "invalid index in");
      if (idx == 0) throw fail(t, "indices are 1-based; found index 0 in");
      if (idx > kMaxColumns) throw fail(t, "index too large in");
      if (idx <= prev) throw fail(t, "indices must be strictly increasing; found");
      double value = 0.0;
      if (!parse_double(t.text.substr(colon + 1), value) || !std::isfinite(value)) {
        throw fail(t, "invalid value in");
      }
      prev = idx;
      max_col = std::max(max_col, idx);
      entries.emplace_back(row, static_cast<int>(idx - 1), value);
    }
    labels.push_back(label);
  }
  if (in.bad()) throw InputError(source + ": read error");

  Index cols = static_cast<Index>(max_col);
  if (d) {
    if (*d < cols) {
      throw InputError(source + ": feature dimension override " + std::to_string(*d) +
                       " is smaller than the largest index " + std::to_string(cols));
    }
    cols = *d;
  }
  Dataset out;
  out.source_path = source;
  out.features.resize(static_cast<Index>(labels.size()), cols);
  out.features.setFromTriplets(entries.begin(), entries.end());
  out.features.makeCompressed();
  out.labels = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
  return out;
}

Dataset parse_libsvm(const std::string& path, std::optional<Index> d) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  return parse_libsvm(in, d, path);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  char buf[64];
  for (Index i = 0; i < data.n(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", data.labels[i]);
    out << buf;
    for (SparseMatrix::InnerIterator it(data.features, i); it; ++it) {
      std::snprintf(buf, sizeof buf, " %lld:%.17g", static_cast<long long>(it.col()) + 1,
                    it.value());
      out << buf;
    }
    out << '\n';
  }
}

void write_libsvm(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write data file '" + path + "'");
  write_libsvm(out, data);
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace ipvr::harness
