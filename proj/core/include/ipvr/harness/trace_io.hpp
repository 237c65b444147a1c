#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ipvr/solvers.hpp"

namespace ipvr::harness {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Header `epoch,grad_evals,matvecs,prox_calls,wall_s,objective[,subopt]`,
/// reals with 17 significant digits. subopt = objective - f_star.
void write_trace_csv(std::ostream& out, const RunTrace& trace,
                     std::optional<double> f_star = std::nullopt);
void write_trace_csv(const std::string& path, const RunTrace& trace,
                     std::optional<double> f_star = std::nullopt);

/// `key = value` lines.
void write_key_values(std::ostream& out, const KeyValues& entries);
void write_key_values(const std::string& path, const KeyValues& entries);
KeyValues read_key_values(const std::string& path);

/// 17 significant digits.
std::string format_real(double v);

/// Reference file: f_star, residual, iterations, x (comma separated).
void write_reference(const std::string& path, double f_star, double residual,
                     long long iterations, const Vector& x);
/// Reads f_star from a reference file.
double read_reference_value(const std::string& path);

}  // namespace ipvr::harness
