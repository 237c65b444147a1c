#include "ipvr/harness/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace ipvr::harness {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, std::optional<double> f_star) {
  out << "epoch,grad_evals,matvecs,prox_calls,wall_s,objective";
  if (f_star) out << ",subopt";
  out << '\n';
  for (const EpochRecord& r : trace.records) {
    out << r.epoch << ',' << r.grad_evals << ',' << r.matvecs << ',' << r.prox_calls << ','
        << format_real(r.wall_s) << ',' << format_real(r.objective);
    if (f_star) out << ',' << format_real(r.objective - *f_star);
    out << '\n';
  }
}

void write_trace_csv(const std::string& path, const RunTrace& trace,
                     std::optional<double> f_star) {
  auto out = open_out(path);
  write_trace_csv(out, trace, f_star);
  if (!out) throw InputError("write failed for '" + path + "'");
}

void write_key_values(std::ostream& out, const KeyValues& entries) {
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
}

void write_key_values(const std::string& path, const KeyValues& entries) {
  auto out = open_out(path);
  write_key_values(out, entries);
  if (!out) throw InputError("write failed for '" + path + "'");
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  KeyValues out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError(path + ": expected 'key = value'");
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

void write_reference(const std::string& path, double f_star, double residual,
                     long long iterations, const Vector& x) {
  std::ostringstream xs;
  for (Index j = 0; j < x.size(); ++j) xs << (j ? "," : "") << format_real(x[j]);
  write_key_values(path, {{"f_star", format_real(f_star)},
                          {"residual", format_real(residual)},
                          {"iterations", std::to_string(iterations)},
                          {"x", xs.str()}});
}

double read_reference_value(const std::string& path) {
  for (const auto& [key, value] : read_key_values(path)) {
    if (key != "f_star") continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError(path + ": invalid f_star value '" + value + "'");
  }
  throw InputError(path + ": no f_star entry");
}

}  // namespace ipvr::harness
