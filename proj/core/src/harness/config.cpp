#include "ipvr/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace ipvr::harness {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw InputError("config key '" + key + "': invalid value '" + value + "' (expected " +
                   expected + ")");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) bad_value(key, v, "a number");
  return out;
}

double to_positive(const std::string& key, const std::string& v) {
  const double out = to_double(key, v);
  if (!(out > 0.0)) bad_value(key, v, "a positive number");
  return out;
}

double to_nonnegative(const std::string& key, const std::string& v) {
  const double out = to_double(key, v);
  if (!(out >= 0.0)) bad_value(key, v, "a nonnegative number");
  return out;
}

std::int64_t to_integer(const std::string& key, const std::string& v, std::int64_t min) {
  std::int64_t out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || out < min) {
    bad_value(key, v, "an integer >= " + std::to_string(min));
  }
  return out;
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, v, "a nonnegative integer");
  return out;
}

template <typename E>
E to_enum(const std::string& key, const std::string& v,
          const std::vector<std::pair<std::string, E>>& choices) {
  std::string names;
  for (const auto& [name, value] : choices) {
    if (v == name) return value;
    names += names.empty() ? name : ", " + name;
  }
  bad_value(key, v, "one of " + names);
}

bool is_auto(const std::string& v) { return v == "auto"; }

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.problem = to_enum<ConfigProblem>(k, v,
                                            {{"least_squares", ConfigProblem::LeastSquares},
                                             {"lasso", ConfigProblem::LeastSquares},
                                             {"logistic", ConfigProblem::Logistic},
                                             {"sum_of_nonconvex", ConfigProblem::SumOfNonconvex}});
       }},
      {"data.path", [](ExperimentConfig& c, const std::string&,
                       const std::string& v) { c.data_path = v; }},
      {"data.d", [](ExperimentConfig& c, const std::string& k,
                    const std::string& v) { c.data_d = to_integer(k, v, 1); }},
      {"synthetic.n", [](ExperimentConfig& c, const std::string& k,
                         const std::string& v) { c.synthetic_n = to_integer(k, v, 1); }},
      {"synthetic.d", [](ExperimentConfig& c, const std::string& k,
                         const std::string& v) { c.synthetic_d = to_integer(k, v, 1); }},
      {"synthetic.seed", [](ExperimentConfig& c, const std::string& k,
                            const std::string& v) { c.synthetic_seed = to_seed(k, v); }},
      {"synthetic.cond",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synthetic_cond = to_double(k, v);
         if (!(c.synthetic_cond >= 1.0)) bad_value(k, v, "a number >= 1");
       }},
      {"reg.l1", [](ExperimentConfig& c, const std::string& k,
                    const std::string& v) { c.l1 = to_nonnegative(k, v); }},
      {"reg.l2", [](ExperimentConfig& c, const std::string& k,
                    const std::string& v) { c.l2 = to_nonnegative(k, v); }},
      {"solver.method",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.method = to_enum<Method>(k, v,
                                    {{"svrg", Method::Svrg},
                                     {"ipresvrg", Method::IPreSvrg},
                                     {"katyushax", Method::KatyushaX},
                                     {"iprekatx", Method::IPreKatX}});
       }},
      {"solver.eta", [](ExperimentConfig& c, const std::string& k,
                        const std::string& v) { c.eta = to_positive(k, v); }},
      {"solver.m",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "theory") {
           c.m.reset();
         } else {
           c.m = to_integer(k, v, 1);
         }
       }},
      {"solver.epochs",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.epochs = static_cast<int>(to_integer(k, v, 0));
       }},
      {"solver.tau",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v)) {
           c.tau.reset();
           return;
         }
         const double t = to_double(k, v);
         if (!(t > 0.0 && t <= 1.0)) bad_value(k, v, "a number in (0, 1] or auto");
         c.tau = t;
       }},
      {"solver.epoch_mode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.epoch_mode = to_enum<EpochMode>(
             k, v, {{"fixed", EpochMode::Fixed}, {"geometric", EpochMode::Geometric}});
       }},
      {"precond.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.precond = to_enum<ConfigPrecond>(k, v,
                                            {{"identity", ConfigPrecond::Identity},
                                             {"full", ConfigPrecond::Full},
                                             {"diag", ConfigPrecond::Diag}});
       }},
      {"precond.alpha", [](ExperimentConfig& c, const std::string& k,
                           const std::string& v) { c.alpha = to_positive(k, v); }},
      {"subsolver.engine",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v)) {
           c.engine.reset();
           return;
         }
         c.engine = to_enum<SubsolverEngine>(k, v,
                                             {{"proxgrad", SubsolverEngine::ProxGrad},
                                              {"fista", SubsolverEngine::Fista},
                                              {"fista_restart", SubsolverEngine::FistaRestart},
                                              {"diagonal_exact", SubsolverEngine::DiagonalExact}});
       }},
      {"subsolver.p",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v)) {
           c.p.reset();
         } else {
           c.p = static_cast<int>(to_integer(k, v, 1));
         }
       }},
      {"subsolver.gamma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v)) {
           c.gamma.reset();
         } else {
           c.gamma = to_positive(k, v);
         }
       }},
      {"subsolver.mode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.mode = to_enum<BudgetMode>(
             k, v, {{"certified", BudgetMode::Certified}, {"practical", BudgetMode::Practical}});
       }},
      {"seed", [](ExperimentConfig& c, const std::string& k,
                  const std::string& v) { c.seed = to_seed(k, v); }},
      {"output.path", [](ExperimentConfig& c, const std::string&,
                         const std::string& v) { c.output_path = v; }},
  };
  return table;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir,
                              const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": unknown config key '" + key +
                       "'");
    }
    if (!seen.insert(key).second) {
      throw InputError(source + ":" + std::to_string(line_no) + ": config key '" + key +
                       "' given twice");
    }
    if (value.empty()) throw InputError("config key '" + key + "': empty value");
    it->second(cfg, key, value);
  }
  if (!cfg.eta) throw InputError(source + ": config key 'solver.eta' is required");
  cfg.data_path = resolve_path(base_dir, cfg.data_path);
  cfg.output_path = resolve_path(base_dir, cfg.output_path);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(in, dir, path);
}

std::string to_string(ConfigProblem kind) {
  switch (kind) {
    case ConfigProblem::LeastSquares:
      return "least_squares";
    case ConfigProblem::Logistic:
      return "logistic";
    case ConfigProblem::SumOfNonconvex:
      return "sum_of_nonconvex";
  }
  return "unknown";
}

std::string to_string(ConfigPrecond kind) {
  switch (kind) {
    case ConfigPrecond::Identity:
      return "identity";
    case ConfigPrecond::Full:
      return "full";
    case ConfigPrecond::Diag:
      return "diag";
  }
  return "unknown";
}

std::string to_string(SubsolverEngine engine) {
  switch (engine) {
    case SubsolverEngine::ProxGrad:
      return "proxgrad";
    case SubsolverEngine::Fista:
      return "fista";
    case SubsolverEngine::FistaRestart:
      return "fista_restart";
    case SubsolverEngine::DiagonalExact:
      return "diagonal_exact";
  }
  return "unknown";
}

std::string to_string(EpochMode mode) {
  return mode == EpochMode::Fixed ? "fixed" : "geometric";
}

std::string to_string(BudgetMode mode) {
  return mode == BudgetMode::Certified ? "certified" : "practical";
}

}  // namespace ipvr::harness
