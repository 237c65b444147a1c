#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ipvr/common.hpp"
#include "ipvr/solvers.hpp"
#include "ipvr/subsolver.hpp"

namespace ipvr::harness {

enum class ConfigProblem { LeastSquares, Logistic, SumOfNonconvex };
enum class ConfigPrecond { Identity, Full, Diag };

/// Experiment description read from a `key = value` file.
///
/// Keys: problem.kind, data.path, data.d, synthetic.n, synthetic.d,
/// synthetic.seed, synthetic.cond, reg.l1, reg.l2, solver.method, solver.eta,
/// solver.m, solver.epochs, solver.tau, solver.epoch_mode, precond.kind,
/// precond.alpha, subsolver.engine, subsolver.p, subsolver.gamma,
/// subsolver.mode, seed, output.path.
struct ExperimentConfig {
  ConfigProblem problem = ConfigProblem::LeastSquares;
  std::string data_path;          ///< empty means synthetic
  std::optional<Index> data_d;
  Index synthetic_n = 1000;
  Index synthetic_d = 50;
  std::uint64_t synthetic_seed = 0;
  double synthetic_cond = 1e4;

  double l1 = 1e-3;
  double l2 = 1e-8;

  Method method = Method::IPreSvrg;
  std::optional<double> eta;      ///< required
  std::optional<Index> m = 100;   ///< nullopt selects ceil(n / (1 + p d))
  int epochs = 50;
  std::optional<double> tau;
  EpochMode epoch_mode = EpochMode::Fixed;

  ConfigPrecond precond = ConfigPrecond::Diag;
  double alpha = 0.01;

  std::optional<SubsolverEngine> engine;  ///< nullopt selects the default for M
  std::optional<int> p;
  std::optional<double> gamma;
  BudgetMode mode = BudgetMode::Certified;

  std::uint64_t seed = 0;
  std::string output_path = "trace.csv";
};

/// Parses configuration text. Relative paths are resolved against base_dir.
/// Unknown or repeated keys and malformed values throw InputError naming the key.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = "",
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

std::string to_string(ConfigProblem kind);
std::string to_string(ConfigPrecond kind);
std::string to_string(SubsolverEngine engine);
std::string to_string(EpochMode mode);
std::string to_string(BudgetMode mode);

}  // namespace ipvr::harness
