#pragma once

#include <optional>
#include <string>

#include "ipvr/harness/config.hpp"
#include "ipvr/harness/libsvm.hpp"
#include "ipvr/harness/trace_io.hpp"
#include "ipvr/problems.hpp"
#include "ipvr/solvers.hpp"
#include "ipvr/theory.hpp"

namespace ipvr::harness {

/// Dense storage when at least half the entries are explicit, sparse otherwise.
DataMatrix to_data_matrix(const Dataset& data);

/// Builds the objective described by cfg (from data.path or the synthetic keys).
FiniteSumObjective load_objective(const ExperimentConfig& cfg);

/// Zero when reg.l1 is 0, L1 otherwise.
Regularizer make_regularizer(const ExperimentConfig& cfg);

/// Conditioning at x = 0 in the Euclidean norm and in the M-norm.
theory::ConditioningSummary conditioning_summary(const FiniteSumObjective& prob,
                                                 const Preconditioner& M);

struct PreparedExperiment {
  FiniteSumObjective prob;
  Regularizer reg;
  SolverConfig solver;
  KeyValues resolved;  ///< every config key with its resolved value, plus the version
};

/// Loads data, builds M and resolves every default.
PreparedExperiment prepare_experiment(const ExperimentConfig& cfg);

struct ExperimentOutput {
  RunTrace trace;
  std::string trace_path;
  std::string meta_path;  ///< trace_path + ".meta"
};

/// Runs the solver and writes the CSV trace and its metadata sidecar.
ExperimentOutput run_experiment(const ExperimentConfig& cfg,
                                std::optional<double> f_star = std::nullopt);

/// Library version string.
std::string version();

}  // namespace ipvr::harness
