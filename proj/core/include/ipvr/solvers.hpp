#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ipvr/common.hpp"
#include "ipvr/metric.hpp"
#include "ipvr/problems.hpp"
#include "ipvr/subsolver.hpp"

namespace ipvr {

enum class Method { Svrg, IPreSvrg, KatyushaX, IPreKatX };
enum class EpochMode { Geometric, Fixed };

std::string to_string(Method method);

struct EpochRecord {
  int epoch = 0;
  std::int64_t grad_evals = 0;  ///< cumulative component-gradient evaluations
  std::int64_t matvecs = 0;     ///< cumulative M-applications
  std::int64_t prox_calls = 0;  ///< cumulative prox evaluations
  double wall_s = 0.0;          ///< algorithm time, objective evaluation excluded
  double objective = 0.0;       ///< F at the epoch's output point
};

struct RunTrace {
  std::vector<EpochRecord> records;  ///< records[0] is the initial point
  Vector x_final;
  std::vector<Vector> iterates;      ///< filled when SolverConfig::record_iterates
  std::vector<std::string> warnings;
  bool diverged = false;             ///< stopped on a non-finite objective
  bool stopped_early = false;        ///< stopped by SolverConfig::stop_when
};

struct SolverConfig {
  Method method = Method::IPreSvrg;
  double eta = 0.0;
  Index m = 100;
  int epochs = 10;
  EpochMode epoch_mode = EpochMode::Fixed;
  /// Momentum weight for the Katyusha variants; defaults to
  /// 1/2 sqrt(1/2 m eta sigma_metric) when sigma_metric is known.
  std::optional<double> momentum_tau;
  std::optional<double> sigma_metric;
  std::uint64_t seed = 0;
  /// Defaults to default_subsolver(M). Ignored by Svrg and KatyushaX.
  std::optional<SubsolverConfig> sub;
  /// Defaults to the identity. Ignored by Svrg and KatyushaX.
  std::optional<Preconditioner> M;
  /// Defaults to zero.
  std::optional<Vector> x0;
  bool record_iterates = false;
  /// Called after every record; returning true ends the run.
  std::function<bool(const EpochRecord&)> stop_when;
};

/// Geometric: D ~ Geom(1/m) on {0, 1, ...}; Fixed: D = m - 1.
Index sample_epoch_length(EpochMode mode, Index m, std::mt19937_64& rng);

/// g + grad f_i(w_t) - grad f_i(w_0)
Vector variance_reduced_gradient(const Vector& g, const FiniteSumObjective& prob, Index i,
                                 const Vector& w_t, const Vector& w_0);

/// (3/2 y_k + 1/2 x_k - (1 - tau) y_km1) / (1 + tau)
Vector momentum_step(const Vector& y_k, const Vector& x_k, const Vector& y_km1, double tau);

/// Svrg or IPreSvrg. Each run draws from two streams derived from cfg.seed:
/// epoch lengths from the first, inner indices from the second.
RunTrace run_ipresvrg(const FiniteSumObjective& prob, const Regularizer& reg,
                      const SolverConfig& cfg);

/// KatyushaX or IPreKatX. The trace reports F(y_k).
RunTrace run_iprekatx(const FiniteSumObjective& prob, const Regularizer& reg,
                      const SolverConfig& cfg);

/// Dispatches on cfg.method.
RunTrace run_solver(const FiniteSumObjective& prob, const Regularizer& reg,
                    const SolverConfig& cfg);

}  // namespace ipvr
