#include "ipvr/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ipvr/harness/synthetic.hpp"

#ifndef IPVR_VERSION
#define IPVR_VERSION "unknown"
#endif

namespace ipvr::harness {
namespace {

constexpr double kDenseLimit = 5e7;

Vector read_vector(const std::string& path, Index expected) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open linear-term file '" + path + "'");
  Vector out(expected);
  Index k = 0;
  double v = 0.0;
  while (in >> v) {
    if (k >= expected) throw InputError(path + ": more than " + std::to_string(expected) +
                                        " values");
    out[k++] = v;
  }
  if (!in.eof()) throw InputError(path + ": non-numeric entry after " + std::to_string(k) +
                                  " values");
  detail::require_dim(k, expected, "linear-term file");
  return out;
}

Preconditioner resolve_preconditioner(const ExperimentConfig& cfg,
                                      const FiniteSumObjective& prob) {
  if (cfg.method == Method::Svrg || cfg.method == Method::KatyushaX) {
    return Preconditioner::identity(prob.d());
  }
  switch (cfg.precond) {
    case ConfigPrecond::Identity:
      return Preconditioner::identity(prob.d());
    case ConfigPrecond::Full:
      return build_preconditioner(prob, PreconditionerChoice::full());
    case ConfigPrecond::Diag:
      break;
  }
  return build_preconditioner(prob, PreconditionerChoice::diag_shift(cfg.alpha));
}

double default_gamma(SubsolverEngine engine, double eta, const Preconditioner& M) {
  switch (engine) {
    case SubsolverEngine::ProxGrad:
      return eta * M.lambda_min() / (M.lambda_max() * M.lambda_max());
    case SubsolverEngine::Fista:
    case SubsolverEngine::FistaRestart:
      return eta / M.lambda_max();
    case SubsolverEngine::DiagonalExact:
      break;
  }
  return 0.0;
}

}  // namespace

std::string version() { return IPVR_VERSION; }

DataMatrix to_data_matrix(const Dataset& data) {
  const double cells = static_cast<double>(data.n()) * static_cast<double>(data.d());
  if (cells > 0.0 && cells <= kDenseLimit &&
      2.0 * static_cast<double>(data.features.nonZeros()) >= cells) {
    return DataMatrix(DenseMatrix(data.features));
  }
  return DataMatrix(data.features);
}

FiniteSumObjective load_objective(const ExperimentConfig& cfg) {
  if (cfg.problem == ConfigProblem::SumOfNonconvex) {
    if (cfg.data_path.empty()) {
      return gen_sum_of_nonconvex(cfg.synthetic_n, cfg.synthetic_d, cfg.synthetic_seed);
    }
    const Dataset data = parse_libsvm(cfg.data_path, cfg.data_d);
    Vector bvec = read_vector(cfg.data_path + ".b", data.d());
    return FiniteSumObjective::nonconvex_quad_sum(to_data_matrix(data), data.labels,
                                                  std::move(bvec));
  }
  Dataset data;
  if (cfg.data_path.empty()) {
    const SyntheticKind kind = cfg.problem == ConfigProblem::Logistic
                                   ? SyntheticKind::Classification
                                   : SyntheticKind::Regression;
    data = gen_synthetic(cfg.synthetic_n, cfg.synthetic_d, cfg.synthetic_cond,
                         cfg.synthetic_seed, kind);
  } else {
    data = parse_libsvm(cfg.data_path, cfg.data_d);
  }
  if (data.n() == 0) throw InputError("dataset '" + data.source_path + "' has no rows");
  if (cfg.problem == ConfigProblem::Logistic) {
    return FiniteSumObjective::logistic(to_data_matrix(data), data.labels, cfg.l2);
  }
  return FiniteSumObjective::least_squares(to_data_matrix(data), data.labels, cfg.l2);
}

Regularizer make_regularizer(const ExperimentConfig& cfg) {
  return cfg.l1 > 0.0 ? Regularizer::l1(cfg.l1) : Regularizer::zero();
}

theory::ConditioningSummary conditioning_summary(const FiniteSumObjective& prob,
                                                 const Preconditioner& M) {
  const Vector zero = Vector::Zero(prob.d());
  const LinearOperator H = prob.hessian(zero);
  const MetricConditioning plain = metric_conditioning(H, Preconditioner::identity(prob.d()));
  const MetricConditioning metric = metric_conditioning(H, M);
  theory::ConditioningSummary out;
  out.kappa_M = M.cond();
  out.kappa_f = plain.kappa_M;
  out.kappa_f_M = metric.kappa_M;
  out.L_M = metric.L_M;
  out.sigma_M = metric.sigma_M;
  out.n = static_cast<double>(prob.n());
  out.d = static_cast<double>(prob.d());
  return out;
}

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg) {
  if (!cfg.eta) throw InputError("config key 'solver.eta' is required");
  FiniteSumObjective prob = load_objective(cfg);
  Regularizer reg = make_regularizer(cfg);
  const bool classical = cfg.method == Method::Svrg || cfg.method == Method::KatyushaX;
  const Preconditioner M = resolve_preconditioner(cfg, prob);

  SubsolverConfig sub = default_subsolver(M);
  if (cfg.engine) sub.engine = *cfg.engine;
  sub.p = cfg.p.value_or(sub.engine == SubsolverEngine::DiagonalExact ? 1 : 20);
  sub.gamma = cfg.gamma;
  sub.mode = cfg.mode;
  if (!classical) validate_subsolver(sub, M);

  SolverConfig solver;
  solver.method = cfg.method;
  solver.eta = *cfg.eta;
  const double p_eff = classical ? 0.0 : static_cast<double>(sub.p);
  solver.m = cfg.m ? *cfg.m
                   : static_cast<Index>(theory::theory_epoch_length(
                         static_cast<double>(prob.n()), static_cast<double>(prob.d()), p_eff));
  solver.epochs = cfg.epochs;
  solver.epoch_mode = cfg.epoch_mode;
  solver.seed = cfg.seed;
  solver.sub = sub;
  solver.M = M;

  std::string tau_text = "n/a";
  if (cfg.method == Method::KatyushaX || cfg.method == Method::IPreKatX) {
    if (cfg.tau) {
      solver.momentum_tau = cfg.tau;
    } else {
      const double sigma = conditioning_summary(prob, M).sigma_M;
      if (!(sigma > 0.0)) {
        throw InputError("solver.tau: no default (problem not strongly convex in the M-norm); "
                         "set solver.tau explicitly");
      }
      solver.sigma_metric = sigma;
    }
    tau_text = format_real(solver.momentum_tau.value_or(std::min(
        1.0, theory::default_momentum_tau(static_cast<double>(solver.m), solver.eta,
                                          *solver.sigma_metric))));
  }

  const std::string engine_text = classical ? "proxgrad" : to_string(sub.engine);
  const std::string p_text = classical ? "1" : std::to_string(sub.p);
  std::string gamma_text = "n/a";
  if (classical) {
    gamma_text = format_real(solver.eta);
  } else if (sub.engine != SubsolverEngine::DiagonalExact) {
    gamma_text = format_real(sub.gamma.value_or(default_gamma(sub.engine, solver.eta, M)));
  }

  KeyValues resolved = {
      {"problem.kind", to_string(cfg.problem)},
      {"data.path", cfg.data_path.empty() ? "none" : cfg.data_path},
      {"data.d", std::to_string(prob.d())},
      {"synthetic.n", cfg.data_path.empty() ? std::to_string(cfg.synthetic_n) : "n/a"},
      {"synthetic.d", cfg.data_path.empty() ? std::to_string(cfg.synthetic_d) : "n/a"},
      {"synthetic.seed", cfg.data_path.empty() ? std::to_string(cfg.synthetic_seed) : "n/a"},
      {"synthetic.cond", cfg.data_path.empty() && cfg.problem != ConfigProblem::SumOfNonconvex
                             ? format_real(cfg.synthetic_cond)
                             : "n/a"},
      {"reg.l1", format_real(cfg.l1)},
      {"reg.l2", format_real(prob.lambda2())},
      {"solver.method", to_string(cfg.method)},
      {"solver.eta", format_real(solver.eta)},
      {"solver.m", std::to_string(solver.m)},
      {"solver.epochs", std::to_string(solver.epochs)},
      {"solver.tau", tau_text},
      {"solver.epoch_mode", to_string(solver.epoch_mode)},
      {"precond.kind", classical ? "identity" : to_string(cfg.precond)},
      {"precond.alpha", format_real(cfg.alpha)},
      {"subsolver.engine", engine_text},
      {"subsolver.p", p_text},
      {"subsolver.gamma", gamma_text},
      {"subsolver.mode", to_string(sub.mode)},
      {"seed", std::to_string(cfg.seed)},
      {"output.path", cfg.output_path},
      {"n", std::to_string(prob.n())},
      {"version", version()},
  };
  return PreparedExperiment{std::move(prob), std::move(reg), std::move(solver),
                            std::move(resolved)};
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, std::optional<double> f_star) {
  PreparedExperiment prep = prepare_experiment(cfg);
  ExperimentOutput out;
  out.trace = run_solver(prep.prob, prep.reg, prep.solver);
  out.trace_path = cfg.output_path;
  out.meta_path = cfg.output_path + ".meta";
  write_trace_csv(out.trace_path, out.trace, f_star);
  KeyValues meta = prep.resolved;
  for (const std::string& w : prep.prob.warnings()) meta.emplace_back("warning", w);
  for (const std::string& w : out.trace.warnings) meta.emplace_back("warning", w);
  write_key_values(out.meta_path, meta);
  return out;
}

}  // namespace ipvr::harness
