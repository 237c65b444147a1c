#include "ipvr/solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ipvr/theory.hpp"

namespace ipvr {
namespace {

using Clock = std::chrono::steady_clock;

bool preconditioned(Method method) {
  return method == Method::IPreSvrg || method == Method::IPreKatX;
}

// Shared state of one run: problem, resolved configuration, RNG streams and
// cumulative counters.
class EpochRunner {
 public:
  EpochRunner(const FiniteSumObjective& prob, const Regularizer& reg, const SolverConfig& cfg,
              RunTrace& trace)
      : prob_(prob),
        reg_(reg),
        cfg_(cfg),
        trace_(trace),
        M_(Preconditioner::identity(prob.d())) {
    if (!(cfg.eta > 0.0) || !std::isfinite(cfg.eta)) {
      throw InputError("solver: eta must be a finite positive number");
    }
    if (cfg.m < 1) throw InputError("solver: m must be >= 1");
    if (cfg.epochs < 0) throw InputError("solver: epochs must be >= 0");
    if (preconditioned(cfg.method)) {
      if (cfg.M) {
        detail::require_dim(cfg.M->dim(), prob.d(), "solver preconditioner");
        M_ = *cfg.M;
      }
      sub_ = cfg.sub.value_or(default_subsolver(M_));
      validate_subsolver(sub_, M_);
    } else if (cfg.M && cfg.M->kind() != PreconditionerKind::Identity) {
      trace.warnings.push_back(to_string(cfg.method) +
                               " ignores the supplied preconditioner and uses the identity");
    }
    std::seed_seq length_seed{static_cast<std::uint32_t>(cfg.seed),
                              static_cast<std::uint32_t>(cfg.seed >> 32), 0u};
    std::seed_seq index_seed{static_cast<std::uint32_t>(cfg.seed),
                             static_cast<std::uint32_t>(cfg.seed >> 32), 1u};
    length_rng_.seed(length_seed);
    index_rng_.seed(index_seed);
    g_.resize(prob.d());
    grad_tilde_.resize(prob.d());
  }

  // One inner-loop epoch started at x; returns w_{D+1}.
  Vector epoch(const Vector& x) {
    const auto start = Clock::now();
    const Index n = prob_.n();
    g_ = prob_.full_gradient(x);
    const Index D = sample_epoch_length(cfg_.epoch_mode, cfg_.m, length_rng_);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    Vector w = x;
    Vector next(prob_.d());
    SolveCounters counters;
    const bool classical = !preconditioned(cfg_.method);
    for (Index t = 0; t <= D; ++t) {
      const Index i = pick(index_rng_);
      grad_tilde_ = g_;
      prob_.add_component_gradient(i, w, 1.0, grad_tilde_);
      prob_.add_component_gradient(i, x, -1.0, grad_tilde_);
      if (classical) {
        w.noalias() -= cfg_.eta * grad_tilde_;
        prox_in_place(reg_, w, cfg_.eta);
        ++counters.prox_calls;
      } else {
        const SubproblemSpec spec{w, grad_tilde_, cfg_.eta, M_, reg_};
        solve_subproblem(spec, sub_, next, ws_, &counters);
        w.swap(next);
      }
    }
    grad_evals_ += n + 2 * (D + 1);
    matvecs_ += counters.matvecs;
    prox_calls_ += counters.prox_calls;
    elapsed_ += std::chrono::duration<double>(Clock::now() - start).count();
    return w;
  }

  // Appends a record for point x; returns true when the run must stop.
  bool record(int k, const Vector& x) {
    EpochRecord rec;
    rec.epoch = k;
    rec.grad_evals = grad_evals_;
    rec.matvecs = matvecs_;
    rec.prox_calls = prox_calls_;
    rec.wall_s = elapsed_;
    rec.objective = objective_value(prob_, reg_, x);
    trace_.records.push_back(rec);
    if (cfg_.record_iterates) trace_.iterates.push_back(x);
    if (!std::isfinite(rec.objective)) {
      trace_.diverged = true;
      trace_.warnings.push_back("objective became non-finite at epoch " + std::to_string(k));
      return true;
    }
    if (cfg_.stop_when && cfg_.stop_when(rec)) {
      trace_.stopped_early = true;
      return true;
    }
    return false;
  }

  Vector initial_point() const {
    if (!cfg_.x0) return Vector::Zero(prob_.d());
    detail::require_dim(cfg_.x0->size(), prob_.d(), "solver x0");
    return *cfg_.x0;
  }

 private:
  const FiniteSumObjective& prob_;
  const Regularizer& reg_;
  const SolverConfig& cfg_;
  RunTrace& trace_;
  Preconditioner M_;
  SubsolverConfig sub_;
  SubsolverWorkspace ws_;
  std::mt19937_64 length_rng_;
  std::mt19937_64 index_rng_;
  Vector g_;
  Vector grad_tilde_;
  std::int64_t grad_evals_ = 0;
  std::int64_t matvecs_ = 0;
  std::int64_t prox_calls_ = 0;
  double elapsed_ = 0.0;
};

double resolve_tau(const SolverConfig& cfg, RunTrace& trace) {
  if (cfg.momentum_tau) {
    const double tau = *cfg.momentum_tau;
    if (!(tau > 0.0 && tau <= 1.0)) throw InputError("solver: tau must lie in (0, 1]");
    return tau;
  }
  if (!cfg.sigma_metric) {
    throw InputError("solver: " + to_string(cfg.method) +
                     " needs tau or sigma_metric to set the momentum weight");
  }
  const double tau =
      theory::default_momentum_tau(static_cast<double>(cfg.m), cfg.eta, *cfg.sigma_metric);
  if (!(tau > 0.0)) throw InputError("solver: default tau is not positive; set tau explicitly");
  if (tau > 1.0) {
    std::ostringstream msg;
    msg << "default tau " << tau << " exceeds 1; clamped to 1";
    trace.warnings.push_back(msg.str());
    return 1.0;
  }
  return tau;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::Svrg:
      return "svrg";
    case Method::IPreSvrg:
      return "ipresvrg";
    case Method::KatyushaX:
      return "katyushax";
    case Method::IPreKatX:
      return "iprekatx";
  }
  return "unknown";
}

Index sample_epoch_length(EpochMode mode, Index m, std::mt19937_64& rng) {
  if (m < 1) throw InputError("sample_epoch_length: m must be >= 1");
  if (mode == EpochMode::Fixed || m == 1) return m - 1;
  std::geometric_distribution<Index> geom(1.0 / static_cast<double>(m));
  return geom(rng);
}

Vector variance_reduced_gradient(const Vector& g, const FiniteSumObjective& prob, Index i,
                                 const Vector& w_t, const Vector& w_0) {
  detail::require_dim(g.size(), prob.d(), "variance_reduced_gradient");
  Vector out = g;
  prob.add_component_gradient(i, w_t, 1.0, out);
  prob.add_component_gradient(i, w_0, -1.0, out);
  return out;
}

Vector momentum_step(const Vector& y_k, const Vector& x_k, const Vector& y_km1, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw InputError("momentum_step: tau must lie in (0, 1]");
  detail::require_dim(x_k.size(), y_k.size(), "momentum_step x_k");
  detail::require_dim(y_km1.size(), y_k.size(), "momentum_step y_km1");
  return (1.5 * y_k + 0.5 * x_k - (1.0 - tau) * y_km1) / (1.0 + tau);
}

RunTrace run_ipresvrg(const FiniteSumObjective& prob, const Regularizer& reg,
                      const SolverConfig& cfg) {
  if (cfg.method != Method::Svrg && cfg.method != Method::IPreSvrg) {
    throw InputError("run_ipresvrg: method must be svrg or ipresvrg");
  }
  RunTrace trace;
  EpochRunner runner(prob, reg, cfg, trace);
  Vector x = runner.initial_point();
  bool stop = runner.record(0, x);
  for (int k = 1; k <= cfg.epochs && !stop; ++k) {
    x = runner.epoch(x);
    stop = runner.record(k, x);
  }
  trace.x_final = std::move(x);
  return trace;
}

RunTrace run_iprekatx(const FiniteSumObjective& prob, const Regularizer& reg,
                      const SolverConfig& cfg) {
  if (cfg.method != Method::KatyushaX && cfg.method != Method::IPreKatX) {
    throw InputError("run_iprekatx: method must be katyushax or iprekatx");
  }
  RunTrace trace;
  EpochRunner runner(prob, reg, cfg, trace);
  const double tau = resolve_tau(cfg, trace);
  Vector x = runner.initial_point();
  Vector y = x;
  Vector y_prev = x;
  bool stop = runner.record(0, y);
  for (int k = 1; k <= cfg.epochs && !stop; ++k) {
    x = momentum_step(y, x, y_prev, tau);
    y_prev.swap(y);
    y = runner.epoch(x);
    stop = runner.record(k, y);
  }
  trace.x_final = std::move(y);
  return trace;
}

RunTrace run_solver(const FiniteSumObjective& prob, const Regularizer& reg,
                    const SolverConfig& cfg) {
  if (cfg.method == Method::Svrg || cfg.method == Method::IPreSvrg) {
    return run_ipresvrg(prob, reg, cfg);
  }
  return run_iprekatx(prob, reg, cfg);
}

}  // namespace ipvr
