#include "ipvr/subsolver.hpp"

#include <algorithm>
#include <cmath>

#include "ipvr/theory.hpp"

namespace ipvr {
namespace {

void check_spec(const SubproblemSpec& spec) {
  if (!(spec.eta > 0.0) || !std::isfinite(spec.eta)) {
    throw InputError("subproblem: eta must be a finite positive number");
  }
  detail::require_dim(spec.w_t.size(), spec.M.dim(), "subproblem w_t");
  detail::require_dim(spec.grad_tilde.size(), spec.M.dim(), "subproblem grad_tilde");
}

double check_gamma(std::optional<double> gamma, double fallback) {
  if (!gamma) return fallback;
  if (!(*gamma > 0.0) || !std::isfinite(*gamma)) {
    throw InputError("subsolver: gamma must be a finite positive number");
  }
  return *gamma;
}

// grad <- (1/eta) M (y - w_t) + grad_tilde
void smooth_gradient(const SubproblemSpec& spec, const Vector& y, SubsolverWorkspace& ws,
                     SolveCounters* counters) {
  ws.z = y - spec.w_t;
  if (spec.M.kind() == PreconditionerKind::Identity) {
    ws.grad = ws.z;
  } else {
    spec.M.apply_to(ws.z, ws.grad);
    if (counters) ++counters->matvecs;
  }
  ws.grad *= 1.0 / spec.eta;
  ws.grad += spec.grad_tilde;
}

// y <- prox_{gamma psi}(y - gamma grad), grad already evaluated at y
void prox_step(const SubproblemSpec& spec, double gamma, Vector& y, const Vector& grad,
               SolveCounters* counters) {
  y -= gamma * grad;
  prox_in_place(spec.reg, y, gamma);
  if (counters) ++counters->prox_calls;
}

void run_prox_grad(const SubproblemSpec& spec, int p, double gamma, Vector& y,
                   SubsolverWorkspace& ws, SolveCounters* counters) {
  y = spec.w_t;
  for (int i = 0; i < p; ++i) {
    smooth_gradient(spec, y, ws, counters);
    prox_step(spec, gamma, y, ws.grad, counters);
  }
}

// `total` FISTA steps restarted every p0 steps; the last block may be short.
void run_fista(const SubproblemSpec& spec, int p0, int total, double gamma, Vector& x,
               SubsolverWorkspace& ws, SolveCounters* counters) {
  x = spec.w_t;
  Vector& y = ws.mv;  // extrapolated point
  for (int done = 0; done < total;) {
    const int block = std::min(p0, total - done);
    double theta = 1.0;
    y = x;
    for (int j = 0; j < block; ++j) {
      ws.prev = x;
      smooth_gradient(spec, y, ws, counters);
      x = y;
      prox_step(spec, gamma, x, ws.grad, counters);
      const double theta_next = theory::fista_theta_next(theta);
      y = x + ((theta - 1.0) / theta_next) * (x - ws.prev);
      theta = theta_next;
    }
    done += block;
  }
}

void run_diagonal(const SubproblemSpec& spec, Vector& y) {
  const Vector m = spec.M.diagonal();
  y.resize(spec.w_t.size());
  const double lambda1 = spec.reg.kind() == RegularizerKind::L1 ? spec.reg.lambda1() : 0.0;
  for (Index j = 0; j < y.size(); ++j) {
    const double step = spec.eta / m[j];
    const double v = spec.w_t[j] - step * spec.grad_tilde[j];
    y[j] = lambda1 > 0.0 ? soft_threshold(v, step * lambda1) : v;
  }
}

double default_prox_gamma(const SubproblemSpec& spec) {
  const double lmax = spec.M.lambda_max();
  return spec.eta * spec.M.lambda_min() / (lmax * lmax);
}

double default_fista_gamma(const SubproblemSpec& spec) {
  return spec.eta / spec.M.lambda_max();
}

}  // namespace

SubsolverConfig default_subsolver(const Preconditioner& M) {
  SubsolverConfig cfg;
  if (M.is_diagonal()) {
    cfg.engine = SubsolverEngine::DiagonalExact;
    cfg.p = 1;
  } else {
    cfg.engine = SubsolverEngine::Fista;
    cfg.p = 20;
  }
  return cfg;
}

void validate_subsolver(const SubsolverConfig& cfg, const Preconditioner& M) {
  if (cfg.p < 1) throw InputError("subsolver: p must be >= 1");
  check_gamma(cfg.gamma, 1.0);
  if (cfg.restart_block && *cfg.restart_block < 1) {
    throw InputError("subsolver: restart_block must be >= 1");
  }
  if (cfg.engine == SubsolverEngine::DiagonalExact && !M.is_diagonal()) {
    throw InputError("subsolver: DiagonalExact requires a diagonal or identity preconditioner");
  }
}

void solve_subproblem(const SubproblemSpec& spec, const SubsolverConfig& cfg, Vector& out,
                      SubsolverWorkspace& ws, SolveCounters* counters) {
  check_spec(spec);
  validate_subsolver(cfg, spec.M);
  switch (cfg.engine) {
    case SubsolverEngine::ProxGrad:
      run_prox_grad(spec, cfg.p, check_gamma(cfg.gamma, default_prox_gamma(spec)), out, ws,
                    counters);
      return;
    case SubsolverEngine::Fista:
      run_fista(spec, cfg.p, cfg.p, check_gamma(cfg.gamma, default_fista_gamma(spec)), out,
                ws, counters);
      return;
    case SubsolverEngine::FistaRestart: {
      const int p0 = cfg.restart_block.value_or(theory::restart_block(spec.M.cond()));
      int total = cfg.p;
      if (cfg.mode == BudgetMode::Certified) total = ((cfg.p + p0 - 1) / p0) * p0;
      run_fista(spec, p0, total, check_gamma(cfg.gamma, default_fista_gamma(spec)), out, ws,
                counters);
      return;
    }
    case SubsolverEngine::DiagonalExact:
      run_diagonal(spec, out);
      if (counters) ++counters->prox_calls;
      return;
  }
}

Vector solve_subproblem(const SubproblemSpec& spec, const SubsolverConfig& cfg,
                        SolveCounters* counters) {
  SubsolverWorkspace ws;
  Vector out;
  solve_subproblem(spec, cfg, out, ws, counters);
  return out;
}

Vector diagonal_exact(const SubproblemSpec& spec) {
  check_spec(spec);
  if (!spec.M.is_diagonal()) {
    throw InputError("diagonal_exact: preconditioner must be diagonal or identity");
  }
  Vector y;
  run_diagonal(spec, y);
  return y;
}

Vector prox_grad_engine(const SubproblemSpec& spec, int p, std::optional<double> gamma,
                        SolveCounters* counters) {
  check_spec(spec);
  if (p < 1) throw InputError("prox_grad_engine: p must be >= 1");
  SubsolverWorkspace ws;
  Vector y;
  run_prox_grad(spec, p, check_gamma(gamma, default_prox_gamma(spec)), y, ws, counters);
  return y;
}

Vector fista_restart_engine(const SubproblemSpec& spec, int p0, int r,
                            std::optional<double> gamma, SolveCounters* counters) {
  check_spec(spec);
  if (p0 < 1 || r < 1) throw InputError("fista_restart_engine: p0 and r must be >= 1");
  SubsolverWorkspace ws;
  Vector x;
  run_fista(spec, p0, p0 * r, check_gamma(gamma, default_fista_gamma(spec)), x, ws, counters);
  return x;
}

double subproblem_residual(const SubproblemSpec& spec, const Vector& w_plus) {
  check_spec(spec);
  detail::require_dim(w_plus.size(), spec.M.dim(), "subproblem_residual");
  Vector q = spec.M.apply(w_plus - spec.w_t);
  q *= -1.0 / spec.eta;
  q -= spec.grad_tilde;
  if (spec.reg.kind() == RegularizerKind::L1) {
    const double lambda1 = spec.reg.lambda1();
    for (Index j = 0; j < q.size(); ++j) {
      double s = 0.0;
      if (w_plus[j] > 0.0) {
        s = lambda1;
      } else if (w_plus[j] < 0.0) {
        s = -lambda1;
      } else {
        s = std::clamp(q[j], -lambda1, lambda1);
      }
      q[j] -= s;
    }
  }
  return std::sqrt(std::max(0.0, q.dot(spec.M.solve(q))));
}

double subproblem_objective(const SubproblemSpec& spec, const Vector& y) {
  check_spec(spec);
  detail::require_dim(y.size(), spec.M.dim(), "subproblem_objective");
  const Vector diff = y - spec.w_t;
  return spec.reg.value(y) + 0.5 / spec.eta * spec.M.m_inner(diff, diff) +
         spec.grad_tilde.dot(y);
}

}  // namespace ipvr
