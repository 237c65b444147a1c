#pragma once

#include <cstdint>
#include <optional>

#include "ipvr/common.hpp"
#include "ipvr/metric.hpp"
#include "ipvr/problems.hpp"

namespace ipvr {

/// One instance of the inner problem
///   argmin_y  psi(y) + (1/2 eta) ||y - w_t||_M^2 + <grad_tilde, y>.
/// Non-owning: the referenced objects must outlive the view.
struct SubproblemSpec {
  const Vector& w_t;
  const Vector& grad_tilde;
  double eta;
  const Preconditioner& M;
  const Regularizer& reg;
};

enum class SubsolverEngine { ProxGrad, Fista, FistaRestart, DiagonalExact };

/// How a FistaRestart budget that is not a multiple of p0 is handled.
///   Certified -> p is rounded up to ceil(p / p0) * p0
///   Practical -> exactly p iterations, the final block truncated
enum class BudgetMode { Certified, Practical };

struct SubsolverConfig {
  SubsolverEngine engine = SubsolverEngine::Fista;
  int p = 20;
  std::optional<double> gamma;          ///< overrides the engine's default step
  std::optional<int> restart_block;     ///< p0 for FistaRestart
  BudgetMode mode = BudgetMode::Certified;
};

/// Fista with p = 20 for dense M, DiagonalExact with p = 1 otherwise.
SubsolverConfig default_subsolver(const Preconditioner& M);

/// Throws InputError when cfg cannot be used with M.
void validate_subsolver(const SubsolverConfig& cfg, const Preconditioner& M);

/// Work performed by a solve. M-applications are not counted for Identity.
struct SolveCounters {
  std::int64_t matvecs = 0;
  std::int64_t prox_calls = 0;
};

/// Scratch buffers reused across solves on a hot path.
struct SubsolverWorkspace {
  Vector prev;
  Vector z;
  Vector grad;
  Vector mv;
};

/// Runs the configured engine from w_t and writes the result to out.
void solve_subproblem(const SubproblemSpec& spec, const SubsolverConfig& cfg, Vector& out,
                      SubsolverWorkspace& ws, SolveCounters* counters = nullptr);

Vector solve_subproblem(const SubproblemSpec& spec, const SubsolverConfig& cfg,
                        SolveCounters* counters = nullptr);

/// Coordinatewise closed form for diagonal M. Throws InputError for dense M.
Vector diagonal_exact(const SubproblemSpec& spec);

/// p steps of w <- prox_{gamma psi}(w - gamma grad h(w)),
/// grad h(w) = (1/eta) M (w - w_t) + grad_tilde. Default gamma = eta lambda_min / lambda_max^2.
Vector prox_grad_engine(const SubproblemSpec& spec, int p,
                        std::optional<double> gamma = std::nullopt,
                        SolveCounters* counters = nullptr);

/// r blocks of p0 FISTA steps; theta and momentum restart at every block.
/// Default gamma = eta / lambda_max. With r = 1 this is plain FISTA.
Vector fista_restart_engine(const SubproblemSpec& spec, int p0, int r,
                            std::optional<double> gamma = std::nullopt,
                            SolveCounters* counters = nullptr);

/// sqrt((q - s)^T M^{-1} (q - s)) with q = -(1/eta) M (w_plus - w_t) - grad_tilde and
/// s the coordinatewise projection of q onto the subdifferential of psi at w_plus.
double subproblem_residual(const SubproblemSpec& spec, const Vector& w_plus);

/// psi(y) + (1/2 eta) ||y - w_t||_M^2 + <grad_tilde, y>
double subproblem_objective(const SubproblemSpec& spec, const Vector& y);

}  // namespace ipvr
