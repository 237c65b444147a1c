#pragma once

#include <string>

namespace ipvr::theory {

/// Conditioning of a problem in the Euclidean and in the M-norm.
struct ConditioningSummary {
  double kappa_M = 1.0;    ///< lambda_max(M) / lambda_min(M)
  double kappa_f = 1.0;    ///< L_f / sigma_f
  double kappa_f_M = 1.0;  ///< L_M / sigma_M
  double L_M = 0.0;
  double sigma_M = 0.0;
  double n = 0.0;
  double d = 0.0;
};

/// Error constant of p proximal-gradient steps with step eta*lambda_min/lambda_max^2
/// on the preconditioned subproblem:
///   c(p) = (kappa+1) kappa (tau^p + tau^{p-1}) / (1 - tau^p),  tau = sqrt(1 - 1/kappa^2).
/// Returns 0 for kappa_M == 1, where a single step is exact.
double c_proxgrad(int p, double kappa_M);

/// Contraction factor sqrt(1 - 1/kappa^2) of one proximal-gradient step.
double proxgrad_contraction(double kappa_M);

/// Restart period ceil(2 e sqrt(kappa_M)) of FISTA with restart.
int restart_block(double kappa_M);

/// theta_{j+1} = (1 + sqrt(1 + 4 theta_j^2)) / 2
double fista_theta_next(double theta);

struct FistaRestartConstant {
  double c = 0.0;      ///< 14 kappa rho^p / (1 - rho^p)
  int p0 = 0;          ///< restart block
  double rho = 0.0;    ///< (4 kappa / p0^2)^{1/(2 p0)}
  bool whole_blocks = false;  ///< p is a multiple of p0 (the certified case)
};

/// Error constant of p iterations of FISTA restarted every p0 steps with step
/// eta / lambda_max(M). Self-checks rho <= exp(-1/(2e sqrt(kappa)+1)).
FistaRestartConstant c_fista_restart(int p, double kappa_M);

struct InnerBudget {
  double raw = 0.0;  ///< (2e sqrt(kappa_M) + 1) ln((sqrt(kappa_fM) kappa_M + sqrt(c1)) / c1)
  int p = 0;         ///< raw rounded up to a multiple of p0
  int p0 = 0;
  double c = 0.0;    ///< c_fista_restart(p, kappa_M).c
};

/// Smallest whole-block FISTA-restart budget satisfying 64 kappa_fM c(p)^2 <= 1.
/// The certificate is re-checked on every call; failure throws DefectError.
InnerBudget required_p(double kappa_M, double kappa_fM);

/// c1 = 1 / (64 * 14^2)
inline constexpr double kBudgetConstant = 1.0 / 12544.0;

enum class RateKind { SvrgLike, KatXLike };

/// Per-epoch linear rate: 1/(1 + m eta sigma / 4) or 1/(1 + sqrt(m eta sigma / 2) / 2).
double rate_factor(RateKind kind, double m, double eta, double sigma);

/// Default momentum weight 1/2 sqrt(1/2 m eta sigma_f^M).
double default_momentum_tau(double m, double eta, double sigma_metric);

enum class Variant { Svrg, KatX, IPreSvrg, IPreKatX };

struct ComplexityInputs {
  double n = 0.0;
  double d = 0.0;
  double m = 0.0;
  double eta = 0.0;
  double sigma = 0.0;  ///< sigma_f for the baselines, sigma_f^M for the preconditioned variants
  double p = 0.0;      ///< inner iterations (ignored by the baselines)
  double eps = 0.0;
};

/// Order estimate (constant 1) of the component-gradient count to reach eps.
/// One epoch costs n + m for the baselines and n + (1 + p d) m otherwise.
double gradient_complexity(Variant variant, const ComplexityInputs& in);

/// Epoch length ceil(n / (1 + p d)).
double theory_epoch_length(double n, double d, double p);

enum class Regime { NoGuarantee, Regime1, Regime2 };

std::string to_string(Regime regime);

struct SpeedupReport {
  Regime regime = Regime::NoGuarantee;
  double sqrt_n = 0.0;
  double n2_over_d2 = 0.0;
  /// Predicted complexity ratios (preconditioned / baseline), order estimates.
  /// Zero when no guarantee applies.
  double svrg_ratio = 0.0;
  double katx_ratio = 0.0;
};

/// Classifies kappa_f against sqrt(n) and n^2/d^2 (boundary kappa_f == sqrt(n)
/// is NoGuarantee; kappa_f >= n^2/d^2 is Regime2).
SpeedupReport speedup_regime(double n, double d, double kappa_f);

struct EpochChoice {
  double m = 0.0;
  double complexity = 0.0;
};

/// Minimizes gradient_complexity over integer m in [1, m_max] with
/// eta = 1/(2 sqrt(m)) (L normalized to 1).
EpochChoice best_epoch_length(Variant variant, double n, double d, double sigma, double p,
                              double eps, double m_max);

struct ComplexityComparison {
  double svrg_best_m = 0.0;
  double svrg_complexity = 0.0;
  double ipre_m = 0.0;
  double ipre_p = 0.0;
  double ipre_complexity = 0.0;
  double ratio = 0.0;      ///< ipre_complexity / svrg_complexity
  double predicted = 0.0;  ///< SpeedupReport::svrg_ratio
};

/// Evaluates both SVRG-type complexities with L normalized to 1: the baseline
/// at eta = 1/(2 sqrt(m)), sigma = 1/kappa_f, minimized over m in [1, n]; the
/// preconditioned variant with L^M = 1, sigma^M = 1/kappa_fM, p from
/// required_p and m = ceil(n / (1 + p d)).
ComplexityComparison compare_svrg_complexity(double n, double d, double kappa_f,
                                             double kappa_M, double kappa_fM, double eps);

}  // namespace ipvr::theory
