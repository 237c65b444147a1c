#include "ipvr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ipvr/common.hpp"

namespace ipvr::theory {
namespace {

void require_kappa(double kappa, const char* what) {
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw InputError(std::string(what) + ": condition number must be finite and >= 1");
  }
}

void require_p(int p, const char* what) {
  if (p < 1) throw InputError(std::string(what) + ": p must be >= 1");
}

}  // namespace

double proxgrad_contraction(double kappa_M) {
  require_kappa(kappa_M, "proxgrad_contraction");
  return std::sqrt(1.0 - 1.0 / (kappa_M * kappa_M));
}

double c_proxgrad(int p, double kappa_M) {
  require_p(p, "c_proxgrad");
  require_kappa(kappa_M, "c_proxgrad");
  if (kappa_M == 1.0) return 0.0;
  const double tau = proxgrad_contraction(kappa_M);
  const double tp = std::pow(tau, p);
  return (kappa_M + 1.0) * kappa_M * (tp + std::pow(tau, p - 1)) / (1.0 - tp);
}

int restart_block(double kappa_M) {
  require_kappa(kappa_M, "restart_block");
  return static_cast<int>(std::ceil(2.0 * std::numbers::e * std::sqrt(kappa_M)));
}

double fista_theta_next(double theta) {
  return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
}

FistaRestartConstant c_fista_restart(int p, double kappa_M) {
  require_p(p, "c_fista_restart");
  FistaRestartConstant out;
  out.p0 = restart_block(kappa_M);
  const double p0 = out.p0;
  out.rho = std::pow(4.0 * kappa_M / (p0 * p0), 1.0 / (2.0 * p0));
  const double ceiling = std::exp(-1.0 / (2.0 * std::numbers::e * std::sqrt(kappa_M) + 1.0));
  if (out.rho > ceiling * (1.0 + 1e-14)) {
    throw DefectError("c_fista_restart: contraction exceeds exp(-1/(2e sqrt(kappa)+1))");
  }
  const double rp = std::pow(out.rho, p);
  out.c = 14.0 * kappa_M * rp / (1.0 - rp);
  out.whole_blocks = p % out.p0 == 0;
  return out;
}

InnerBudget required_p(double kappa_M, double kappa_fM) {
  require_kappa(kappa_M, "required_p");
  require_kappa(kappa_fM, "required_p");
  const double c1 = kBudgetConstant;
  InnerBudget out;
  out.p0 = restart_block(kappa_M);
  out.raw = (2.0 * std::numbers::e * std::sqrt(kappa_M) + 1.0) *
            std::log((std::sqrt(kappa_fM) * kappa_M + std::sqrt(c1)) / c1);
  const double blocks = std::max(1.0, std::ceil(out.raw / out.p0));
  out.p = static_cast<int>(blocks) * out.p0;
  out.c = c_fista_restart(out.p, kappa_M).c;
  if (64.0 * kappa_fM * out.c * out.c > 1.0) {
    throw DefectError("required_p: certificate 64 kappa_fM c(p)^2 <= 1 failed");
  }
  return out;
}

double rate_factor(RateKind kind, double m, double eta, double sigma) {
  const double x = m * eta * sigma;
  if (!(x > 0.0)) throw InputError("rate_factor: m * eta * sigma must be positive");
  if (kind == RateKind::SvrgLike) return 1.0 / (1.0 + 0.25 * x);
  return 1.0 / (1.0 + 0.5 * std::sqrt(0.5 * x));
}

double default_momentum_tau(double m, double eta, double sigma_metric) {
  return 0.5 * std::sqrt(0.5 * m * eta * sigma_metric);
}

double gradient_complexity(Variant variant, const ComplexityInputs& in) {
  if (!(in.n > 0.0) || !(in.m > 0.0) || !(in.eta > 0.0) || !(in.sigma > 0.0)) {
    throw InputError("gradient_complexity: n, m, eta and sigma must be positive");
  }
  if (!(in.eps > 0.0 && in.eps < 1.0)) {
    throw InputError("gradient_complexity: eps must lie in (0, 1)");
  }
  const double x = in.m * in.eta * in.sigma;
  const bool accelerated = variant == Variant::KatX || variant == Variant::IPreKatX;
  const bool preconditioned = variant == Variant::IPreSvrg || variant == Variant::IPreKatX;
  const double per_epoch =
      preconditioned ? in.n + (1.0 + in.p * in.d) * in.m : in.n + in.m;
  const double rate = accelerated ? std::log1p(0.5 * std::sqrt(0.5 * x))
                                  : std::log1p(0.25 * x);
  return per_epoch / rate * std::log(1.0 / in.eps);
}

double theory_epoch_length(double n, double d, double p) {
  return std::ceil(n / (1.0 + p * d));
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::NoGuarantee:
      return "no-guarantee";
    case Regime::Regime1:
      return "regime-1";
    case Regime::Regime2:
      return "regime-2";
  }
  return "unknown";
}

SpeedupReport speedup_regime(double n, double d, double kappa_f) {
  if (!(n >= 1.0) || !(d >= 1.0) || !(kappa_f >= 1.0)) {
    throw InputError("speedup_regime: n, d and kappa_f must be >= 1");
  }
  SpeedupReport r;
  r.sqrt_n = std::sqrt(n);
  r.n2_over_d2 = n * n / (d * d);
  if (kappa_f <= r.sqrt_n) {
    r.regime = Regime::NoGuarantee;
  } else if (kappa_f < r.n2_over_d2) {
    r.regime = Regime::Regime1;
    r.svrg_ratio = r.sqrt_n / kappa_f;
    r.katx_ratio = std::sqrt(r.sqrt_n / kappa_f);
  } else {
    r.regime = Regime::Regime2;
    r.svrg_ratio = d / std::sqrt(n * kappa_f);
    r.katx_ratio = d / std::pow(n, 0.75);
  }
  return r;
}

EpochChoice best_epoch_length(Variant variant, double n, double d, double sigma, double p,
                              double eps, double m_max) {
  if (!(m_max >= 1.0)) throw InputError("best_epoch_length: m_max must be >= 1");
  auto at = [&](double m) {
    const ComplexityInputs in{n, d, m, 1.0 / (2.0 * std::sqrt(m)), sigma, p, eps};
    return gradient_complexity(variant, in);
  };
  EpochChoice best{1.0, at(1.0)};
  auto consider = [&](double m) {
    const double v = at(m);
    if (v < best.complexity) best = {m, v};
  };
  // The complexity is unimodal in m: a geometric scan followed by an integer
  // refine around the best grid point.
  for (double m = 1.0; m <= m_max; m = std::max(m + 1.0, std::floor(m * 1.01))) consider(m);
  consider(std::floor(m_max));
  const double lo = std::max(1.0, std::floor(best.m / 1.02));
  const double hi = std::min(std::floor(m_max), std::ceil(best.m * 1.02));
  for (double m = lo; m <= hi; m += 1.0) consider(m);
  return best;
}

ComplexityComparison compare_svrg_complexity(double n, double d, double kappa_f,
                                             double kappa_M, double kappa_fM, double eps) {
  ComplexityComparison out;
  const EpochChoice svrg = best_epoch_length(Variant::Svrg, n, d, 1.0 / kappa_f, 0.0, eps, n);
  out.svrg_best_m = svrg.m;
  out.svrg_complexity = svrg.complexity;

  const InnerBudget budget = required_p(kappa_M, kappa_fM);
  out.ipre_p = budget.p;
  out.ipre_m = theory_epoch_length(n, d, budget.p);
  ComplexityInputs in{n,   d, out.ipre_m, 1.0 / (2.0 * std::sqrt(out.ipre_m)),
                      1.0 / kappa_fM, static_cast<double>(budget.p), eps};
  out.ipre_complexity = gradient_complexity(Variant::IPreSvrg, in);
  out.ratio = out.ipre_complexity / out.svrg_complexity;
  out.predicted = speedup_regime(n, d, kappa_f).svrg_ratio;
  return out;
}

}  // namespace ipvr::theory
