#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <vector>

#include "ipvr/harness/experiment.hpp"
#include "ipvr/harness/reference.hpp"
#include "ipvr/harness/synthetic.hpp"
#include "ipvr/theory.hpp"

namespace ipvr::cli {
namespace {

namespace fs = std::filesystem;
using harness::format_real;

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct TargetHit {
  std::optional<int> epoch;
  double wall_s = 0.0;
};

// Runs until F - F* <= target (F(x0) - F*) or the epoch budget is spent.
TargetHit run_to_target(const harness::PreparedExperiment& prep, double f_star, double target,
                        harness::ExperimentOutput& out, const harness::ExperimentConfig& cfg) {
  SolverConfig solver = prep.solver;
  double gap0 = -1.0;
  TargetHit hit;
  solver.stop_when = [&](const EpochRecord& r) {
    const double gap = r.objective - f_star;
    if (gap0 < 0.0) gap0 = std::max(gap, 0.0);
    if (gap <= target * gap0) {
      hit.epoch = r.epoch;
      hit.wall_s = r.wall_s;
      return true;
    }
    return false;
  };
  out.trace = run_solver(prep.prob, prep.reg, solver);
  out.trace_path = cfg.output_path;
  out.meta_path = cfg.output_path + ".meta";
  harness::write_trace_csv(out.trace_path, out.trace, f_star);
  harness::write_key_values(out.meta_path, prep.resolved);
  return hit;
}

std::string describe(const TargetHit& h) {
  return h.epoch ? std::to_string(*h.epoch) : std::string("not reached");
}

}  // namespace

int run_command(const RunArgs& args, std::ostream& out) {
  const harness::ExperimentConfig cfg = harness::load_config(args.config);
  std::optional<double> f_star;
  if (!args.reference.empty()) f_star = harness::read_reference_value(args.reference);
  const harness::ExperimentOutput result = harness::run_experiment(cfg, f_star);
  const EpochRecord& last = result.trace.records.back();
  out << "method     " << to_string(cfg.method) << '\n'
      << "epochs     " << last.epoch << '\n'
      << "objective  " << format_real(last.objective) << '\n';
  if (f_star) out << "subopt     " << format_real(last.objective - *f_star) << '\n';
  out << "trace      " << result.trace_path << '\n'
      << "metadata   " << result.meta_path << '\n';
  for (const std::string& w : result.trace.warnings) out << "warning: " << w << '\n';
  return result.trace.diverged ? 2 : 0;
}

int reference_command(const ReferenceArgs& args, std::ostream& out) {
  const harness::ExperimentConfig cfg = harness::load_config(args.config);
  const FiniteSumObjective prob = harness::load_objective(cfg);
  const Regularizer reg = harness::make_regularizer(cfg);
  harness::ReferenceOptions opt;
  opt.tol = args.tol;
  const harness::ReferenceResult ref = harness::compute_reference_optimum(prob, reg, opt);
  const std::string path = args.out.empty() ? cfg.output_path + ".ref" : args.out;
  harness::write_reference(path, ref.f_star, ref.residual, ref.iterations, ref.x_star);
  out << "f_star      " << format_real(ref.f_star) << '\n'
      << "residual    " << format_real(ref.residual) << '\n'
      << "iterations  " << ref.iterations << '\n'
      << "written     " << path << '\n';
  return 0;
}

int gen_command(const GenArgs& args, std::ostream& out) {
  if (args.n < 1 || args.d < 1) throw InputError("gen-synthetic: --n and --d must be >= 1");
  if (args.kind == "nonconvex") {
    const FiniteSumObjective prob = gen_sum_of_nonconvex(args.n, args.d, args.seed);
    harness::Dataset data;
    data.features = prob.data().to_sparse();
    data.labels = prob.labels();
    harness::write_libsvm(args.out, data);
    std::ofstream b(args.out + ".b");
    if (!b) throw InputError("cannot write '" + args.out + ".b'");
    for (Index j = 0; j < prob.d(); ++j) b << format_real(prob.linear_term()[j]) << '\n';
    out << "wrote " << args.out << " and " << args.out << ".b\n";
    return 0;
  }
  harness::SyntheticKind kind = harness::SyntheticKind::Regression;
  if (args.kind == "classification") {
    kind = harness::SyntheticKind::Classification;
  } else if (args.kind != "regression") {
    throw InputError("gen-synthetic: --kind must be regression, classification or nonconvex");
  }
  const harness::Dataset data = harness::gen_synthetic(args.n, args.d, args.cond, args.seed, kind);
  harness::write_libsvm(args.out, data);
  out << "wrote " << args.out << " (" << data.n() << " x " << data.d() << ")\n";
  return 0;
}

int analyze_command(const AnalyzeArgs& a, std::ostream& out) {
  using namespace theory;
  if (!(a.n >= 1.0) || !(a.d >= 1.0)) throw InputError("analyze: --n and --d must be >= 1");
  if (!(a.eps > 0.0 && a.eps < 1.0)) throw InputError("analyze: --eps must lie in (0, 1)");
  const InnerBudget budget = required_p(a.kappa_m, a.kappa_fm);
  const SpeedupReport regime = speedup_regime(a.n, a.d, a.kappa_f);
  const double m_pre = theory_epoch_length(a.n, a.d, budget.p);
  const double p = budget.p;

  const EpochChoice svrg = best_epoch_length(Variant::Svrg, a.n, a.d, 1.0 / a.kappa_f, 0, a.eps, a.n);
  const EpochChoice katx = best_epoch_length(Variant::KatX, a.n, a.d, 1.0 / a.kappa_f, 0, a.eps, a.n);
  auto pre = [&](Variant v) {
    const ComplexityInputs in{a.n, a.d, m_pre, 1.0 / (2.0 * std::sqrt(m_pre)), 1.0 / a.kappa_fm,
                              p, a.eps};
    return gradient_complexity(v, in);
  };
  const double c_ipre = pre(Variant::IPreSvrg);
  const double c_ikatx = pre(Variant::IPreKatX);

  out << "inner budget (FISTA with restart)\n"
      << "  restart block p0        " << budget.p0 << '\n'
      << "  raw p                   " << fixed(budget.raw, 6) << '\n'
      << "  required p              " << budget.p << " (" << budget.p / budget.p0
      << " blocks)\n"
      << "  c(p)                    " << fixed(budget.c, 6) << '\n'
      << "  64 kappa_fM c(p)^2      " << fixed(64.0 * a.kappa_fm * budget.c * budget.c, 6)
      << " (<= 1)\n"
      << "  c_proxgrad(p)           " << fixed(c_proxgrad(budget.p, a.kappa_m), 6) << '\n'
      << "regime                    " << to_string(regime.regime) << " (sqrt(n) = "
      << fixed(regime.sqrt_n) << ", n^2/d^2 = " << fixed(regime.n2_over_d2) << ")\n";
  if (regime.regime != Regime::NoGuarantee) {
    out << "predicted ratio, order estimate\n"
        << "  ipresvrg / svrg         " << fixed(regime.svrg_ratio) << '\n'
        << "  iprekatx / katyushax    " << fixed(regime.katx_ratio) << '\n';
  }
  out << "gradient complexity, order estimate (L = 1, eps = " << fixed(a.eps) << ")\n"
      << "  svrg       m = " << std::setw(10) << std::left << fixed(svrg.m, 8)
      << fixed(svrg.complexity) << '\n'
      << "  katyushax  m = " << std::setw(10) << fixed(katx.m, 8) << fixed(katx.complexity)
      << '\n'
      << "  ipresvrg   m = " << std::setw(10) << fixed(m_pre, 8) << fixed(c_ipre) << '\n'
      << "  iprekatx   m = " << std::setw(10) << fixed(m_pre, 8) << fixed(c_ikatx) << '\n'
      << std::right
      << "note: the guarantees assume kappa_f and kappa_M of the same order and kappa_fM small"
         " (here kappa_fM = "
      << fixed(a.kappa_fm) << "); this is reported, not enforced\n";
  return 0;
}

int bench_command(const BenchArgs& args, std::ostream& out) {
  if (!fs::is_directory(args.config_dir)) {
    throw InputError("bench: '" + args.config_dir + "' is not a directory");
  }
  std::vector<std::string> names;
  const std::string suffix = ".baseline.conf";
  for (const auto& entry : fs::directory_iterator(args.config_dir)) {
    const std::string file = entry.path().filename().string();
    if (file.size() > suffix.size() &&
        file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0) {
      names.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) {
    throw InputError("bench: no <name>.baseline.conf files in '" + args.config_dir + "'");
  }

  out << std::left << std::setw(20) << "name" << std::setw(14) << "baseline" << std::setw(14)
      << "iPreSVRG" << std::setw(14) << "epoch ratio" << "time ratio\n";
  for (const std::string& name : names) {
    const fs::path dir(args.config_dir);
    const harness::ExperimentConfig base_cfg =
        harness::load_config((dir / (name + ".baseline.conf")).string());
    const fs::path pre_path = dir / (name + ".precond.conf");
    if (!fs::exists(pre_path)) throw InputError("bench: missing " + pre_path.string());
    const harness::ExperimentConfig pre_cfg = harness::load_config(pre_path.string());

    const harness::PreparedExperiment base = harness::prepare_experiment(base_cfg);
    const harness::PreparedExperiment pre = harness::prepare_experiment(pre_cfg);
    if (base.prob.n() != pre.prob.n() || base.prob.d() != pre.prob.d()) {
      throw InputError("bench: '" + name + "' pairs configs describing different problems");
    }
    harness::ReferenceOptions opt;
    opt.tol = args.reference_tol;
    const double f_star = harness::compute_reference_optimum(base.prob, base.reg, opt).f_star;

    harness::ExperimentOutput base_out;
    harness::ExperimentOutput pre_out;
    const TargetHit b = run_to_target(base, f_star, args.target, base_out, base_cfg);
    const TargetHit p = run_to_target(pre, f_star, args.target, pre_out, pre_cfg);
    std::string epoch_ratio = "n/a";
    std::string time_ratio = "n/a";
    if (b.epoch && p.epoch && *p.epoch > 0 && p.wall_s > 0.0) {
      epoch_ratio = fixed(static_cast<double>(*b.epoch) / *p.epoch, 3);
      time_ratio = fixed(b.wall_s / p.wall_s, 3);
    }
    out << std::setw(20) << name << std::setw(14) << describe(b) << std::setw(14) << describe(p)
        << std::setw(14) << epoch_ratio << time_ratio << '\n';
  }
  out << std::right << "target: F - F* <= " << fixed(args.target)
      << " (F(x0) - F*); ratios are baseline / iPreSVRG\n";
  return 0;
}

}  // namespace ipvr::cli
