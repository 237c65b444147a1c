// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status 0
// only when every selected criterion passes.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ipvr/harness/experiment.hpp"
#include "ipvr/harness/libsvm.hpp"
#include "ipvr/harness/reference.hpp"
#include "ipvr/harness/synthetic.hpp"
#include "ipvr/solvers.hpp"
#include "ipvr/subsolver.hpp"
#include "ipvr/theory.hpp"

namespace {

using namespace ipvr;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vector normal_vector(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

DenseMatrix normal_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, j) = normal(rng);
  }
  return a;
}

// Q diag(lambda) Q^T, eigenvalues geometric over [1, kappa].
DenseMatrix spd_matrix(Index d, double kappa, std::mt19937_64& rng) {
  const Eigen::MatrixXd g = normal_matrix(d, d, rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  Vector lambda(d);
  for (Index j = 0; j < d; ++j) {
    lambda[j] = d == 1 ? 1.0 : std::pow(kappa, static_cast<double>(j) / static_cast<double>(d - 1));
  }
  Eigen::MatrixXd m = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

FiniteSumObjective seeded_lasso(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return FiniteSumObjective::least_squares(DataMatrix(normal_matrix(n, d, rng)),
                                           normal_vector(n, rng), 0.0);
}

double max_deviation(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a[k] - b[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Epochs until F - F* <= target (F(x0) - F*); nullopt if the cap is hit.
std::optional<int> epochs_to_target(const FiniteSumObjective& prob, const Regularizer& reg,
                                    SolverConfig cfg, double f_star, double target) {
  std::optional<int> hit;
  double gap0 = -1.0;
  cfg.stop_when = [&](const EpochRecord& r) {
    const double gap = r.objective - f_star;
    if (gap0 < 0.0) gap0 = gap;
    if (gap <= target * gap0) {
      hit = r.epoch;
      return true;
    }
    return false;
  };
  run_solver(prob, reg, cfg);
  return hit;
}

std::vector<double> log_grid(double lo, double ratio, int points) {
  std::vector<double> g;
  for (int k = 0; k < points; ++k) g.push_back(lo * std::pow(ratio, k));
  return g;
}

struct Tuned {
  std::optional<int> epochs;
  double eta = 0.0;
};

Tuned tune(const FiniteSumObjective& prob, const Regularizer& reg, const SolverConfig& base,
           const std::vector<double>& grid, double f_star, double target) {
  Tuned best;
  for (double eta : grid) {
    SolverConfig cfg = base;
    cfg.eta = eta;
    const auto e = epochs_to_target(prob, reg, cfg, f_star, target);
    if (e && (!best.epochs || *e < *best.epochs)) best = {e, eta};
  }
  return best;
}

std::string show(const Tuned& t, int cap) {
  if (!t.epochs) return ">" + std::to_string(cap);
  return std::to_string(*t.epochs) + "@" + fmt("%.3g", t.eta);
}

// ---------------------------------------------------------------------------

Outcome reduction_svrg() {
  const FiniteSumObjective prob = seeded_lasso(200, 20, 101);
  const Regularizer reg = Regularizer::l1(1e-2);
  SolverConfig cfg;
  cfg.eta = 0.01;
  cfg.m = 100;
  cfg.epochs = 10;
  cfg.seed = 7;
  cfg.epoch_mode = EpochMode::Geometric;
  cfg.record_iterates = true;
  cfg.method = Method::Svrg;
  const RunTrace svrg = run_solver(prob, reg, cfg);
  cfg.method = Method::IPreSvrg;
  cfg.M = Preconditioner::identity(20);
  cfg.sub = SubsolverConfig{SubsolverEngine::ProxGrad, 1};
  const RunTrace pre = run_solver(prob, reg, cfg);
  const double dev = max_deviation(svrg.iterates, pre.iterates);
  return {dev <= 1e-12 && svrg.iterates.size() == 11,
          "max deviation " + fmt("%.3g", dev) + " <= 1e-12 over 10 epochs"};
}

Outcome reduction_katx() {
  const FiniteSumObjective prob = seeded_lasso(200, 20, 102);
  const Regularizer reg = Regularizer::l1(1e-2);
  SolverConfig cfg;
  cfg.eta = 0.01;
  cfg.m = 100;
  cfg.epochs = 10;
  cfg.seed = 8;
  cfg.epoch_mode = EpochMode::Geometric;
  cfg.record_iterates = true;
  cfg.M = build_preconditioner(prob, PreconditionerChoice::full());
  cfg.method = Method::IPreSvrg;
  const RunTrace plain = run_solver(prob, reg, cfg);
  cfg.method = Method::IPreKatX;
  cfg.momentum_tau = 0.5;
  const RunTrace katx = run_solver(prob, reg, cfg);
  const double dev = max_deviation(plain.iterates, katx.iterates);
  return {dev <= 1e-10 && plain.iterates.size() == 11,
          "max deviation " + fmt("%.3g", dev) + " <= 1e-10 over 10 epochs"};
}

Outcome unbiasedness() {
  std::mt19937_64 rng(103);
  const Index n = 100, d = 12;
  std::vector<FiniteSumObjective> probs;
  probs.push_back(FiniteSumObjective::least_squares(DataMatrix(normal_matrix(n, d, rng)),
                                                    normal_vector(n, rng), 0.01));
  Vector labels = normal_vector(n, rng);
  for (Index i = 0; i < n; ++i) labels[i] = labels[i] >= 0.0 ? 1.0 : -1.0;
  probs.push_back(
      FiniteSumObjective::logistic(DataMatrix(normal_matrix(n, d, rng)), labels, 0.01));
  probs.push_back(gen_sum_of_nonconvex(n, d, 103));
  double worst = 0.0;
  for (const FiniteSumObjective& p : probs) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector wt = normal_vector(d, rng);
      const Vector w0 = normal_vector(d, rng);
      const Vector g = p.full_gradient(w0);
      Vector mean = Vector::Zero(d);
      for (Index i = 0; i < n; ++i) mean += variance_reduced_gradient(g, p, i, wt, w0);
      mean /= static_cast<double>(n);
      const Vector full = p.full_gradient(wt);
      worst = std::max(worst, (mean - full).norm() / std::max(full.norm(), 1e-300));
    }
  }
  return {worst <= 1e-12, "max relative error " + fmt("%.3g", worst) +
                              " <= 1e-12 over 3 kinds x 10 points"};
}

Outcome subsolver_certificate() {
  int violations = 0, checks = 0;
  double worst_ratio = 0.0;
  const Regularizer zero = Regularizer::zero();
  for (double kappa : {1.0, 4.0, 25.0, 100.0}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      std::mt19937_64 rng(1000 * static_cast<std::uint64_t>(kappa) + seed);
      const Index d = 2 + static_cast<Index>(seed % 19);
      const Preconditioner M = Preconditioner::dense(spd_matrix(d, kappa, rng));
      const Vector w = normal_vector(d, rng);
      const Vector g = normal_vector(d, rng);
      const double eta = 0.5 + 0.01 * static_cast<double>(seed);
      const SubproblemSpec spec{w, g, eta, M, zero};
      const int p0 = theory::restart_block(M.cond());
      for (int r = 1; r <= 3; ++r) {
        const Vector w_plus = fista_restart_engine(spec, p0, r);
        const double c = theory::c_fista_restart(r * p0, M.cond()).c;
        const double bound = c / eta * M.m_norm(w_plus - w);
        const double eps = subproblem_residual(spec, w_plus);
        ++checks;
        if (eps > bound) ++violations;
        if (bound > 0.0) worst_ratio = std::max(worst_ratio, eps / bound);
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " +
                               std::to_string(checks) + " checks, max residual/bound " +
                               fmt("%.3g", worst_ratio)};
}

Outcome budget_certificate() {
  bool ok = true;
  double worst = 0.0;
  for (double km : {1.0, 10.0, 100.0, 1000.0}) {
    for (double kf : {1.0, 10.0}) {
      const theory::InnerBudget b = theory::required_p(km, kf);
      const double lhs = 64.0 * kf * b.c * b.c;
      worst = std::max(worst, lhs);
      ok = ok && lhs <= 1.0 && b.p % b.p0 == 0;
    }
  }
  const theory::InnerBudget unit = theory::required_p(1.0, 1.0);
  ok = ok && std::abs(unit.raw - 60.80) <= 0.01;
  return {ok, "max 64 kappa_fM c(p)^2 = " + fmt("%.3g", worst) + " <= 1; raw p(1,1) = " +
                  fmt("%.4f", unit.raw) + " (60.80 +- 0.01), p = " + std::to_string(unit.p)};
}

Outcome desk_speedup() {
  const Index n = 2000, d = 50;
  const double cond = 1.05e4, target = 1e-10;
  const int cap = 400;
  const std::vector<double> grid = log_grid(1e-3, std::sqrt(10.0), 7);
  std::vector<double> ratios;
  std::string per_seed;
  double min_cond = INFINITY;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const harness::Dataset data =
        harness::gen_synthetic(n, d, cond, seed, harness::SyntheticKind::Regression);
    const FiniteSumObjective prob =
        FiniteSumObjective::least_squares(harness::to_data_matrix(data), data.labels, 1e-8);
    const Regularizer reg = Regularizer::l1(1e-3);
    const DenseMatrix dense = prob.data().to_dense();
    const Eigen::MatrixXd gram = Eigen::MatrixXd(dense).transpose() * Eigen::MatrixXd(dense);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    min_cond = std::min(min_cond, ev.maxCoeff() / ev.minCoeff());
    const double f_star = harness::compute_reference_optimum(prob, reg).f_star;

    SolverConfig base;
    base.m = 100;
    base.epochs = cap;
    base.seed = seed;
    base.method = Method::Svrg;
    const Tuned svrg = tune(prob, reg, base, grid, f_star, target);
    base.method = Method::IPreSvrg;
    base.M = build_preconditioner(prob, PreconditionerChoice::full());
    const Tuned pre = tune(prob, reg, base, grid, f_star, target);
    const double se = svrg.epochs ? *svrg.epochs : INFINITY;
    const double pe = pre.epochs ? *pre.epochs : INFINITY;
    ratios.push_back(pre.epochs ? se / pe : 0.0);
    per_seed += " " + show(svrg, cap) + "/" + show(pre, cap);
  }
  const double med = median(ratios);
  return {med >= 3.0 && min_cond >= 1e4,
          "median epoch ratio " + fmt("%.3g", med) + " >= 3 (svrg/ipresvrg epochs@eta:" +
              per_seed + "), Gram cond " + fmt("%.4g", min_cond) + " >= 1e4"};
}

Outcome nonconvex_convergence() {
  const double target = 1e-6;
  const int cap = 200, svrg_cap = 400;
  const std::vector<double> pre_grid = log_grid(1e-3, std::sqrt(10.0), 7);
  const std::vector<double> svrg_grid = log_grid(1e-7, std::sqrt(10.0), 7);
  std::vector<double> pre_epochs, ratios;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const FiniteSumObjective prob = gen_sum_of_nonconvex(2000, 100, seed);
    const Regularizer reg = Regularizer::l1(1e-3);
    const double f_star = harness::compute_reference_optimum(prob, reg).f_star;
    SolverConfig base;
    base.m = 100;
    base.seed = seed;
    base.method = Method::IPreSvrg;
    base.epochs = cap;
    base.M = build_preconditioner(prob, PreconditionerChoice::diag_shift(15.0));
    const Tuned pre = tune(prob, reg, base, pre_grid, f_star, target);
    base.method = Method::Svrg;
    base.epochs = svrg_cap;
    base.M.reset();
    const Tuned svrg = tune(prob, reg, base, svrg_grid, f_star, target);
    pre_epochs.push_back(pre.epochs ? *pre.epochs : INFINITY);
    const double se = svrg.epochs ? *svrg.epochs : INFINITY;
    ratios.push_back(pre.epochs ? se / *pre.epochs : 0.0);
    per_seed += " " + show(pre, cap) + "/" + show(svrg, svrg_cap);
  }
  const double med_pre = median(pre_epochs);
  const double med_ratio = median(ratios);
  return {med_pre <= cap && med_ratio >= 2.0,
          "median ipresvrg epochs " + fmt("%.4g", med_pre) + " <= 200, median svrg ratio " +
              fmt("%.3g", med_ratio) + " >= 2 (ipresvrg/svrg epochs@eta:" + per_seed + ")"};
}

Outcome rate_direction() {
  const Index n = 500, d = 20, m = 100;
  int negative = 0;
  double worst_slope = -INFINITY;
  std::vector<double> contraction;
  double predicted = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const harness::Dataset data =
        harness::gen_synthetic(n, d, 100.0, 500 + seed, harness::SyntheticKind::Regression);
    const FiniteSumObjective prob =
        FiniteSumObjective::least_squares(harness::to_data_matrix(data), data.labels, 1e-8);
    const Regularizer reg = Regularizer::l1(1e-3);
    const Preconditioner M = build_preconditioner(prob, PreconditionerChoice::full());
    const double f_star = harness::compute_reference_optimum(prob, reg).f_star;
    SolverConfig cfg;
    cfg.M = M;
    cfg.m = m;
    cfg.eta = 1.0 / (2.0 * std::sqrt(static_cast<double>(m)) * prob.component_smoothness_bound(M));
    cfg.epochs = 50;
    cfg.seed = seed;
    const RunTrace t = run_solver(prob, reg, cfg);
    if (seed == 0) {
      const double sigma_M = harness::conditioning_summary(prob, M).sigma_M;
      predicted = theory::rate_factor(theory::RateKind::SvrgLike, m, cfg.eta, sigma_M);
    }
    // Least-squares slope of log gap over epochs 5..50.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k_count = 0;
    bool positive = t.records.size() == 51;
    for (int k = 5; k <= 50 && positive; ++k) {
      const double gap = t.records[k].objective - f_star;
      if (!(gap > 0.0)) {
        positive = false;
        break;
      }
      const double y = std::log(gap);
      sx += k;
      sy += y;
      sxx += static_cast<double>(k) * k;
      sxy += k * y;
      ++k_count;
      if (k > 5) {
        contraction.push_back(gap / (t.records[k - 1].objective - f_star));
      }
    }
    const double slope = positive ? (k_count * sxy - sx * sy) / (k_count * sxx - sx * sx) : INFINITY;
    worst_slope = std::max(worst_slope, slope);
    if (slope < 0.0) ++negative;
  }
  return {negative == 20, std::to_string(negative) + "/20 negative slopes, worst " +
                              fmt("%.3g", worst_slope) + "; median contraction " +
                              fmt("%.4f", median(contraction)) + " (theory rate " +
                              fmt("%.4f", predicted) + ")"};
}

Outcome diagonal_exact_optimality() {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> unif(0.1, 10.0);
  double worst_res = 0.0, worst_move = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 1 + trial % 30;
    Vector m(d);
    for (Index j = 0; j < d; ++j) m[j] = unif(rng);
    const Preconditioner M = Preconditioner::diagonal(m);
    const Regularizer reg = trial % 4 == 0 ? Regularizer::zero() : Regularizer::l1(unif(rng) / 10);
    const Vector w = normal_vector(d, rng);
    const Vector g = normal_vector(d, rng);
    const double eta = unif(rng) / 10.0;
    const SubproblemSpec spec{w, g, eta, M, reg};
    const Vector y = diagonal_exact(spec);
    worst_res = std::max(worst_res, subproblem_residual(spec, y));
    const double gamma = eta * M.lambda_min() / (M.lambda_max() * M.lambda_max());
    const Vector grad = M.apply(y - w) / eta + g;
    const Vector next = prox(reg, Vector(y - gamma * grad), gamma);
    worst_move = std::max(worst_move, M.m_norm(next - y));
  }
  return {worst_res <= 1e-12 && worst_move <= 1e-10,
          "max residual " + fmt("%.3g", worst_res) + " <= 1e-12, max extra-step move " +
              fmt("%.3g", worst_move) + " <= 1e-10"};
}

bool dataset_valid(const harness::Dataset& ds) {
  if (ds.labels.size() != ds.n() || !ds.labels.allFinite()) return false;
  for (int k = 0; k < ds.features.outerSize(); ++k) {
    Index last = -1;
    for (SparseMatrix::InnerIterator it(ds.features, k); it; ++it) {
      if (!std::isfinite(it.value()) || it.col() <= last || it.col() >= ds.d()) return false;
      last = it.col();
    }
  }
  return true;
}

Outcome parser_roundtrip_fuzz() {
  std::mt19937_64 rng(110);
  int roundtrip_fail = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + static_cast<Index>(rng() % 40), d = 1 + static_cast<Index>(rng() % 15);
    std::bernoulli_distribution keep(0.35);
    std::normal_distribution<double> normal(0.0, 100.0);
    DenseMatrix dense = DenseMatrix::Zero(n, d);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) {
        if (keep(rng)) dense(i, j) = normal(rng);
      }
    }
    harness::Dataset ds;
    ds.features = dense.sparseView();
    ds.labels = normal_vector(n, rng);
    std::ostringstream out;
    harness::write_libsvm(out, ds);
    std::istringstream in(out.str());
    const harness::Dataset back = harness::parse_libsvm(in, d);
    if (Eigen::MatrixXd(back.features) != Eigen::MatrixXd(ds.features) ||
        back.labels != ds.labels) {
      ++roundtrip_fail;
    }
  }

  const std::string alphabet = "0123456789:.-+eE \t#xn";
  const std::vector<std::string> seeds = {"-1 1:0.25 4:-3.5e2 7:1", "+1 2:1e-300 3:7",
                                          "0.5 10:2.5", "1"};
  int valid = 0, errors = 0, bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::string line = seeds[rng() % seeds.size()];
    const int edits = 1 + static_cast<int>(rng() % 5);
    for (int e = 0; e < edits; ++e) {
      const std::size_t pos = rng() % (line.size() + 1);
      const char c = alphabet[rng() % alphabet.size()];
      switch (rng() % 3) {
        case 0:
          line.insert(pos, 1, c);
          break;
        case 1:
          if (pos < line.size()) line.erase(pos, 1);
          break;
        default:
          if (pos < line.size()) line[pos] = c;
      }
    }
    try {
      std::istringstream in(line + "\n");
      if (dataset_valid(harness::parse_libsvm(in))) {
        ++valid;
      } else {
        ++bad;
      }
    } catch (const harness::ParseError&) {
      ++errors;
    } catch (...) {
      ++bad;
    }
  }
  return {roundtrip_fail == 0 && bad == 0,
          std::to_string(20 - roundtrip_fail) + "/20 round trips exact; fuzz: " +
              std::to_string(valid) + " valid, " + std::to_string(errors) +
              " structured errors, " + std::to_string(bad) + " invalid"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "reduction equivalence (SVRG)", 1.0, reduction_svrg},
      {2, "reduction equivalence (Katyusha)", 1.0, reduction_katx},
      {3, "unbiasedness", 1.0, unbiasedness},
      {4, "subsolver error certificate", 5.0, subsolver_certificate},
      {5, "inner budget certificate", 0.1, budget_certificate},
      {6, "desk-scale speedup", 120.0, desk_speedup},
      {7, "sum-of-nonconvex convergence", 180.0, nonconvex_convergence},
      {8, "rate direction", 30.0, rate_direction},
      {9, "diagonal-exact optimality", 1.0, diagonal_exact_optimality},
      {10, "parser round-trip and fuzz", 10.0, parser_roundtrip_fuzz},
  };

  bool all = true;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  AC" << c.id << "  " << c.name << ": " << o.detail
              << "; " << fmt("%.3g", secs) << " s < " << fmt("%g", c.time_limit_s) << " s"
              << (in_time ? "" : " (time limit exceeded)") << std::endl;
  }
  return all ? 0 : 1;
}
