#include <benchmark/benchmark.h>

#include <random>

#include "ipvr/harness/experiment.hpp"
#include "ipvr/harness/synthetic.hpp"
#include "ipvr/problems.hpp"
#include "ipvr/solvers.hpp"
#include "ipvr/subsolver.hpp"

namespace {

using namespace ipvr;

FiniteSumObjective lasso(Index n, Index d) {
  const harness::Dataset data =
      harness::gen_synthetic(n, d, 1e3, 7, harness::SyntheticKind::Regression);
  return FiniteSumObjective::least_squares(harness::to_data_matrix(data), data.labels, 1e-8);
}

Vector gaussian(Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

void BM_Subsolver(benchmark::State& state, SubsolverEngine engine, bool dense) {
  const Index d = state.range(0);
  const FiniteSumObjective prob = lasso(4 * d, d);
  const Preconditioner M =
      build_preconditioner(prob, dense ? PreconditionerChoice::full()
                                       : PreconditionerChoice::diag_shift(1e-3));
  const Regularizer reg = Regularizer::l1(1e-3);
  const Vector w = gaussian(d, 1), g = gaussian(d, 2);
  const SubproblemSpec spec{w, g, 0.1, M, reg};
  SubsolverConfig cfg;
  cfg.engine = engine;
  cfg.p = 20;
  SubsolverWorkspace ws;
  Vector out(d);
  for (auto _ : state) {
    solve_subproblem(spec, cfg, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK_CAPTURE(BM_Subsolver, prox_grad, SubsolverEngine::ProxGrad, true)->Arg(20)->Arg(100);
BENCHMARK_CAPTURE(BM_Subsolver, fista, SubsolverEngine::Fista, true)->Arg(20)->Arg(100);
BENCHMARK_CAPTURE(BM_Subsolver, fista_restart, SubsolverEngine::FistaRestart, true)
    ->Arg(20)
    ->Arg(100);
BENCHMARK_CAPTURE(BM_Subsolver, diagonal_exact, SubsolverEngine::DiagonalExact, false)
    ->Arg(20)
    ->Arg(100);

void BM_VarianceReducedGradient(benchmark::State& state) {
  const Index d = state.range(0);
  const FiniteSumObjective prob = lasso(1000, d);
  const Vector w = gaussian(d, 3), w0 = gaussian(d, 4), g = prob.full_gradient(w0);
  Index i = 0;
  for (auto _ : state) {
    Vector v = variance_reduced_gradient(g, prob, i, w, w0);
    benchmark::DoNotOptimize(v.data());
    i = (i + 1) % prob.n();
  }
}
BENCHMARK(BM_VarianceReducedGradient)->Arg(20)->Arg(100);

void BM_Epoch(benchmark::State& state, Method method) {
  const FiniteSumObjective prob = lasso(2000, 50);
  const Regularizer reg = Regularizer::l1(1e-3);
  SolverConfig cfg;
  cfg.method = method;
  cfg.eta = method == Method::Svrg || method == Method::KatyushaX ? 1e-2 : 0.1;
  cfg.m = 200;
  cfg.epochs = 1;
  cfg.momentum_tau = 0.45;
  if (method == Method::IPreSvrg || method == Method::IPreKatX) {
    cfg.M = build_preconditioner(prob, PreconditionerChoice::full());
  }
  for (auto _ : state) {
    RunTrace t = run_solver(prob, reg, cfg);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK_CAPTURE(BM_Epoch, svrg, Method::Svrg);
BENCHMARK_CAPTURE(BM_Epoch, ipresvrg, Method::IPreSvrg);
BENCHMARK_CAPTURE(BM_Epoch, katx, Method::KatyushaX);
BENCHMARK_CAPTURE(BM_Epoch, iprekatx, Method::IPreKatX);

}  // namespace

BENCHMARK_MAIN();
