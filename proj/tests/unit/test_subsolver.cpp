#include <gtest/gtest.h>

#include "ipvr/subsolver.hpp"
#include "ipvr/theory.hpp"
#include "test_util.hpp"

namespace ipvr {
namespace {

// Owns the data a SubproblemSpec points into.
struct Instance {
  Vector w;
  Vector g;
  double eta;
  Preconditioner M;
  Regularizer reg;

  SubproblemSpec spec() const { return {w, g, eta, M, reg}; }
  // Exact minimizer for reg = Zero.
  Vector smooth_solution() const { return w - eta * M.solve(g); }
};

Instance dense_instance(Index d, double kappa, Regularizer reg, std::mt19937_64& rng) {
  return {test::random_vector(d, rng), test::random_vector(d, rng), 0.7,
          Preconditioner::dense(test::random_spd(d, kappa, rng)), reg};
}

double m_dist(const Preconditioner& M, const Vector& a, const Vector& b) {
  return M.m_norm(a - b);
}

TEST(Subsolver, IdentityProxGradIsOneExactStep) {
  std::mt19937_64 rng(1);
  const Instance inst{test::random_vector(4, rng), test::random_vector(4, rng), 0.3,
                      Preconditioner::identity(4), Regularizer::zero()};
  const Vector exact = inst.w - inst.eta * inst.g;
  for (int p : {1, 3}) {
    SubsolverConfig cfg{SubsolverEngine::ProxGrad, p, inst.eta};
    EXPECT_LT((solve_subproblem(inst.spec(), cfg) - exact).norm(), 1e-14) << "p=" << p;
  }
}

TEST(Subsolver, IdentityShortcutIsClassicalProxStep) {
  std::mt19937_64 rng(2);
  const Instance inst{test::random_vector(6, rng), test::random_vector(6, rng), 0.4,
                      Preconditioner::identity(6), Regularizer::l1(0.5)};
  const SubsolverConfig cfg{SubsolverEngine::ProxGrad, 1, inst.eta};
  EXPECT_EQ(solve_subproblem(inst.spec(), cfg),
            prox(inst.reg, Vector(inst.w - inst.eta * inst.g), inst.eta));
}

TEST(Subsolver, DiagonalExactExamples) {
  const Regularizer zero = Regularizer::zero();
  const Vector w0 = Vector::Zero(2);
  Vector g(2);
  g << 1.0, -2.0;
  const Preconditioner I2 = Preconditioner::diagonal(Vector::Ones(2));
  Vector expected(2);
  expected << -1.0, 2.0;
  EXPECT_EQ(diagonal_exact({w0, g, 1.0, I2, zero}), expected);

  const Vector w1 = Vector::Zero(1);
  const Vector g1 = Vector::Constant(1, -3.0);
  const Preconditioner m2 = Preconditioner::diagonal(Vector::Constant(1, 2.0));
  const Regularizer l1 = Regularizer::l1(1.0);
  EXPECT_DOUBLE_EQ(diagonal_exact({w1, g1, 1.0, m2, l1})[0], 1.0);
}

TEST(Subsolver, DiagonalExactHasZeroResidual) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.5, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vector m(8);
    for (Index j = 0; j < 8; ++j) m[j] = unif(rng);
    const Instance inst{test::random_vector(8, rng), test::random_vector(8, rng), 0.9,
                        Preconditioner::diagonal(m), Regularizer::l1(0.3)};
    EXPECT_LE(subproblem_residual(inst.spec(), diagonal_exact(inst.spec())), 1e-12);
  }
}

TEST(Subsolver, FistaRestartMatchesDiagonalExact) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(1.0, 4.0);
  Vector m(5);
  for (Index j = 0; j < 5; ++j) m[j] = unif(rng);
  const Instance inst{test::random_vector(5, rng), test::random_vector(5, rng), 0.5,
                      Preconditioner::diagonal(m), Regularizer::l1(0.2)};
  SubsolverConfig cfg;
  cfg.engine = SubsolverEngine::FistaRestart;
  cfg.p = 60;
  const Vector fista = solve_subproblem(inst.spec(), cfg);
  EXPECT_LE(m_dist(inst.M, fista, diagonal_exact(inst.spec())), 1e-8);
}

TEST(Subsolver, DiagonalExactIsAFixedPointOfProxGrad) {
  std::mt19937_64 rng(5);
  Vector m(6);
  m << 1.0, 2.0, 3.0, 0.5, 4.0, 1.5;
  const Instance inst{test::random_vector(6, rng), test::random_vector(6, rng), 0.8,
                      Preconditioner::diagonal(m), Regularizer::l1(0.4)};
  const Vector y = diagonal_exact(inst.spec());
  const double gamma = inst.eta * inst.M.lambda_min() / std::pow(inst.M.lambda_max(), 2);
  const Vector grad = inst.M.apply(y - inst.w) / inst.eta + inst.g;
  const Vector next = prox(inst.reg, Vector(y - gamma * grad), gamma);
  EXPECT_LE(m_dist(inst.M, next, y), 1e-10);
}

TEST(Subsolver, ProxGradContractsAtPredictedRate) {
  std::mt19937_64 rng(6);
  for (int seed = 0; seed < 50; ++seed) {
    const Index d = 2 + seed % 19;
    const double kappa = 1.0 + static_cast<double>(seed % 7) * 3.0;
    const Instance inst = dense_instance(d, kappa, Regularizer::zero(), rng);
    const Vector w_star = inst.smooth_solution();
    const double tau = std::sqrt(1.0 - 1.0 / (inst.M.cond() * inst.M.cond()));
    double prev = (inst.w - w_star).norm();
    for (int p = 1; p <= 5; ++p) {
      const double err = (prox_grad_engine(inst.spec(), p) - w_star).norm();
      EXPECT_LE(err, tau * prev * (1.0 + 1e-9) + 1e-13) << "seed=" << seed << " p=" << p;
      prev = err;
    }
  }
}

TEST(Subsolver, ScaledIdentityProxGradIsExactInOneStep) {
  std::mt19937_64 rng(7);
  const Instance inst{test::random_vector(5, rng), test::random_vector(5, rng), 0.6,
                      Preconditioner::dense(2.5 * DenseMatrix::Identity(5, 5)),
                      Regularizer::zero()};
  EXPECT_LT((prox_grad_engine(inst.spec(), 1) - inst.smooth_solution()).norm(), 1e-12);
  EXPECT_DOUBLE_EQ(theory::c_proxgrad(1, 1.0), 0.0);
}

TEST(Subsolver, ProxGradObjectiveIsNonincreasing) {
  std::mt19937_64 rng(8);
  for (int seed = 0; seed < 10; ++seed) {
    const Instance inst = dense_instance(10, 30.0, Regularizer::l1(0.3), rng);
    double prev = subproblem_objective(inst.spec(), inst.w);
    for (int p = 1; p <= 30; ++p) {
      const double cur = subproblem_objective(inst.spec(), prox_grad_engine(inst.spec(), p));
      EXPECT_LE(cur, prev + 1e-12 * std::abs(prev));
      prev = cur;
    }
  }
}

TEST(Subsolver, ThetaSequenceAndDefaultBlock) {
  const double t1 = theory::fista_theta_next(1.0);
  EXPECT_NEAR(t1, 1.6180339887, 1e-9);
  // (1 + sqrt(1 + 4 t1^2)) / 2 with t1^2 = t1 + 1.
  EXPECT_NEAR(theory::fista_theta_next(t1), (1.0 + std::sqrt(5.0 + 4.0 * t1)) / 2.0, 1e-15);
  EXPECT_NEAR(theory::fista_theta_next(t1), 2.1935, 1e-4);
  EXPECT_EQ(theory::restart_block(1.0), 6);
}

TEST(Subsolver, FistaRestartBlocksContract) {
  std::mt19937_64 rng(9);
  for (int seed = 0; seed < 50; ++seed) {
    const Index d = 2 + seed % 19;
    const double kappa = 1.0 + static_cast<double>(seed % 5) * 20.0;
    const Instance inst = dense_instance(d, kappa, Regularizer::zero(), rng);
    const Vector w_star = inst.smooth_solution();
    const int p0 = theory::restart_block(inst.M.cond());
    const double factor = std::sqrt(4.0 * inst.M.cond() / (p0 * p0));
    double prev = (inst.w - w_star).norm();
    for (int r = 1; r <= 3; ++r) {
      const double err = (fista_restart_engine(inst.spec(), p0, r) - w_star).norm();
      EXPECT_LE(err, factor * prev * (1.0 + 1e-9) + 1e-13) << "seed=" << seed << " r=" << r;
      prev = err;
    }
  }
}

TEST(Subsolver, SmoothResidualHasClosedForm) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = dense_instance(7, 20.0, Regularizer::zero(), rng);
    const Vector w_plus = test::random_vector(7, rng);
    const double expected = inst.M.m_norm(inst.smooth_solution() - w_plus) / inst.eta;
    EXPECT_NEAR(subproblem_residual(inst.spec(), w_plus), expected, 1e-10 * expected);
  }
}

TEST(Subsolver, FistaRestartSatisfiesErrorCertificate) {
  std::mt19937_64 rng(11);
  for (double kappa : {1.0, 4.0, 25.0, 100.0}) {
    for (int seed = 0; seed < 50; ++seed) {
      const Instance inst = dense_instance(2 + seed % 19, kappa, Regularizer::zero(), rng);
      const int p0 = theory::restart_block(inst.M.cond());
      for (int r = 1; r <= 3; ++r) {
        const Vector w_plus = fista_restart_engine(inst.spec(), p0, r);
        const double c = theory::c_fista_restart(r * p0, inst.M.cond()).c;
        const double bound = c / inst.eta * inst.M.m_norm(w_plus - inst.w);
        EXPECT_LE(subproblem_residual(inst.spec(), w_plus), bound * (1.0 + 1e-9) + 1e-13)
            << "kappa=" << kappa << " seed=" << seed << " r=" << r;
      }
    }
  }
}

TEST(Subsolver, DeterministicOutput) {
  std::mt19937_64 rng(12);
  const Instance inst = dense_instance(9, 50.0, Regularizer::l1(0.1), rng);
  for (SubsolverEngine e :
       {SubsolverEngine::ProxGrad, SubsolverEngine::Fista, SubsolverEngine::FistaRestart}) {
    SubsolverConfig cfg;
    cfg.engine = e;
    cfg.p = 17;
    EXPECT_EQ(solve_subproblem(inst.spec(), cfg), solve_subproblem(inst.spec(), cfg));
  }
}

TEST(Subsolver, WorkCountersAndBudgetModes) {
  std::mt19937_64 rng(13);
  const Instance inst = dense_instance(4, 1.0, Regularizer::l1(0.1), rng);
  SubsolverConfig cfg;
  SolveCounters fista;
  solve_subproblem(inst.spec(), cfg, &fista);
  EXPECT_EQ(fista.matvecs, 20);
  EXPECT_EQ(fista.prox_calls, 20);

  cfg.engine = SubsolverEngine::FistaRestart;
  cfg.p = 10;  // p0 = 6 at kappa 1
  SolveCounters certified;
  solve_subproblem(inst.spec(), cfg, &certified);
  EXPECT_EQ(certified.prox_calls, 12);
  cfg.mode = BudgetMode::Practical;
  SolveCounters practical;
  solve_subproblem(inst.spec(), cfg, &practical);
  EXPECT_EQ(practical.prox_calls, 10);

  const Instance plain{inst.w, inst.g, inst.eta, Preconditioner::identity(4), inst.reg};
  SolveCounters identity;
  solve_subproblem(plain.spec(), SubsolverConfig{SubsolverEngine::ProxGrad, 3}, &identity);
  EXPECT_EQ(identity.matvecs, 0);
  EXPECT_EQ(identity.prox_calls, 3);
}

TEST(Subsolver, ConfigurationValidation) {
  std::mt19937_64 rng(14);
  const Instance inst = dense_instance(3, 4.0, Regularizer::zero(), rng);
  EXPECT_THROW(solve_subproblem(inst.spec(), SubsolverConfig{SubsolverEngine::DiagonalExact, 1}),
               InputError);
  EXPECT_THROW(diagonal_exact(inst.spec()), InputError);
  EXPECT_THROW(solve_subproblem(inst.spec(), SubsolverConfig{SubsolverEngine::Fista, 0}),
               InputError);
  SubsolverConfig bad_gamma;
  bad_gamma.gamma = -1.0;
  EXPECT_THROW(solve_subproblem(inst.spec(), bad_gamma), InputError);
  const Vector w = inst.w;
  const Vector g = inst.g;
  EXPECT_THROW(solve_subproblem({w, g, 0.0, inst.M, inst.reg}, SubsolverConfig{}), InputError);

  EXPECT_EQ(default_subsolver(inst.M).engine, SubsolverEngine::Fista);
  EXPECT_EQ(default_subsolver(inst.M).p, 20);
  EXPECT_EQ(default_subsolver(Preconditioner::identity(3)).engine,
            SubsolverEngine::DiagonalExact);
  EXPECT_EQ(default_subsolver(Preconditioner::identity(3)).p, 1);
}

}  // namespace
}  // namespace ipvr
