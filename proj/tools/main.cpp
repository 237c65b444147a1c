#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "ipvr/common.hpp"

int main(int argc, char** argv) {
  using namespace ipvr::cli;
  CLI::App app{"Inexact preconditioned variance-reduced solvers"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment and write its trace");
  run_cmd->add_option("config", run.config, "Experiment config file")->required();
  run_cmd->add_option("--reference", run.reference, "Reference file providing f_star");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand(
      "bench", "Paired <name>.baseline.conf / <name>.precond.conf runs with a speedup table");
  bench_cmd->add_option("config_dir", bench.config_dir, "Directory of paired configs")
      ->required();
  bench_cmd->add_option("--target", bench.target, "Relative suboptimality target")
      ->capture_default_str();
  bench_cmd->add_option("--reference-tol", bench.reference_tol, "Reference solver tolerance")
      ->capture_default_str();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic LIBSVM dataset");
  gen_cmd->add_option("--n", gen.n, "Rows")->required();
  gen_cmd->add_option("--d", gen.d, "Features")->required();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output path")->required();
  gen_cmd->add_option("--kind", gen.kind, "regression, classification or nonconvex")
      ->capture_default_str();
  gen_cmd->add_option("--cond", gen.cond, "Gram condition number")->capture_default_str();

  ReferenceArgs ref;
  auto* ref_cmd = app.add_subcommand("reference", "Compute x* and F* for a config");
  ref_cmd->add_option("config", ref.config, "Experiment config file")->required();
  ref_cmd->add_option("--tol", ref.tol, "Fixed-point residual tolerance")->capture_default_str();
  ref_cmd->add_option("--out", ref.out, "Output file (default <output.path>.ref)");

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "Theory report for given condition numbers");
  an_cmd->add_option("--n", an.n, "Number of components")->required();
  an_cmd->add_option("--d", an.d, "Dimension")->required();
  an_cmd->add_option("--kappa-f", an.kappa_f, "Condition number of f")->required();
  an_cmd->add_option("--kappa-m", an.kappa_m, "Condition number of M")->required();
  an_cmd->add_option("--kappa-fm", an.kappa_fm, "Condition number of f in the M-norm")
      ->required();
  an_cmd->add_option("--eps", an.eps, "Target accuracy")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return run_command(run, std::cout);
    if (*bench_cmd) return bench_command(bench, std::cout);
    if (*gen_cmd) return gen_command(gen, std::cout);
    if (*ref_cmd) return reference_command(ref, std::cout);
    if (*an_cmd) return analyze_command(an, std::cout);
  } catch (const ipvr::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ipvr::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
