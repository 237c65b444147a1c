#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace ipvr::cli {

struct RunArgs {
  std::string config;
  std::string reference;
};

struct BenchArgs {
  std::string config_dir;
  double target = 1e-6;
  double reference_tol = 1e-10;
};

struct GenArgs {
  long long n = 0;
  long long d = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string kind = "regression";
  double cond = 1e4;
};

struct ReferenceArgs {
  std::string config;
  double tol = 1e-12;
  std::string out;
};

struct AnalyzeArgs {
  double n = 0.0;
  double d = 0.0;
  double kappa_f = 0.0;
  double kappa_m = 0.0;
  double kappa_fm = 0.0;
  double eps = 1e-6;
};

int run_command(const RunArgs& args, std::ostream& out);
int bench_command(const BenchArgs& args, std::ostream& out);
int gen_command(const GenArgs& args, std::ostream& out);
int reference_command(const ReferenceArgs& args, std::ostream& out);
int analyze_command(const AnalyzeArgs& args, std::ostream& out);

}  // namespace ipvr::cli
