#include <iostream>

#include <CLI11.hpp>

#include "rqla/cli.hpp"

int main(int argc, char** argv) {
  using rqla::cli::RunConfig;
  CLI::App app{"Randomized Fourier-sampling estimators for Pauli-access matrices"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&cfg](CLI::App* sub, bool problem) {
    if (problem) sub->add_option("problem", cfg.problem_path, "problem JSON file")->required();
    sub->add_option("--eps", cfg.eps, "target additive error");
    sub->add_option("--delta", cfg.delta, "failure probability");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--r-scale", cfg.r_scale, "segments per term: ceil(r_scale lambda^2 t^2)");
    sub->add_option("--split", cfg.split, "statistical share of the error budget");
    sub->add_option("--shot-ceiling", cfg.shot_ceiling, "refuse plans above this many shots");
    sub->add_option("--threads", cfg.threads, "worker threads (results do not depend on it)");
    sub->add_option("--out", cfg.out, "report path (default stdout)");
    sub->add_flag("--trace", cfg.trace, "write a JSONL shot trace");
    sub->add_option("--trace-out", cfg.trace_path, "trace path");
    sub->add_flag("--canonical", cfg.canonical, "omit wall-clock fields");
  };

  for (const char* name : {"solve-linear", "solve-linear-observable", "ground-state", "gibbs", "greens",
                           "classical-poly", "power-method"})
    common(app.add_subcommand(name, std::string("run the ") + name + " estimator"), true);

  auto* ce = app.add_subcommand("compile-exp", "random-compiler diagnostics for exp(i H t)");
  common(ce, true);
  ce->add_option("--t", cfg.t, "evolution time (else params.t)");
  ce->add_option("--r", cfg.r, "segment count (else chosen from --r-scale)");
  ce->add_option("--samples", cfg.samples, "gate strings to sample");

  auto* fc = app.add_subcommand("fourier-check", "build and re-check a Fourier series");
  common(fc, false);
  fc->add_option("--func", cfg.func, "inverse | gaussian | exp")->required();
  fc->add_option("--b", cfg.b, "inverse: domain [-1,-1/b] u [1/b,1]");
  fc->add_option("--tau", cfg.tau, "gaussian width");
  fc->add_option("--beta", cfg.beta, "exp: e^{-beta x/2}");
  fc->add_option("--lo", cfg.lo, "exp: interval low end");
  fc->add_option("--hi", cfg.hi, "exp: interval high end");
  fc->add_option("--series-out", cfg.series_out, "write the series as JSONL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rqla::cli::kValidation;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  return rqla::cli::run(cfg, std::cout, std::cerr);
}
