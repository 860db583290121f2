#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "rqla/sampler.hpp"

namespace rqla::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kPlanning = 2, kValidation = 3 };

struct RunConfig {
  std::string subcommand;
  std::string problem_path;
  double eps = 0.1;
  double delta = 0.1;
  double r_scale = 1.0;
  double split = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t shot_ceiling = kDefaultShotCeiling;
  bool trace = false;
  std::string trace_path;  // defaults to <out>.trace.jsonl, or trace.jsonl for stdout
  bool canonical = false;
  unsigned threads = 1;
  std::string out;  // empty: stdout

  // fourier-check
  std::string func;
  std::optional<double> b, tau, beta, lo, hi;
  std::string series_out;

  // compile-exp
  std::optional<double> t;
  std::optional<std::size_t> r;
  std::size_t samples = 1000;
};

// Range checks on every numeric field; throws ValidationError.
void validate(const RunConfig& config);

// Runs one subcommand and writes the report. Errors go to err; returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace rqla::cli
