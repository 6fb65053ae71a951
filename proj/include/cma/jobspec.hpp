#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cma/matrix.hpp"

// Batch job specification: JSON in, CSV + JSON + flat binary fields out.
// Exit codes: 0 success, 1 validation error, 2 numerical failure with the
// failing check named on the diagnostic stream.

namespace cma::cli {

struct JobSpec {
  std::string command;        // solve | audit | certify | deform | identities
  std::string body_json;      // body spec, empty for certify/identities
  double h = 0.0;
  double psi = 1.0;
  double tol_factor = 1e-8;
  int max_newton = 40;
  std::string mode = "strict";  // strict | heuristic
  std::vector<double> t_values;
  std::optional<double> alpha;
  double rank_tol = 1e-6;
  std::optional<double> strip_eps;  // default 4h
  int suite_size = 1000;
  int x_per_jet = 10;
  std::uint64_t seed = 42;
  std::optional<double> comparison_a;  // enables the cone comparison check
  std::optional<Vec4> decay_z;         // enables the decay probe
  std::string out_dir = ".";
  int threads = 1;
  bool verbose = false;
};

/// Parses and validates; throws std::invalid_argument with field diagnostics.
JobSpec parse_jobspec(const std::string& json_text);

/// Executes the named pipeline and writes all outputs under spec.out_dir.
int run(const JobSpec& spec);

} // namespace cma::cli
