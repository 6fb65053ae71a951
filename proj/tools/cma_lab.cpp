#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cma/jobspec.hpp"
#include "cma/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "cma_lab: Dirichlet solves, power-convexity audits and constant-rank "
      "certificate suites for the complex Monge-Ampere equation on R^4"};

  std::string spec_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  bool verbose = false;

  app.add_option("--spec", spec_path, "job spec JSON file")->required();
  app.add_option("--out", out_dir, "output directory (overrides the spec)");
  app.add_option("--seed", seed, "RNG seed (overrides the spec)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", threads, "worker threads (speed only, never results)");
  app.add_flag("--verbose", verbose, "chatty progress on stderr");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(spec_path);
  if (!in) {
    std::cerr << "cannot open spec file: " << spec_path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  cma::cli::JobSpec spec;
  try {
    spec = cma::cli::parse_jobspec(buf.str());
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  }
  if (!out_dir.empty()) spec.out_dir = out_dir;
  if (seed_set) spec.seed = seed;
  spec.threads = threads;
  spec.verbose = verbose;

  if (verbose) {
    std::cerr << "command=" << spec.command << " out=" << spec.out_dir
              << " seed=" << spec.seed << " kernels="
              << cma::kernels::backend_name(cma::kernels::active_backend()) << "\n";
  }
  return cma::cli::run(spec);
}
