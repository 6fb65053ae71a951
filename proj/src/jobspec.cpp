#include "cma/jobspec.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include <json.hpp>

#include "cma/audit.hpp"
#include "cma/certificates.hpp"
#include "cma/output.hpp"

namespace cma::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail_field(const std::string& field, const std::string& what) {
  throw std::invalid_argument("job spec field '" + field + "': " + what);
}

solver::SolverConfig solver_config(const JobSpec& spec) {
  solver::SolverConfig cfg;
  cfg.tol_factor = spec.tol_factor;
  cfg.max_newton = spec.max_newton;
  cfg.heuristic = spec.mode == "heuristic";
  cfg.threads = spec.threads;
  return cfg;
}

bodies::ConvexBody body_of(const JobSpec& spec) {
  if (spec.body_json.empty()) fail_field("body", "required for this command");
  return bodies::ConvexBody::from_json(spec.body_json);
}

int run_solve(const JobSpec& spec, const fs::path& out) {
  const auto body = body_of(spec);
  auto grid = solver::discretize(body, spec.h);
  auto [u, rep] = solver::newton_solve(grid, spec.psi, solver_config(spec));

  const std::string stem = output::tagged_stem("field", body, spec.h, spec.psi);
  output::write_field(out, stem, u);
  output::write_text(out / "solve_report.json", output::solve_report_json(rep));
  output::write_text(out / "run_meta.json", output::run_meta_json(rep.wall_ms));

  if (!rep.converged()) {
    std::cerr << "solve failed: status=" << rep.status
              << " final_residual=" << rep.final_residual << "\n";
    return 2;
  }

  int code = 0;
  if (spec.comparison_a) {
    const double a = *spec.comparison_a;
    const double A = 1.0 / std::sqrt(2.0 * (1.0 - a * a));
    const CertificateReport cmp = solver::comparison_check(u, a, A);
    output::write_text(out / "comparison_report.json",
                       output::certificate_report_json(cmp));
    if (!cmp.passed) {
      std::cerr << "comparison_check failed: subsolution_violation="
                << cmp.residual("subsolution_violation") << "\n";
      code = 2;
    }
  }
  if (spec.decay_z) {
    const double alpha = spec.alpha.value_or(0.6);
    json j;
    j["fitted_exponent"] = solver::decay_probe(u, *spec.decay_z, alpha);
    j["alpha"] = alpha;
    j["t_samples"] = std::vector<double>{0.5, 0.4, 0.3, 0.2, 0.1};
    j["scaled_decay"] = solver::decay_samples(u, *spec.decay_z, alpha);
    output::write_text(out / "decay_report.json", j.dump(2) + "\n");
  }
  return code;
}

int run_audit(const JobSpec& spec, const fs::path& out) {
  const auto body = body_of(spec);
  auto grid = solver::discretize(body, spec.h);
  auto [u, rep] = solver::newton_solve(grid, spec.psi, solver_config(spec));
  output::write_text(out / "solve_report.json", output::solve_report_json(rep));
  output::write_text(out / "run_meta.json", output::run_meta_json(rep.wall_ms));
  if (!rep.converged()) {
    std::cerr << "solve failed: status=" << rep.status << "\n";
    return 2;
  }

  const double eps = spec.strip_eps.value_or(4.0 * spec.h);
  const audit::RankMap map = audit::rank_map(u, spec.rank_tol, bodies::StripSpec{eps});
  const std::string stem = output::tagged_stem("audit", body, spec.h, spec.psi);
  output::write_text(out / (stem + ".csv"), output::rank_map_csv(map));

  json summary = json::parse(output::rank_map_summary_json(map));
  if (spec.alpha) {
    summary["alpha"] = *spec.alpha;
    summary["alpha_probe_min_eig"] = audit::alpha_probe(u, *spec.alpha);
  }
  output::write_text(out / (stem + "_summary.json"), summary.dump(2) + "\n");

  if (!map.constant_rank) {
    std::cerr << "audit finding: non-constant rank (min=" << map.min_rank
              << " max=" << map.max_rank << ")\n";
    return 2;
  }
  return 0;
}

int run_certify(const JobSpec& spec, const fs::path& out) {
  const auto r2 = cert::run_rank2_suite(spec.suite_size, spec.seed, spec.x_per_jet);
  const auto r3 = cert::run_rank3_suite(spec.suite_size, spec.seed, spec.x_per_jet);

  output::write_text(out / "certify_rank2.csv", output::rank2_suite_csv(r2));
  output::write_text(out / "certify_rank3.csv", output::rank3_suite_csv(r3));

  json j;
  j["schema_version"] = output::kCsvSchemaVersion;
  j["rank2"] = json::parse(output::suite_summary_json(r2.summary));
  j["rank3"] = json::parse(output::suite_summary_json(r3.summary));
  output::write_text(out / "certify_summary.json", j.dump(2) + "\n");
  output::write_text(out / "run_meta.json", output::run_meta_json(0.0));

  if (r2.summary.failures > 0 || r3.summary.failures > 0) {
    std::cerr << "certificate suite failures: rank2=" << r2.summary.failures
              << " rank3=" << r3.summary.failures << "\n";
    return 2;
  }
  return 0;
}

int run_deform(const JobSpec& spec, const fs::path& out) {
  const auto omega = body_of(spec);
  const auto entries = audit::deformation_sweep(omega, spec.t_values, spec.h, spec.psi,
                                                solver_config(spec), spec.rank_tol);
  json summary;
  summary["schema_version"] = output::kCsvSchemaVersion;
  json per_t = json::array();
  bool all_ok = true;
  std::string failing;
  for (const auto& e : entries) {
    json je;
    je["t"] = e.t;
    je["solve_ok"] = e.solve_ok;
    if (e.solve_ok) {
      je["newton_iterations"] = e.report.iterations;
      je["constant_rank"] = e.map.constant_rank;
      je["min_rank"] = e.map.min_rank;
      je["strip_min_eig"] = e.map.strip_min_eig;
      const std::string stem =
          output::tagged_stem("audit", omega, spec.h, spec.psi, e.t);
      output::write_text(out / (stem + ".csv"), output::rank_map_csv(e.map));
      if (!(e.map.constant_rank && e.map.min_rank == 4 && e.map.strip_min_eig > 0.0)) {
        all_ok = false;
        failing = "rank/strip audit at t=" + output::fmt_g17(e.t);
      }
    } else {
      all_ok = false;
      failing = "solve at t=" + output::fmt_g17(e.t);
    }
    per_t.push_back(std::move(je));
  }
  summary["entries"] = std::move(per_t);
  summary["all_ok"] = all_ok;
  output::write_text(out / "deform_summary.json", summary.dump(2) + "\n");
  output::write_text(out / "run_meta.json", output::run_meta_json(0.0));
  if (!all_ok) {
    std::cerr << "deformation sweep failed: " << failing << "\n";
    return 2;
  }
  return 0;
}

int run_identities(const JobSpec& spec, const fs::path& out) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uv(-3.0, -0.2);
  std::uniform_real_distribution<double> ug(-1.0, 1.0);
  std::uniform_real_distribution<double> uh(0.0, 3.0);

  std::string csv = "kind,v,residual_317,residual_331\n";
  double max317 = 0.0, max331 = 0.0;
  int count331 = 0;
  for (int i = 0; i < spec.suite_size; ++i) {
    monge::Jet2 jet;
    const bool onshell = (i % 2) == 1;
    if (onshell) {
      const auto djet = (i % 4 == 1)
                            ? cert::sample_rank2_jet(rng)
                            : cert::sample_rank3_jet(rng);
      jet = djet.jet;
    } else {
      jet.v = uv(rng);
      for (auto& gg : jet.grad) gg = ug(rng);
      for (int k = 0; k < 4; ++k) jet.hess.set(k, k, uh(rng));
    }
    const CertificateReport rep = monge::identity_suite(jet);
    const double r317 = rep.residual("3.17");
    const double r331 = rep.residual("3.31");
    csv += std::string(onshell ? "onshell" : "diagonal") + "," + output::fmt_g17(jet.v) +
           "," + output::fmt_g17(r317) + "," + output::fmt_g17(r331) + "\n";
    max317 = std::max(max317, r317);
    if (r331 >= 0.0) {
      max331 = std::max(max331, r331);
      ++count331;
    }
  }
  output::write_text(out / "identities.csv", csv);
  json j;
  j["schema_version"] = output::kCsvSchemaVersion;
  j["jets"] = spec.suite_size;
  j["max_residual_317"] = max317;
  j["max_residual_331"] = max331;
  j["onshell_checked_331"] = count331;
  output::write_text(out / "identities_summary.json", j.dump(2) + "\n");
  output::write_text(out / "run_meta.json", output::run_meta_json(0.0));

  if (max317 > 1e-12 || max331 > 1e-12) {
    std::cerr << "identity residual exceeded 1e-12: 3.17=" << max317
              << " 3.31=" << max331 << "\n";
    return 2;
  }
  return 0;
}

} // namespace

JobSpec parse_jobspec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("job spec is not valid JSON: ") + e.what());
  }

  JobSpec spec;
  if (!j.contains("command") || !j["command"].is_string()) {
    fail_field("command", "required string");
  }
  spec.command = j["command"].get<std::string>();
  const bool needs_body = spec.command == "solve" || spec.command == "audit" ||
                          spec.command == "deform";
  const bool needs_grid = needs_body;

  if (spec.command != "solve" && spec.command != "audit" && spec.command != "certify" &&
      spec.command != "deform" && spec.command != "identities") {
    fail_field("command", "unknown command '" + spec.command + "'");
  }

  if (j.contains("body")) spec.body_json = j["body"].dump();
  if (needs_body && spec.body_json.empty()) fail_field("body", "required");

  if (j.contains("h")) spec.h = j["h"].get<double>();
  if (needs_grid && !(spec.h > 0.0)) fail_field("h", "must be a positive number");

  if (j.contains("psi")) spec.psi = j["psi"].get<double>();
  if (needs_grid && !(spec.psi > 0.0)) fail_field("psi", "must be positive");

  if (j.contains("tol")) spec.tol_factor = j["tol"].get<double>();
  if (!(spec.tol_factor > 0.0)) fail_field("tol", "must be positive");

  if (j.contains("max_newton")) spec.max_newton = j["max_newton"].get<int>();
  if (spec.max_newton < 1) fail_field("max_newton", "must be at least 1");

  if (j.contains("mode")) spec.mode = j["mode"].get<std::string>();
  if (spec.mode != "strict" && spec.mode != "heuristic") {
    fail_field("mode", "must be 'strict' or 'heuristic'");
  }

  if (j.contains("t_values")) {
    spec.t_values = j["t_values"].get<std::vector<double>>();
    for (double t : spec.t_values) {
      if (!(t >= 0.0 && t <= 1.0)) fail_field("t_values", "entries must lie in [0,1]");
    }
  }
  if (spec.command == "deform" && spec.t_values.empty()) {
    fail_field("t_values", "required for deform");
  }

  if (j.contains("alpha")) {
    spec.alpha = j["alpha"].get<double>();
    if (!(*spec.alpha > 0.0 && *spec.alpha < 1.0)) {
      fail_field("alpha", "must lie in (0,1)");
    }
  }

  if (j.contains("rank_tol")) spec.rank_tol = j["rank_tol"].get<double>();
  if (!(spec.rank_tol > 0.0)) fail_field("rank_tol", "must be positive");

  if (j.contains("strip_eps")) {
    spec.strip_eps = j["strip_eps"].get<double>();
    if (!(*spec.strip_eps > 0.0)) fail_field("strip_eps", "must be positive");
  }

  if (j.contains("suite")) {
    const json& s = j["suite"];
    if (s.contains("size")) spec.suite_size = s["size"].get<int>();
    if (s.contains("x_per_jet")) spec.x_per_jet = s["x_per_jet"].get<int>();
  }
  if (spec.suite_size < 1) fail_field("suite.size", "must be at least 1");
  if (spec.x_per_jet < 1) fail_field("suite.x_per_jet", "must be at least 1");

  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("comparison")) {
    const json& c = j["comparison"];
    const double a = c.at("a").get<double>();
    if (!(a > 0.0 && a < 1.0)) fail_field("comparison.a", "must lie in (0,1)");
    spec.comparison_a = a;
  }
  if (j.contains("decay_z")) {
    const auto z = j["decay_z"].get<std::vector<double>>();
    if (z.size() != 4) fail_field("decay_z", "must be a 4-vector");
    spec.decay_z = Vec4{z[0], z[1], z[2], z[3]};
  }
  if (j.contains("out_dir")) spec.out_dir = j["out_dir"].get<std::string>();
  return spec;
}

int run(const JobSpec& spec) {
  try {
    const fs::path out(spec.out_dir);
    fs::create_directories(out);
    if (spec.command == "solve") return run_solve(spec, out);
    if (spec.command == "audit") return run_audit(spec, out);
    if (spec.command == "certify") return run_certify(spec, out);
    if (spec.command == "deform") return run_deform(spec, out);
    if (spec.command == "identities") return run_identities(spec, out);
    std::cerr << "unknown command: " << spec.command << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

} // namespace cma::cli
