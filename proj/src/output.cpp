#include "cma/output.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace cma::output {

using nlohmann::json;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
}

std::string field_header_json(const solver::Grid4& grid) {
  json j;
  j["schema_version"] = kCsvSchemaVersion;
  j["dims"] = grid.dims;
  j["origin"] = grid.origin;
  j["spacing"] = grid.h;
  j["value_order"] = "axis0_fastest";
  j["unknown_count"] = grid.unknown_count();

  // run-length encoding of the classification, [class, count] pairs
  json rle = json::array();
  const std::int64_t nn = grid.node_count();
  std::int64_t i = 0;
  while (i < nn) {
    const std::uint8_t c = grid.cls[static_cast<std::size_t>(i)];
    std::int64_t run = 1;
    while (i + run < nn && grid.cls[static_cast<std::size_t>(i + run)] == c) ++run;
    rle.push_back({static_cast<int>(c), run});
    i += run;
  }
  j["classification_rle"] = std::move(rle);
  j["class_codes"] = {{"exterior", 0}, {"interior", 1}, {"cut", 2}, {"snapped", 3}};
  return j.dump(2) + "\n";
}

void write_field(const std::filesystem::path& dir, const std::string& stem,
                 const solver::GridField& u) {
  const solver::Grid4& g = *u.grid;
  std::vector<double> full(static_cast<std::size_t>(g.node_count()), 0.0);
  for (int k = 0; k < g.unknown_count(); ++k) {
    full[static_cast<std::size_t>(g.node_of_unknown[k])] = u.u[static_cast<std::size_t>(k)];
  }
  std::ofstream bin(dir / (stem + ".bin"), std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open field file for writing");
  bin.write(reinterpret_cast<const char*>(full.data()),
            static_cast<std::streamsize>(full.size() * sizeof(double)));
  write_text(dir / (stem + "_header.json"), field_header_json(g));
}

std::string solve_report_json(const solver::SolveReport& rep) {
  json j;
  j["schema_version"] = kCsvSchemaVersion;
  j["status"] = rep.status;
  j["iterations"] = rep.iterations;
  j["damping_steps"] = rep.damping_steps;
  j["psh_violations"] = rep.psh_violations;
  j["linear_iterations"] = rep.linear_iterations;
  j["heuristic"] = rep.heuristic;
  j["final_residual"] = rep.final_residual;
  j["residual_history"] = rep.residual_history;
  return j.dump(2) + "\n";
}

std::string rank_map_csv(const audit::RankMap& map) {
  std::string out = "node,x1,x2,x3,x4,eig1,eig2,eig3,eig4,rank,strip\n";
  for (const auto& e : map.entries) {
    out += std::to_string(e.node);
    for (double c : e.coords) out += "," + fmt_g17(c);
    for (double lam : e.eigenvalues) out += "," + fmt_g17(lam);
    out += "," + std::to_string(e.rank) + "," + (e.strip ? "1" : "0") + "\n";
  }
  return out;
}

std::string rank_map_summary_json(const audit::RankMap& map) {
  json j;
  j["schema_version"] = kCsvSchemaVersion;
  j["audited_count"] = map.audited_count;
  j["strip_count"] = map.strip_count;
  j["min_rank"] = map.min_rank;
  j["max_rank"] = map.max_rank;
  j["constant_rank"] = map.constant_rank;
  j["interior_min_eig"] = map.interior_min_eig;
  j["strip_min_eig"] = map.strip_min_eig;
  j["rank_tol"] = map.rank_tol;
  j["strip_eps"] = map.strip_eps;
  return j.dump(2) + "\n";
}

std::string rank2_suite_csv(const cert::Rank2Suite& suite) {
  std::string out =
      "v,g1,g2,g3,g4,v11,v22,p3_zero,p2_formula,col_prop,equiv_max,verdict,pass\n";
  for (const auto& r : suite.rows) {
    out += fmt_g17(r.v) + "," + fmt_g17(r.g1) + "," + fmt_g17(r.g2) + "," +
           fmt_g17(r.g3) + "," + fmt_g17(r.g4) + "," + fmt_g17(r.v11) + "," +
           fmt_g17(r.v22) + "," + fmt_g17(r.p3_zero) + "," + fmt_g17(r.p2_formula) +
           "," + fmt_g17(r.col_prop) + "," + fmt_g17(r.equiv_max) + "," + r.verdict +
           "," + (r.pass ? "1" : "0") + "\n";
  }
  return out;
}

std::string rank3_suite_csv(const cert::Rank3Suite& suite) {
  std::string out =
      "v,g1,g2,g3,g4,v11,v22,v33,id340,offblock,block_match,reconstruction,"
      "a1_p2_formula,a1_p3_zero,a2_p1_formula,a2_p2_formula,a2_p3_formula,"
      "equiv_max,verdict_a1,verdict_a2,pass\n";
  for (const auto& r : suite.rows) {
    out += fmt_g17(r.v) + "," + fmt_g17(r.g1) + "," + fmt_g17(r.g2) + "," +
           fmt_g17(r.g3) + "," + fmt_g17(r.g4) + "," + fmt_g17(r.v11) + "," +
           fmt_g17(r.v22) + "," + fmt_g17(r.v33) + "," + fmt_g17(r.id340) + "," +
           fmt_g17(r.offblock) + "," + fmt_g17(r.block_match) + "," +
           fmt_g17(r.reconstruction) + "," + fmt_g17(r.a1_p2_formula) + "," +
           fmt_g17(r.a1_p3_zero) + "," + fmt_g17(r.a2_p1_formula) + "," +
           fmt_g17(r.a2_p2_formula) + "," + fmt_g17(r.a2_p3_formula) + "," +
           fmt_g17(r.equiv_max) + "," + r.verdict_a1 + "," + r.verdict_a2 + "," +
           (r.pass ? "1" : "0") + "\n";
  }
  return out;
}

std::string suite_summary_json(const cert::SuiteSummary& summary) {
  json j;
  j["schema_version"] = kCsvSchemaVersion;
  j["name"] = summary.name;
  j["size"] = summary.size;
  j["seed"] = summary.seed;
  j["failures"] = summary.failures;
  json m;
  for (const auto& [name, value] : summary.max_residuals) m[name] = value;
  j["max_residuals"] = std::move(m);
  return j.dump(2) + "\n";
}

std::string certificate_report_json(const CertificateReport& rep) {
  json j;
  j["schema_version"] = kCsvSchemaVersion;
  j["subject"] = rep.subject;
  j["passed"] = rep.passed;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json e;
    e["name"] = c.name;
    if (c.verdict.empty()) {
      e["residual"] = c.residual;
      e["tol"] = c.tol;
    } else {
      e["verdict"] = c.verdict;
      if (!c.expected.empty()) e["expected"] = c.expected;
    }
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

std::string tagged_stem(const std::string& prefix, const bodies::ConvexBody& body,
                        double h, double psi, double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(body.content_hash()));
  std::string stem = prefix + "_" + buf + "_h" + fmt_g17(h) + "_psi" + fmt_g17(psi);
  if (t >= 0.0) stem += "_t" + fmt_g17(t);
  return stem;
}

std::string run_meta_json(double wall_ms_total) {
  json j;
  const auto now = std::chrono::system_clock::now();
  j["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  j["wall_ms_total"] = wall_ms_total;
  return j.dump(2) + "\n";
}

} // namespace cma::output
