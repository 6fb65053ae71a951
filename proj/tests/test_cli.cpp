#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cma/jobspec.hpp"

using namespace cma::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("jobspec validation errors") {
  CHECK_THROWS_AS(parse_jobspec("not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_jobspec("{}"), std::invalid_argument);
  CHECK_THROWS_AS(parse_jobspec(R"({"command":"warp"})"), std::invalid_argument);
  // solve without a body
  CHECK_THROWS_AS(parse_jobspec(R"({"command":"solve","h":0.2})"), std::invalid_argument);
  // t outside [0,1]
  CHECK_THROWS_AS(parse_jobspec(R"({"command":"deform","h":0.2,
    "body":{"kind":"ball","params":{"center":[0,0,0,0],"radius":1.0}},
    "t_values":[0.5,1.5]})"),
                  std::invalid_argument);
  // bad alpha
  CHECK_THROWS_AS(parse_jobspec(R"({"command":"certify","alpha":1.2})"),
                  std::invalid_argument);

  const JobSpec ok = parse_jobspec(R"({"command":"certify","suite":{"size":10},"seed":7})");
  CHECK(ok.suite_size == 10);
  CHECK(ok.seed == 7);
}

TEST_CASE("certify end to end: files, exit code, determinism") {
  const auto dir1 = fresh_dir("cma_certify_1");
  const auto dir2 = fresh_dir("cma_certify_2");

  JobSpec spec = parse_jobspec(
      R"({"command":"certify","suite":{"size":40,"x_per_jet":3},"seed":42})");
  spec.out_dir = dir1.string();
  CHECK(run(spec) == 0);
  CHECK(fs::exists(dir1 / "certify_rank2.csv"));
  CHECK(fs::exists(dir1 / "certify_rank3.csv"));
  CHECK(fs::exists(dir1 / "certify_summary.json"));
  CHECK(fs::exists(dir1 / "run_meta.json"));

  spec.out_dir = dir2.string();
  CHECK(run(spec) == 0);

  // identical spec + seed: byte-identical summaries and CSVs
  CHECK(slurp(dir1 / "certify_summary.json") == slurp(dir2 / "certify_summary.json"));
  CHECK(slurp(dir1 / "certify_rank2.csv") == slurp(dir2 / "certify_rank2.csv"));
  CHECK(slurp(dir1 / "certify_rank3.csv") == slurp(dir2 / "certify_rank3.csv"));
}

TEST_CASE("solve end to end on a small ball") {
  const auto dir = fresh_dir("cma_solve_1");
  JobSpec spec = parse_jobspec(R"({"command":"solve","h":0.2,"psi":1.0,
    "body":{"kind":"ball","params":{"center":[0,0,0,0],"radius":1.0}}})");
  spec.out_dir = dir.string();
  CHECK(run(spec) == 0);
  CHECK(fs::exists(dir / "solve_report.json"));
  bool field_found = false, header_found = false;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.starts_with("field_") && name.ends_with(".bin")) field_found = true;
    if (name.starts_with("field_") && name.ends_with("_header.json")) header_found = true;
  }
  CHECK(field_found);
  CHECK(header_found);
  const std::string rep = slurp(dir / "solve_report.json");
  CHECK(rep.find("\"status\": \"converged\"") != std::string::npos);
}

TEST_CASE("identities end to end") {
  const auto dir = fresh_dir("cma_identities_1");
  JobSpec spec = parse_jobspec(R"({"command":"identities","suite":{"size":64},"seed":3})");
  spec.out_dir = dir.string();
  CHECK(run(spec) == 0);
  CHECK(fs::exists(dir / "identities.csv"));
  CHECK(fs::exists(dir / "identities_summary.json"));
}
