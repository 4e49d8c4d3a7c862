#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pspec/error.hpp"
#include "pspec/runner.hpp"
#include "pspec/serialize.hpp"

using namespace pspec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigParse);
    return e.what();
  }
  FAIL("expected ConfigParse");
  return {};
}

fs::path temp_dir(const char* name) {
  const fs::path p = fs::temp_directory_path() / ("pspec_test_" + std::string(name));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config defaults") {
  const RunConfig c = parse_config("{}");
  CHECK(c.catalog.size() == 8);
  CHECK(c.ps == std::vector<double>{1.5, 2.0, 3.0});
  CHECK(c.bounds.empty());
  CHECK(c.write_json);
  CHECK(c.write_csv);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"({"catalog": ["disk", {"variant": "annulus", "r_in": 0.4, "label": "thick"}],
    "ps": [2.5], "h": 0.03125, "bounds": ["FABER_KRAHN"], "formats": ["csv"],
    "studies": {"nodal": [{"shape": "square", "p": 3, "scales": [0.5, 1, 2]}]}})");
  REQUIRE(c.catalog.size() == 2);
  CHECK(c.catalog[1].display_label() == "thick");
  CHECK(std::get<shape::Annulus>(c.catalog[1].variant).r_in == 0.4);
  CHECK(c.bounds == std::vector<BoundId>{BoundId::FABER_KRAHN});
  CHECK_FALSE(c.write_json);
  REQUIRE(c.nodal.size() == 1);
  CHECK(c.nodal[0].p == 3.0);
}

TEST_CASE("config errors") {
  CHECK(parse_error(R"({"bounds": ["FABER_KRAHN", "BOGUS_ID"]})").find("BOGUS_ID") != std::string::npos);
  CHECK(parse_error(R"({"ps": []})").find("ps must be nonempty") != std::string::npos);
  parse_error(R"({"gamma": 1.5})");
  parse_error(R"({"h": -1})");
  parse_error(R"({"catalog": ["no_such_shape"]})");
  parse_error(R"({"formats": ["xml"]})");
  parse_error(R"({"unexpected": 1})");
  parse_error("not json");
  try {
    load_config("/nonexistent/cfg.json");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("catalog listing") {
  const std::string a = describe_catalog();
  CHECK(a == describe_catalog());
  std::istringstream in(a);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines >= 8);
  for (const char* s : {"disk:", "square:", "annulus:", "spiky_disk:"}) CHECK(a.find(s) != std::string::npos);
  CHECK(a.find("annulus: connectivity 2") != std::string::npos);
}

TEST_CASE("run writes reports and is reproducible") {
  RunConfig c = parse_config(R"({"catalog": ["square", "annulus"], "ps": [2], "h": 0.03125,
    "bounds": ["FABER_KRAHN", "OSSERMAN_CROKE_SIMPLE", "INFTY_IDENTITY"]})");
  c.output_dir = temp_dir("run_a").string();
  const RunSummary s = run(c);
  CHECK(s.exit_status == 0);
  CHECK_FALSE(s.partial);
  CHECK(s.skipped == 1);
  CHECK(s.violations == 0);
  const fs::path a(c.output_dir);
  CHECK(fs::exists(a / "report.json"));
  CHECK(fs::exists(a / "eigen_square_2.json"));
  CHECK(fs::exists(a / "eigen_annulus_2.json"));
  const std::string csv = slurp(a / "report.csv");
  CHECK(csv.rfind("id,domain,p,lhs,rhs,satisfied,slack,skipped,skip_reason\n", 0) == 0);
  CHECK(csv.find("OSSERMAN_CROKE_SIMPLE,annulus,2,0,0,false,0,true,connectivity = 2") != std::string::npos);
  const Json doc = Json::parse(slurp(a / "report.json"));
  CHECK(doc["partial"] == false);
  CHECK(doc["reports"].size() == 6);

  c.output_dir = temp_dir("run_b").string();
  run(c);
  const fs::path b(c.output_dir);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run reports solver errors through the exit status") {
  // A 3-cell-wide strip at this spacing is rejected when rasterized.
  RunConfig c = parse_config(R"({"catalog": [{"variant": "rectangle", "a": 2, "b": 0.07}], "ps": [2], "h": 0.03125,
    "bounds": ["FABER_KRAHN"], "formats": ["json"]})");
  c.output_dir = temp_dir("run_err").string();
  const RunSummary s = run(c);
  CHECK(s.errors == 1);
  CHECK(s.exit_status == 1);
  const Json doc = Json::parse(slurp(fs::path(c.output_dir) / "report.json"));
  CHECK(doc["reports"][0].contains("error"));
  fs::remove_all(c.output_dir);
}
