#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gcl/config.hpp"
#include "gcl/report.hpp"

using namespace gcl;
using nlohmann::json;

namespace {

json minimal_pair() {
  return json::parse(R"({
    "chart": {"builtin": "pair", "n": 1},
    "grid": {"base": {"radius": 6, "intervals": 32}, "fiber": {"radius": 6, "intervals": 32}},
    "symbols": {"f": {"terms": [{"coef": 1}]},
                "g": {"terms": [{"coef": 1, "x_pow": [1], "xi_pow": [1]}]}},
    "t": [0.2, 0.1, 0.05]
  })");
}

std::vector<std::string> violations_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config(minimal_pair());
  CHECK(c.fd_step == 1e-3);
  CHECK(c.quadrature == "trapezoidal");
  CHECK(c.chart.kind == ChartKind::Pair);
  CHECK(c.grid.base_size() == 33);
  CHECK(c.f.has_value());
  CHECK(c.g.has_value());
  CHECK(!c.h.has_value());
  CHECK(c.ts.size() == 3);
  CHECK(c.workers == 1);
  CHECK(c.tol.leibniz == 5e-3);
  CHECK(c.warnings.empty());
  CHECK((*c.g)(Vec{0.5}, Vec{2.0}) == cplx(std::exp(-4.25), 0.0));
}

TEST_CASE("zero t is rejected") {
  json d = minimal_pair();
  d["t"] = {0.2, 0.0, 0.05};
  const auto v = violations_of(d);
  CHECK(any_contains(v, "t must be nonzero in sweep"));
}

TEST_CASE("every violation is reported") {
  json d = minimal_pair();
  d["t"] = {0.1, 0.2};
  d["fd_step"] = -1.0;
  d["bogus"] = 3;
  d["grid"]["fiber"]["intervals"] = 4;
  const auto v = violations_of(d);
  CHECK(v.size() >= 4);
  CHECK(any_contains(v, "t values must strictly decrease toward 0"));
  CHECK(any_contains(v, "fd_step must be positive"));
  CHECK(any_contains(v, "unknown key 'bogus'"));
  CHECK(any_contains(v, "grid:"));
}

TEST_CASE("decay check warns or fails under strict") {
  json d = minimal_pair();
  d["grid"]["fiber"]["radius"] = 2.0;
  const RunConfig lax = parse_config(d);
  REQUIRE(lax.warnings.size() >= 1);
  CHECK(lax.warnings[0].find("symbol f does not decay on the grid: boundary magnitude") == 0);
  d["strict"] = true;
  const auto v = violations_of(d);
  CHECK(any_contains(v, "symbol f does not decay on the grid: boundary magnitude"));
}

TEST_CASE("domain violations") {
  json d = minimal_pair();
  d["chart"]["radius"] = 5.0;  // base axis to +-6 leaves U_box
  CHECK(any_contains(violations_of(d), "leaves the chart's U_box"));
  d = minimal_pair();
  d["t"] = {3.0, 0.1};
  d["chart"]["radius"] = 10.0;
  CHECK(any_contains(violations_of(d), "outside V_box"));
  d = minimal_pair();
  d["chart"] = {{"builtin", "torus"}};
  CHECK(any_contains(violations_of(d), "unknown chart 'torus'"));
}

TEST_CASE("json syntax errors carry line and column") {
  try {
    parse_json_text("{\n  \"chart\": {\n    \"builtin\" \"pair\"\n  }\n}", "cfg.json");
    FAIL("no exception");
  } catch (const ConfigError& e) {
    REQUIRE(e.violations().size() == 1);
    CHECK(e.violations()[0].rfind("cfg.json:3:", 0) == 0);
    CHECK(e.violations()[0].find("JSON parse error") != std::string::npos);
  }
}

TEST_CASE("load_config with overrides") {
  const auto dir = std::filesystem::temp_directory_path() / "gcl_test_config";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "c.json").string();
  std::ofstream(path) << minimal_pair().dump(2);
  const RunConfig c = load_config(path, json{{"workers", 4}, {"strict", true}});
  CHECK(c.workers == 4);
  CHECK(c.strict);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("hash ignores workers, output and plot") {
  json a = minimal_pair(), b = minimal_pair();
  b["workers"] = 4;
  b["output"] = "elsewhere";
  b["plot"] = true;
  CHECK(parse_config(a).hash() == parse_config(b).hash());
  b["seed"] = 7;
  CHECK(parse_config(a).hash() != parse_config(b).hash());
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("user expression chart") {
  json d = minimal_pair();
  d["chart"] = json::parse(R"({"expr": {"name": "affine", "n": 1, "m": 1,
      "sigma": [["+", "u1", "v1"]], "product": [["+", "v1", "w1"]], "inverse": [["-", "v1"]],
      "U_box": {"radius": 10}, "V_box": {"radius": 10}}})");
  const RunConfig c = parse_config(d);
  CHECK(c.chart.name == "affine");
  CHECK(compose(c.chart, Vec{0.0}, Vec{0.5}, Vec{0.25})[0] == doctest::Approx(0.75));
  d["chart"]["expr"]["product"] = json::parse(R"([["^", "v1", "w1"]])");
  CHECK(!violations_of(d).empty());
}

TEST_CASE("tolerances and csv formatting") {
  json d = minimal_pair();
  d["tolerances"] = {{"leibniz", 1e-2}, {"ratio_lo", 0.9}, {"ratio_hi", 0.1}};
  CHECK(any_contains(violations_of(d), "ratio_lo exceeds ratio_hi"));
  d["tolerances"] = {{"leibniz", 1e-2}};
  CHECK(parse_config(d).tol.leibniz == 1e-2);
  CHECK(format17(0.1) == "0.10000000000000001");
  CHECK(std::stod(format17(1.0 / 3.0)) == 1.0 / 3.0);
  CsvTable t{{"a", "b"}, {{"1", "2"}}};
  CHECK(t.render() == "a,b\n1,2\n");
}

TEST_CASE("run_command on validate and deform") {
  json d = minimal_pair();
  d["chart"] = {{"builtin", "corrupted_pair"}};
  d["grid"]["base"]["radius"] = 3.0;
  ReportBundle b = run_command("validate", parse_config(d));
  CHECK(b.exit_code() != 0);
  const auto failed = b.summary["results"]["failed_axioms"];
  REQUIRE(failed.is_array());
  CHECK(failed[0] == "associativity");

  json a = minimal_pair();
  a["chart"] = {{"builtin", "abelian_bundle"}, {"n", 1}, {"m", 1}};
  b = run_command("deform", parse_config(a));
  CHECK(b.exit_code() == 0);
  CHECK_THROWS_AS(run_command("nope", parse_config(a)), Error);
}
