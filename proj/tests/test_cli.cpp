#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "degenlab/cli.hpp"
#include "degenlab/error.hpp"

using namespace degenlab;
using nlohmann::json;

namespace {

json small_scenario() {
  return json::parse(R"({
    "name": "unit-small",
    "profile": {"dimension": 1, "family": {"kind": "power", "delta": 0.5, "centers": [0.0]},
                "domain": [-4.0, 4.0]},
    "mesh": {"n": 256},
    "t_small": [0.01, 0.1],
    "t_large": [1.0],
    "checks": ["markov", "conservation", {"name": "semigroup", "samples": 2}]
  })");
}

std::string schema_field(const json& doc) {
  try {
    scenario_from_json(doc);
  } catch (const SchemaError& e) {
    return e.field();
  }
  return "<no error>";
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(Scenario, ParsesAndRoundTrips) {
  const auto s = scenario_from_json(small_scenario());
  EXPECT_EQ(s.name, "unit-small");
  EXPECT_EQ(s.mesh.n, 256u);
  ASSERT_EQ(s.checks.size(), 3u);
  EXPECT_EQ(s.checks[2].params.at("samples"), 2);
  const auto again = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(again), scenario_to_json(s));
}

TEST(Scenario, SchemaErrorsNameTheField) {
  auto doc = small_scenario();
  doc["checks"].push_back("telepathy");
  EXPECT_EQ(schema_field(doc), "checks[3].name");

  doc = small_scenario();
  doc["checks"].push_back({{"name", "offdiagonal"}, {"radii", {0.2}}});
  EXPECT_EQ(schema_field(doc), "checks[3].centers");

  doc = small_scenario();
  doc["checks"][2]["colour"] = "blue";
  EXPECT_EQ(schema_field(doc), "checks[2].colour");

  doc = small_scenario();
  doc.erase("mesh");
  EXPECT_EQ(schema_field(doc), "mesh");

  doc = small_scenario();
  doc["t_small"] = {0.1, -1.0};
  EXPECT_EQ(schema_field(doc).rfind("t_small", 0), 0u);

  doc = small_scenario();
  doc["profile"]["family"]["delta"] = "half";
  EXPECT_NE(schema_field(doc).find("delta"), std::string::npos);

  doc = small_scenario();
  doc["checks"].push_back({{"name", "invariance"}, {"omega", {{"blob", 1}}}});
  EXPECT_EQ(schema_field(doc), "checks[3].omega");
}

TEST(Scenario, KnownChecksCoverTheRunner) {
  const auto& names = known_checks();
  for (const char* n : {"markov", "conservation", "semigroup", "offdiagonal", "wave_speed", "separation",
                        "smalltime_decay", "largetime_floor", "resolvent_volume", "holder_fit"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
}

TEST(Scenario, JsonSyntaxErrorReportsLineAndColumn) {
  const auto dir = temp_dir("degenlab_cli_syntax");
  {
    std::ofstream out(dir / "bad.json");
    out << "{\n  \"name\": \"x\",\n  \"mesh\": {\"n\": 12,}\n}\n";
  }
  try {
    load_scenario(dir / "bad.json");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(e.field().find("bad.json:3:"), std::string::npos) << e.field();
  }
  EXPECT_THROW(load_scenario(dir / "missing.json"), Error);
}

TEST(Override, DottedPathsAndValueTypes) {
  auto doc = small_scenario();
  apply_override(doc, "mesh.n=512");
  EXPECT_EQ(doc["mesh"]["n"], 512);
  apply_override(doc, "checks.2.samples=3");
  EXPECT_EQ(doc["checks"][2]["samples"], 3);
  apply_override(doc, "t_small=[0.02,0.2]");
  EXPECT_EQ(doc["t_small"][1], 0.2);
  apply_override(doc, "output=some/dir");
  EXPECT_EQ(doc["output"], "some/dir");
  apply_override(doc, "profile.family.delta=0.25");
  EXPECT_EQ(scenario_from_json(doc).profile["family"]["delta"], 0.25);
  EXPECT_THROW(apply_override(doc, "no-equals-sign"), ArgumentError);
  EXPECT_THROW(apply_override(doc, "checks.9.samples=1"), ArgumentError);
}

TEST(Builtins, AllParseAndValidate) {
  const auto& b = builtin_scenarios();
  EXPECT_GE(b.size(), 9u);
  for (const auto& s : b) {
    EXPECT_FALSE(s.name.empty());
    EXPECT_FALSE(s.anchor.empty());
    EXPECT_NO_THROW(scenario_from_json(scenario_to_json(s))) << s.name;
  }
  EXPECT_TRUE(find_builtin("laplacian1d").has_value());
  EXPECT_TRUE(find_builtin("degenerate1d-δ0.5").has_value());
  EXPECT_FALSE(find_builtin("nope").has_value());
}

TEST(Runner, WritesOutputsAndIsDeterministic) {
  const auto s = scenario_from_json(small_scenario());
  const auto dir = temp_dir("degenlab_cli_run");
  RunOptions o;
  o.out_dir = dir / "a";
  const auto a = run_scenario(s, o);
  o.out_dir = dir / "b";
  o.threads = 1;
  const auto b = run_scenario(s, o);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.report.records.size(), 3u);
  for (const char* f : {"report.md", "report.json", "checks.csv", "environment.csv", "metadata.json", "conservation.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "a" / f)) << f;
  }
  for (const auto& e : std::filesystem::directory_iterator(dir / "a")) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream fa(e.path()), fb(dir / "b" / e.path().filename());
    std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_EQ(sa, sb) << e.path().filename();
  }
}

TEST(Runner, SabotageExitsWithTwo) {
  for (const char* name : {"sabotage-rowsum", "sabotage-offdiag"}) {
    auto s = *find_builtin(name);
    RunOptions o;
    o.write = false;
    o.plots = false;
    EXPECT_EQ(run_scenario(s, o).exit_code, 2) << name;
  }
}

TEST(Runner, EpsilonSweepSuffixesRecordNames) {
  auto doc = small_scenario();
  doc["epsilon"] = {0.0, 0.01};
  RunOptions o;
  o.write = false;
  const auto out = run_scenario(scenario_from_json(doc), o);
  ASSERT_EQ(out.report.records.size(), 6u);
  EXPECT_EQ(out.report.records[0].name, "markov_structure[eps0]");
  EXPECT_EQ(out.report.records[3].name, "markov_structure[eps1]");
}

TEST(Svg, WritesPolylines) {
  const auto dir = temp_dir("degenlab_cli_svg");
  write_svg_plot(dir / "p.svg", "t", "x", "y", {{"a", {1.0, 10.0, 100.0}, {1.0, 0.1, 0.0}}}, true, true);
  std::ifstream in(dir / "p.svg");
  std::string s((std::istreambuf_iterator<char>(in)), {});
  EXPECT_NE(s.find("<polyline"), std::string::npos);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}
