#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <cmath>
#include <fstream>
#include <numbers>

#include "jfs/scenario.hpp"

namespace jfs {
namespace {

using nlohmann::json;

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

TEST(Registry, Contents) {
  const auto names = list_scenarios();
  for (const char* n : {"sphere-zero", "example-nonselfadjoint", "example-shifted-sine",
                        "hopf-holonomy", "cp2-zero", "product-s2xr2", "flat-parallel"}) {
    EXPECT_TRUE(contains(names, n)) << n;
  }
  EXPECT_THROW(builtin_scenario("nope"), Error);
}

TEST(Registry, EveryExpectationMatches) {
  for (const auto& name : list_scenarios()) {
    const auto report = run_scenario(builtin_scenario(name));
    EXPECT_TRUE(report.ok()) << name;
    for (const auto& c : report.checks) {
      EXPECT_NE(c.verdict, Verdict::Falsified) << name << " " << to_string(c.kind);
    }
  }
}

TEST(Registry, SphereZero) {
  const auto r = run_scenario(builtin_scenario("sphere-zero"));
  ASSERT_GE(r.checks.size(), 2u);
  EXPECT_EQ(r.checks[0].kind, CheckKind::Rigidity);
  EXPECT_EQ(r.checks[0].verdict, Verdict::Verified);
  EXPECT_LE(r.checks[0].details["max_s_deviation"].get<double>(), 1e-5);
  EXPECT_EQ(r.checks[1].kind, CheckKind::Splitting);
  EXPECT_EQ(r.checks[1].verdict, Verdict::Verified);
  EXPECT_EQ(r.checks[1].details["dim_P"], 2);
}

TEST(Registry, Cp2AndCounterexamples) {
  const auto cp2 = run_scenario(builtin_scenario("cp2-zero"));
  EXPECT_EQ(cp2.checks[0].details["dim_Z"], 1);
  EXPECT_EQ(cp2.checks[0].details["dim_P"], 2);
  EXPECT_EQ(cp2.checks[2].details["reason"], "regularity");

  const auto nsa = run_scenario(builtin_scenario("example-nonselfadjoint"));
  EXPECT_EQ(nsa.checks[0].verdict, Verdict::HypothesisViolated);
  EXPECT_FALSE(nsa.checks[0].details["gates"]["self_adjoint"]["pass"].get<bool>());

  const auto shifted = run_scenario(builtin_scenario("example-shifted-sine"));
  EXPECT_EQ(shifted.checks[0].verdict, Verdict::HypothesisViolated);
  EXPECT_FALSE(shifted.checks[0].details["gates"]["boundary"]["pass"].get<bool>());
}

TEST(Registry, MismatchIsReported) {
  auto s = builtin_scenario("example-nonselfadjoint");
  s.checks[0].expect = Verdict::Verified;
  const auto r = run_scenario(s);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.checks[0].match);

  auto dims = builtin_scenario("cp2-zero");
  dims.checks[0].dims = std::pair<Index, Index>{2, 1};
  EXPECT_FALSE(run_scenario(dims).ok());
}

TEST(Config, RoundTrip) {
  for (const auto& name : list_scenarios()) {
    const auto s = builtin_scenario(name);
    const json j = scenario_to_json(s);
    const auto back = scenario_from_json(json::parse(j.dump()));
    EXPECT_EQ(scenario_to_json(back), j) << name;
    EXPECT_EQ(back.family.Y0, s.family.Y0);
    EXPECT_EQ(back.family.alpha, s.family.alpha);
  }
}

TEST(Config, AnnotatedExampleLoads) {
  const auto s = load_scenario(std::filesystem::path(JFS_SOURCE_DIR) / "scenarios" / "hopf-holonomy.json");
  EXPECT_EQ(s.name, "hopf-holonomy-config");
  EXPECT_EQ(s.checks.size(), 5u);
  EXPECT_FALSE(s.checks.back().expect.has_value());
  EXPECT_TRUE(run_scenario(s).ok());
}

json minimal() {
  return json::parse(R"({
    "name": "mini",
    "field": {"kind": "fubini_study", "n": 4},
    "family": {"end": 1.0, "Y0": [[0,0,0],[0,0,0],[0,0,0]], "Yd0": [[1,0,0],[0,1,0],[0,0,1]]},
    "checks": [{"kind": "rigidity"}]
  })");
}

TEST(Config, Defaults) {
  const auto s = scenario_from_json(minimal());
  EXPECT_EQ(s.step, kDefaultStep);
  EXPECT_EQ(s.family.alpha, 0.0);
  EXPECT_EQ(s.family.label, "mini");
  EXPECT_FALSE(s.checks[0].expect.has_value() && *s.checks[0].expect != Verdict::Verified);
  EXPECT_EQ(s.family.field.eigenvalues(), (Vectord{{4.0, 1.0, 1.0}}));
}

TEST(Config, Rejections) {
  auto expect_error = [](json j) { EXPECT_THROW(scenario_from_json(j), Error) << j.dump(); };
  auto j = minimal();
  j["colour"] = 1;
  expect_error(j);
  j = minimal();
  j["checks"][0]["expect"] = "falsified";
  expect_error(j);
  j = minimal();
  j["checks"][0] = {{"kind", "splitting"}};
  expect_error(j);
  j = minimal();
  j["checks"][0] = {{"kind", "hce"}, {"psi", {{1.0, 0.0}}}};
  expect_error(j);
  j = minimal();
  j["schema"] = "jfs-scenario/99";
  expect_error(j);
  j = minimal();
  j.erase("family");
  expect_error(j);
  j = minimal();
  j["family"]["Y0"] = {{1, 0}, {0, 1}};
  expect_error(j);
  j = minimal();
  j["name"] = "../x";
  expect_error(j);
  j = minimal();
  j["tolerances"] = {{"zero", -1.0}};
  expect_error(j);
  j = minimal();
  j["field"] = {{"kind", "hyperbolic"}};
  expect_error(j);
  j = minimal();
  j["_comment"] = "ignored";
  EXPECT_NO_THROW(scenario_from_json(j));
}

TEST(Config, SampledField) {
  auto j = minimal();
  j["field"] = json::parse(R"({"kind": "sampled", "n": 4, "grid": [0, 2],
      "ops": [[1,0,0,0,1,0,0,0,1], [1,0,0,0,1,0,0,0,1]]})");
  const auto s = scenario_from_json(j);
  EXPECT_EQ(s.family.field.kind(), CurvatureField::Kind::Sampled);
  EXPECT_EQ(scenario_to_json(scenario_from_json(scenario_to_json(s))), scenario_to_json(s));
}

TEST(Report, RoundTripAndNonFinite) {
  for (const auto& name : list_scenarios()) {
    const json j = report_to_json(run_scenario(builtin_scenario(name)));
    const json back = report_to_json(report_from_json(json::parse(j.dump())));
    EXPECT_EQ(back.dump(), j.dump()) << name;
    EXPECT_EQ(j["schema"], kReportSchema);
    EXPECT_EQ(j["tool_version"], kToolVersion);
  }
  // boundary gate at alpha = 0 has value +inf
  const json sphere = report_to_json(run_scenario(builtin_scenario("sphere-zero")));
  EXPECT_EQ(sphere["checks"][1]["details"]["gates"]["boundary"]["value"], "inf");
}

TEST(Report, ByteStableAndTiming) {
  const auto s = builtin_scenario("hopf-holonomy");
  RunOptions opt;
  opt.seed = 7;
  const auto a = report_to_json(run_scenario(s, opt)).dump();
  const auto b = report_to_json(run_scenario(s, opt)).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("wall_time"), std::string::npos);
  opt.timing = true;
  const auto timed = run_scenario(s, opt);
  ASSERT_TRUE(timed.wall_time.has_value());
  EXPECT_GT(*timed.wall_time, 0.0);
  EXPECT_TRUE(report_to_json(timed).contains("wall_time_s"));
}

TEST(Report, OptionsOverride) {
  RunOptions opt;
  opt.step = 0.01;
  opt.tol_eig = 1e-3;
  const auto r = run_scenario(builtin_scenario("example-shifted-sine"), opt);
  EXPECT_LE(r.step, 0.01);
  EXPECT_GT(r.step, 0.0099);
  // margin 1e-3 - tan(pi/12) is still negative
  EXPECT_NEAR(r.checks[0].details["gates"]["boundary"]["value"].get<double>(),
              1e-3 - std::tan(std::numbers::pi / 12), 1e-7);
}

TEST(Report, TracesAndCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "jfs_test_traces";
  std::filesystem::remove_all(dir);
  RunOptions opt;
  opt.trace_dir = dir;
  const auto r = run_scenario(builtin_scenario("sphere-zero"), opt);
  for (const char* f : {"sphere-zero_trajectory.csv", "sphere-zero_scalar.csv",
                        "sphere-zero_reduced_4.csv", "sphere-zero_reduced_5.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "sphere-zero_scalar.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,s,r");
  const auto csv = report_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scenario,check,kind,expect,verdict,match");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(r.checks.size() + 1));
  std::filesystem::remove_all(dir);
}

TEST(Property, RandomSelfAdjointNeverFalsified) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto s = random_scenario(seed);
    const Matrixd& y = s.family.Y0;
    const Matrixd& yd = s.family.Yd0;
    EXPECT_LE((y.transpose() * yd - yd.transpose() * y).cwiseAbs().maxCoeff(), 1e-12);
    const auto r = run_scenario(s);
    EXPECT_TRUE(r.ok()) << s.name;
    for (const auto& c : r.checks) EXPECT_NE(c.verdict, Verdict::Falsified) << s.name;
  }
}

}  // namespace
}  // namespace jfs
