#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "detour/cli/manifest.hpp"
#include "detour/cli/run.hpp"
#include "detour/cli/suites.hpp"

namespace detour::cli {
namespace {

namespace fs = std::filesystem;

std::string manifest_path(const std::string& name) { return std::string(DETOUR_MANIFEST_DIR) + "/" + name; }

std::string error_of(const std::string& text) {
  try {
    parse_manifest(text, "test");
  } catch (const ManifestError& e) {
    return e.what();
  }
  return "";
}

std::string run_json(const std::string& body, const std::vector<std::string>& suites) {
  std::string s = R"({"schema": "detour-manifest/1", )" + body + R"(, "suites": [)";
  for (std::size_t i = 0; i < suites.size(); ++i) s += (i ? ", \"" : "\"") + suites[i] + "\"";
  return s + "]}";
}

TEST(Manifest, SyntaxErrorsCarryLineAndColumn) {
  const std::string text = "{\n  \"schema\": \"detour-manifest/1\",\n  \"suites\": [\"curvature\",,]\n}";
  const std::string err = error_of(text);
  EXPECT_NE(err.find("line 3"), std::string::npos) << err;
  EXPECT_NE(err.find("column"), std::string::npos) << err;
}

TEST(Manifest, DimensionRequirementsAreEnforced) {
  const std::string err = error_of(run_json(R"("geometry": {"fixture": "flat", "params": {"n": 3}})", {"twistor-n4"}));
  EXPECT_NE(err.find("requires n = 4"), std::string::npos) << err;
  EXPECT_NE(err.find("suites[0]"), std::string::npos) << err;
  EXPECT_NE(error_of(run_json(R"("geometry": {"fixture": "flat", "params": {"n": 7}})", {"curvature"})), "");
}

TEST(Manifest, InlineMetricMustBeSymmetric) {
  const std::string err = error_of(run_json(
      R"("geometry": {"metric": [[1, "x0", 0], [0, 1, 0], [0, 0, 1]], "signature": [3, 0]})", {"curvature"}));
  EXPECT_NE(err.find("geometry"), std::string::npos) << err;
  EXPECT_NE(err.find("transpose"), std::string::npos) << err;
}

TEST(Manifest, UnknownNamesAreRejected) {
  EXPECT_NE(error_of(run_json(R"("geometry": {"fixture": "klein-bottle"})", {"curvature"})).find("geometry.fixture"),
            std::string::npos);
  EXPECT_NE(error_of(run_json(R"("geometry": {"fixture": "flat"})", {"no-such-suite"})).find("unknown suite"),
            std::string::npos);
  EXPECT_NE(error_of(run_json(R"("geometry": {"fixture": "flat"}, "colour": 1)", {"curvature"})).find("unknown field"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema": "detour-manifest/9", "profile": "paper-core"})").find("schema"), std::string::npos);
  EXPECT_NE(error_of(R"({"schema": "detour-manifest/1", "profile": "nope"})").find("unknown profile"), std::string::npos);
}

TEST(Manifest, ConnectionSuitesNeedAConnection) {
  EXPECT_NE(error_of(run_json(R"("geometry": {"fixture": "flat"})", {"algact"})), "");
  EXPECT_EQ(error_of(run_json(R"("geometry": {"fixture": "flat"}, "connection": {"fixture": "bpst"})", {"algact"})), "");
}

TEST(Manifest, ExpectedFailuresMustBeRequested) {
  const std::string err = error_of(run_json(
      R"("geometry": {"fixture": "flat"}, "expect_fail": ["MP"])", {"curvature"}));
  EXPECT_NE(err.find("expect_fail"), std::string::npos) << err;
}

TEST(Manifest, EveryExampleManifestParses) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(DETOUR_MANIFEST_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_manifest(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 4);
}

TEST(Suites, RegistryIsSortedAndDescribed) {
  const auto& all = suites();
  ASSERT_FALSE(all.empty());
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LT(all[i - 1].name, all[i].name);
  for (const Suite& s : all) {
    EXPECT_FALSE(s.description.empty()) << s.name;
    EXPECT_EQ(find_suite(s.name), &s);
  }
  EXPECT_EQ(find_suite("nope"), nullptr);
}

nlohmann::ordered_json without_timing(nlohmann::ordered_json j) {
  j.erase("timing");
  return j;
}

TEST(Run, ReportsAreIndependentOfTheJobCount) {
  const Manifest m = load_manifest(manifest_path("yang-mills.json"));
  RunOptions one, many;
  many.jobs = 4;
  EXPECT_EQ(without_timing(to_json(run_manifest(m, one))), without_timing(to_json(run_manifest(m, many))));
}

TEST(Run, SeedOverrideChangesSamplesReproducibly) {
  const Manifest m = load_manifest(manifest_path("minimal.json"));
  RunOptions a, b, c;
  a.seed = 99;
  b.seed = 99;
  c.seed = 100;
  const auto ja = without_timing(to_json(run_manifest(m, a)));
  EXPECT_EQ(ja, without_timing(to_json(run_manifest(m, b))));
  EXPECT_NE(ja, without_timing(to_json(run_manifest(m, c))));
  EXPECT_EQ(ja["seed_override"], 99);
}

TEST(Run, ExpectedFailureSemantics) {
  const Manifest xfail = load_manifest(manifest_path("xfail.json"));
  const RunReport r = run_manifest(xfail, {});
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.exit_code(), 0);
  bool saw = false;
  for (const SuiteSummary& s : r.summaries)
    if (s.suite == "detour-complex") {
      EXPECT_EQ(s.status, SuiteStatus::ExpectedFail);
      saw = true;
    }
  EXPECT_TRUE(saw);

  const RunReport plain = run_manifest(load_manifest(manifest_path("failing.json")), {});
  EXPECT_FALSE(plain.ok());
  EXPECT_EQ(plain.exit_code(), 1);

  // Marking a passing suite as expected to fail is itself a failure.
  Manifest xpass = xfail;
  xpass.runs[0].expect_fail = {"algact"};
  const RunReport rx = run_manifest(xpass, {});
  EXPECT_FALSE(rx.ok());
  EXPECT_EQ(rx.exit_code(), 1);
}

TEST(Run, ToleranceScaleAndOverrides) {
  Manifest m = load_manifest(manifest_path("failing.json"));
  RunOptions loose;
  loose.tolerance_scale = 1e12;
  EXPECT_TRUE(run_manifest(m, loose).ok());
  m.tolerances.overrides["detour-complex"] = 1e5;
  EXPECT_TRUE(run_manifest(m, {}).ok());
}

TEST(Run, JsonReportShape) {
  const auto j = to_json(run_manifest(load_manifest(manifest_path("minimal.json")), {}));
  EXPECT_EQ(j["schema"], kReportSchema);
  EXPECT_EQ(j["summary"]["status"], "pass");
  EXPECT_GT(j["summary"]["checks"].get<int>(), 0);
  EXPECT_TRUE(j["checks"].is_array());
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("suite") && c.contains("residual") && c.contains("tolerance") && c.contains("pass"));
  }
  EXPECT_TRUE(j["timing"]["wall_seconds"].is_number());
}

int tool(const std::string& args, const std::string& out = "/dev/null") {
  const std::string cmd = std::string("\"") + DETOUR_TOOL + "\" " + args + " >" + out + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(tool("check --quiet " + manifest_path("minimal.json")), 0);
  EXPECT_EQ(tool("check --quiet " + manifest_path("xfail.json")), 0);
  EXPECT_EQ(tool("check --quiet " + manifest_path("failing.json")), 1);
  EXPECT_EQ(tool("check --quiet /nonexistent/manifest.json"), 2);
  EXPECT_EQ(tool("check --quiet --jobs 0 " + manifest_path("minimal.json")), 2);
  EXPECT_EQ(tool("frobnicate"), 2);
  EXPECT_EQ(tool("list-suites"), 0);
  EXPECT_EQ(tool("list-fixtures"), 0);
}

TEST(Binary, WritesTheReportAndDumpsCurvature) {
  const fs::path dir = fs::temp_directory_path() / "detour-cli-test";
  fs::remove_all(dir);
  const fs::path report = dir / "minimal.report.json";
  ASSERT_EQ(tool("check --quiet --report " + report.string() + " " + manifest_path("minimal.json")), 0);
  std::ifstream in(report);
  ASSERT_TRUE(in.good());
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["summary"]["status"], "pass");
  const fs::path dump = dir / "curvature.json";
  ASSERT_EQ(tool("curvature --point 0 " + manifest_path("minimal.json"), dump.string()), 0);
  std::ifstream din(dump);
  const auto c = nlohmann::json::parse(din);
  EXPECT_EQ(c["riemann"]["shape"].size(), 4u);
  EXPECT_EQ(c["signature"][0], 4);
  EXPECT_EQ(tool("curvature --point 50 " + manifest_path("minimal.json")), 2);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace detour::cli
