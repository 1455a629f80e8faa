#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "detour/cli/manifest.hpp"
#include "detour/cli/run.hpp"
#include "detour/cli/suites.hpp"

namespace {

using namespace detour;
using namespace detour::cli;
using nlohmann::json;

constexpr int kUsageError = 2;

json values(const Tensor& t) {
  json out = json::array();
  for (std::size_t k = 0; k < t.size(); ++k) out.push_back(t.flat_at(k).value());
  return out;
}

json tensor_entry(const Tensor& t) {
  json shape = json::array();
  for (int i = 0; i < t.rank(); ++i) shape.push_back(t.dim());
  return {{"shape", shape}, {"values", values(t)}};
}

std::filesystem::path default_report_path(const std::string& source) {
  const char* dir = std::getenv("DETOUR_REPORT_DIR");
  if (!dir || !*dir) return {};
  std::string stem = std::filesystem::path(source).stem().string();
  if (stem.empty() || source.rfind("profile:", 0) == 0) stem = source.substr(source.find(':') + 1);
  return std::filesystem::path(dir) / (stem + ".report.json");
}

Manifest manifest_from(const std::string& path, const std::string& profile) {
  if (!profile.empty()) {
    if (!path.empty()) throw ManifestError("", "give either a manifest or --profile");
    return profile_manifest(profile);
  }
  if (path.empty()) throw ManifestError("", "a manifest path or --profile is required");
  return load_manifest(path);
}

int check(const std::string& path, const std::string& profile, const std::string& report, std::optional<std::uint64_t> seed,
          double scale, int jobs, bool quiet) {
  const Manifest m = manifest_from(path, profile);
  RunOptions opt;
  opt.seed = seed;
  opt.tolerance_scale = scale;
  opt.jobs = jobs;
  const RunReport r = run_manifest(m, opt);
  if (!quiet) std::cout << to_table(r);
  std::filesystem::path out = report.empty() ? default_report_path(m.source) : std::filesystem::path(report);
  if (!out.empty()) {
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write report " + out.string());
    f << to_json(r).dump(2) << "\n";
    if (!quiet) std::cout << "report: " << out.string() << "\n";
  }
  return r.exit_code();
}

int curvature(const std::string& path, const std::string& profile, int point, const std::string& label,
              std::optional<std::uint64_t> seed) {
  const Manifest m = manifest_from(path, profile);
  const RunSpec* run = &m.runs.front();
  if (!label.empty()) {
    run = nullptr;
    for (const RunSpec& r : m.runs)
      if (r.label == label) run = &r;
    if (!run) throw ManifestError("--run", "no run labelled '" + label + "'");
  }
  SamplePlan plan = run->sample;
  if (seed) plan.seed = *seed;
  const auto pts = plan.points();
  if (point < 0 || point >= static_cast<int>(pts.size()))
    throw ManifestError("--point", "index out of range (0.." + std::to_string(pts.size() - 1) + ")");
  const GeometryPoint geo = curvature_zoo(run->metric, pts[static_cast<std::size_t>(point)], 4);
  json j = {{"fixture", run->label},
            {"point_index", point},
            {"point", geo.point},
            {"signature", {geo.metric.p, geo.metric.q}},
            {"metric", tensor_entry(geo.metric.g)},
            {"inverse_metric", tensor_entry(geo.metric.ginv)},
            {"christoffel", tensor_entry(geo.christoffel)},
            {"riemann", tensor_entry(geo.riemann)},
            {"ricci", tensor_entry(geo.ricci)},
            {"scalar", geo.scalar.value()},
            {"weyl", tensor_entry(geo.weyl)},
            {"schouten", tensor_entry(geo.schouten)},
            {"J", geo.J.value()},
            {"cotton", tensor_entry(geo.cotton)},
            {"bach", tensor_entry(geo.bach)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

void list_suites() {
  std::size_t w = 0;
  for (const Suite& s : suites()) w = std::max(w, s.name.size());
  for (const Suite& s : suites()) {
    std::string req = describe(s.req);
    std::cout << s.name << std::string(w + 2 - s.name.size(), ' ') << "[" << req << "] " << s.description << "\n";
  }
}

void list_fixtures() {
  std::cout << "metrics:\n";
  for (const auto& f : metric_fixture_list()) std::cout << "  " << f.name << " (" << f.parameters << "): " << f.description << "\n";
  std::cout << "connections:\n";
  for (const auto& f : connection_fixture_list()) std::cout << "  " << f.name << " (" << f.parameters << "): " << f.description << "\n";
  std::cout << "profiles:\n";
  for (const auto& p : profile_names()) std::cout << "  " << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of conformal detour complexes"};
  app.require_subcommand(1);

  std::string manifest, profile, report, label;
  std::optional<std::uint64_t> seed;
  double scale = 1.0;
  int jobs = 1, point = 0;
  bool quiet = false;

  auto* chk = app.add_subcommand("check", "run the suites of a manifest");
  chk->add_option("manifest", manifest, "manifest file (JSON)");
  chk->add_option("--profile", profile, "built-in manifest instead of a file");
  chk->add_option("--report", report, "write the JSON report here (default: $DETOUR_REPORT_DIR/<name>.report.json)");
  chk->add_option("--seed", seed, "override every sample seed");
  chk->add_option("--tolerance-scale", scale, "multiply every tolerance")->check(CLI::PositiveNumber);
  chk->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
  chk->add_flag("--quiet", quiet, "suppress the table");

  auto* cur = app.add_subcommand("curvature", "dump curvature tensors at one sample point");
  cur->add_option("manifest", manifest, "manifest file (JSON)");
  cur->add_option("--profile", profile, "built-in manifest instead of a file");
  cur->add_option("--point", point, "sample point index")->required();
  cur->add_option("--run", label, "run label (default: first run)");
  cur->add_option("--seed", seed, "override the sample seed");

  auto* ls = app.add_subcommand("list-suites", "list suite names and requirements");
  auto* lf = app.add_subcommand("list-fixtures", "list metric and connection fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (chk->parsed()) return check(manifest, profile, report, seed, scale, jobs, quiet);
    if (cur->parsed()) return curvature(manifest, profile, point, label, seed);
    if (ls->parsed()) list_suites();
    if (lf->parsed()) list_fixtures();
    return 0;
  } catch (const ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}
