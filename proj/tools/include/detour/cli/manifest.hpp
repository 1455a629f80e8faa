#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "detour/fixtures.hpp"

namespace detour::cli {

inline constexpr const char* kManifestSchema = "detour-manifest/1";

// Validation failure; `where` is a dotted field path or "line L, column C".
struct ManifestError : std::runtime_error {
  ManifestError(std::string where, const std::string& msg)
      : std::runtime_error(where.empty() ? msg : where + ": " + msg), where(std::move(where)) {}
  std::string where;
};

// One geometry/connection pairing with the suites to run on it.
struct RunSpec {
  std::string label;
  MetricSpec metric;
  bool einstein = false;
  std::optional<ConnectionSpec> connection;
  int flat_half = 0;
  std::string rescale;  // empty: built-in default
  SamplePlan sample;
  std::vector<std::string> suites;
  std::vector<std::string> expect_fail;
};

struct Tolerances {
  double scale = 1.0;
  // Keys: "suite" or "suite/item".
  std::map<std::string, double> overrides;
};

struct Manifest {
  std::string source;  // path or profile name
  std::vector<RunSpec> runs;
  Tolerances tolerances;
};

Manifest parse_manifest(const std::string& text, const std::string& source = "<memory>");
Manifest load_manifest(const std::string& path);

// Built-in manifests; "paper-core" covers every suite on default fixtures.
Manifest profile_manifest(const std::string& name);
std::vector<std::string> profile_names();

}  // namespace detour::cli
