#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "detour/cli/manifest.hpp"
#include "detour/report.hpp"

namespace detour::cli {

inline constexpr const char* kReportSchema = "detour-report/1";

struct RunOptions {
  std::optional<std::uint64_t> seed;
  double tolerance_scale = 1.0;
  int jobs = 1;
};

enum class SuiteStatus { Pass, Fail, ExpectedFail, UnexpectedPass };

struct SuiteSummary {
  std::string run;
  std::string suite;
  std::string fixture;
  int checks = 0;
  int failed = 0;
  double max_residual = 0.0;
  SuiteStatus status = SuiteStatus::Pass;
};

struct RunReport {
  std::string source;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  double tolerance_scale = 1.0;
  std::vector<CheckReport> reports;  // canonical order
  std::vector<std::string> report_runs;  // run label per report
  std::vector<SuiteSummary> summaries;
  double wall_seconds = 0.0;

  bool ok() const;
  int exit_code() const { return ok() ? 0 : 1; }
};

RunReport run_manifest(const Manifest& m, const RunOptions& opt = {});

// Machine report; timing lives under "timing" only.
nlohmann::ordered_json to_json(const RunReport& r);
std::string to_table(const RunReport& r);
const char* status_name(SuiteStatus s);

}  // namespace detour::cli
