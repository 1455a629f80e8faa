#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "detour/cli/manifest.hpp"
#include "detour/report.hpp"

namespace detour::cli {

// Everything a suite sees about one run.
struct RunContext {
  const RunSpec* run = nullptr;
  std::vector<Point> points;
  std::uint64_t seed = 1;
  Expr omega;

  int dim() const { return run->metric.n; }
  const MetricSpec& metric() const { return run->metric; }
  // Deterministic stream for (suite, point); independent of scheduling.
  std::uint64_t stream(const std::string& suite, int point) const;
};

struct Requirements {
  int dim = 0;       // exact dimension, 0 for any
  int min_dim = 3;
  bool riemannian = false;
  bool connection = false;
  bool einstein = false;
  bool constant_metric = false;
};

struct Suite {
  std::string name;
  std::string description;
  Requirements req;
  // Per-point suites are called once per sample point; others once with -1.
  bool per_point = true;
  std::function<std::vector<CheckReport>(const RunContext&, int point)> run;
};

const std::vector<Suite>& suites();
const Suite* find_suite(const std::string& name);

// Empty when the run satisfies the suite's requirements, else the reason.
std::string requirement_error(const Suite& s, const RunSpec& run);
std::string describe(const Requirements& r);

}  // namespace detour::cli
