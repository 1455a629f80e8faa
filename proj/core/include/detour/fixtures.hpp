#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "detour/geometry.hpp"
#include "detour/yangmills.hpp"

namespace detour {

using FixtureParams = std::map<std::string, double>;
using Box = std::vector<std::pair<double, double>>;

struct MetricFixture {
  MetricSpec spec;
  Box box;  // default sampling box
  bool einstein = false;
};

struct ConnectionFixture {
  ConnectionSpec spec;
  Box box;
  bool yang_mills = false;
  // +1 or -1 when one half of F vanishes identically (dimension 4), else 0.
  int flat_half = 0;
};

struct FixtureInfo {
  std::string name;
  std::string parameters;
  std::string description;
};

// Names: flat, sphere, hyperbolic, schwarzschild, perturbed-flat.
// Parameters: n, q (flat), radius (sphere), mass (schwarzschild),
// seed and amplitude (perturbed-flat).
MetricFixture metric_fixture(const std::string& name, const FixtureParams& params = {});
// Names: zero, abelian-linear, abelian-quadratic, bpst, random-su2, random-gl.
// Parameters: n, scale (bpst), seed, degree, amplitude, rank (random-gl).
ConnectionFixture connection_fixture(const std::string& name, const FixtureParams& params = {});

const std::vector<FixtureInfo>& metric_fixture_list();
const std::vector<FixtureInfo>& connection_fixture_list();

// Diagonal metric from per-axis expressions.
MetricSpec diagonal_metric(const std::vector<std::string>& diag, int p, int q, const std::string& name);
// Rank-2 su(2) basis -i sigma_1, -i sigma_2, -i sigma_3 as row-major complex matrices.
std::array<std::array<cplx, 4>, 3> su2_basis();

}  // namespace detour
