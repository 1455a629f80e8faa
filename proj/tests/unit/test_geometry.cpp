#include <gtest/gtest.h>

#include <cmath>

#include "detour/expr.hpp"
#include "detour/fixtures.hpp"
#include "detour/geometry.hpp"
#include "generators.hpp"

namespace detour {
namespace {

using testing::failures;
using testing::random_metric;
using testing::random_point;

using Matrix = std::vector<std::vector<double>>;

// Gauss-Jordan with partial pivoting; the metrics here are well conditioned.
Matrix inverse(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// Christoffel symbols from extrapolated finite differences of the metric.
std::vector<double> christoffel_oracle(const MetricSpec& g, const Point& x) {
  const int n = g.n;
  const auto at = [&](int a, int b) { return g.g[static_cast<std::size_t>(a * n + b)]; };
  Matrix gm(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) gm[a][b] = at(a, b).eval(x);
  const Matrix gi = inverse(gm);
  // dg[c][a][b] = d_c g_ab
  std::vector<Matrix> dg(static_cast<std::size_t>(n), gm);
  for (int c = 0; c < n; ++c) {
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    alpha[c] = 1;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dg[c][a][b] = at(a, b).is_constant() ? 0.0 : fd_extrapolated(at(a, b), x, alpha, 0.05);
  }
  std::vector<double> out(static_cast<std::size_t>(n * n * n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += gi[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
        out[static_cast<std::size_t>((a * n + b) * n + c)] = 0.5 * s;
      }
  return out;
}

MetricSpec fixture(const std::string& name, int n) { return metric_fixture(name, {{"n", n}}).spec; }

TEST(GeometryOracle, ChristoffelMatchesFiniteDifferences) {
  Rng rng(21);
  std::vector<std::pair<MetricSpec, Point>> cases;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = rng.integer(3, 5);
    cases.push_back({random_metric(rng, n, 0.2), random_point(rng, n)});
  }
  cases.push_back({fixture("sphere", 4), Point{0.2, -0.3, 0.1, 0.4}});
  cases.push_back({fixture("hyperbolic", 3), Point{0.1, 0.2, -0.15}});
  cases.push_back({fixture("schwarzschild", 4), Point{0.0, 5.0, 1.1, 0.3}});
  for (const auto& [g, x] : cases) {
    const Tensor gamma = christoffel(g, x, 1);
    const std::vector<double> want = christoffel_oracle(g, x);
    const int n = g.n;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          EXPECT_NEAR(gamma(a, b, c).value(), want[static_cast<std::size_t>((a * n + b) * n + c)], 1e-7)
              << g.name << " n=" << n << " (" << a << b << c << ")";
  }
}

// e^{2f} delta has Sc = -e^{-2f} (2(n-1) lap f + (n-1)(n-2) |df|^2).
TEST(GeometryOracle, ConformallyFlatScalarCurvature) {
  Rng rng(22);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = rng.integer(3, 5);
    const Expr f = Expr::constant(0.3) * testing::random_expr(rng, n, 2);
    const Expr e2f = Expr::unary(ExprKind::Exp, Expr::constant(2.0) * f);
    MetricSpec g;
    g.n = n;
    g.p = n;
    g.name = "conformally-flat";
    g.g.assign(static_cast<std::size_t>(n * n), Expr::constant(0.0));
    for (int a = 0; a < n; ++a) g.g[static_cast<std::size_t>(a * n + a)] = e2f;
    const Point x = random_point(rng, n);
    const Jet jf = jet_eval(f, x, 2);
    double lap = 0.0, grad2 = 0.0;
    for (int a = 0; a < n; ++a) {
      lap += jf.partial(a).partial(a).value();
      grad2 += std::pow(jf.partial(a).value(), 2);
    }
    const double want = -std::exp(-2.0 * jf.value()) * (2.0 * (n - 1) * lap + (n - 1) * (n - 2) * grad2);
    const GeometryPoint geo = curvature_zoo(g, x, 2);
    EXPECT_NEAR(geo.scalar.value(), want, 1e-10 * std::max(1.0, std::abs(want))) << f.str();
  }
}

// Space forms of sectional curvature k: R_abcd = k (g_ac g_bd - g_ad g_bc).
void expect_space_form(const MetricSpec& g, const Point& x, double k) {
  const GeometryPoint geo = curvature_zoo(g, x, 4);
  const int n = g.n;
  const Tensor& m = geo.metric.g;
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double want =
              k * (m(a, c).value() * m(b, d).value() - m(a, d).value() * m(b, c).value());
          worst = std::max(worst, std::abs(geo.riemann(a, b, c, d).value() - want));
        }
  EXPECT_LT(worst, 1e-10) << g.name << " n=" << n;
  EXPECT_NEAR(geo.J.value(), k * n / 2.0, 1e-10);
  EXPECT_NEAR(geo.scalar.value(), k * n * (n - 1), 1e-10);
  Tensor half = m;
  for (auto& j : half.data()) j = j * (k / 2.0);
  EXPECT_LT(residual(geo.schouten, half), 1e-10);
  EXPECT_LT(geo.weyl.max_value(), 1e-10);
  EXPECT_LT(geo.cotton.max_value(), 1e-9);
  if (n == 4) {
    EXPECT_LT(geo.bach.max_value(), 1e-8);
  }
}

TEST(GeometryClosedForm, SpheresAndHyperbolicSpaces) {
  for (int n : {3, 4, 5}) {
    Point x(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) x[i] = 0.1 * (i + 1) - 0.2;
    expect_space_form(fixture("sphere", n), x, 1.0);
    expect_space_form(fixture("hyperbolic", n), x, -1.0);
  }
  const MetricSpec big = metric_fixture("sphere", {{"n", 4}, {"radius", 2.0}}).spec;
  expect_space_form(big, Point{0.1, 0.0, -0.2, 0.3}, 0.25);
}

TEST(GeometryClosedForm, SchwarzschildIsRicciFlatButNotConformallyFlat) {
  const MetricSpec g = fixture("schwarzschild", 4);
  SamplePlan plan;
  plan.seed = 5;
  plan.count = 4;
  plan.box = metric_fixture("schwarzschild", {}).box;
  for (const Point& x : plan.points()) {
    const GeometryPoint geo = curvature_zoo(g, x, 4);
    EXPECT_LT(geo.ricci.max_value(), 1e-10);
    EXPECT_GT(geo.weyl.max_value(), 1e-3);
    EXPECT_LT(geo.bach.max_value(), 1e-8);
    EXPECT_EQ(geo.metric.p, 3);
    EXPECT_EQ(geo.metric.q, 1);
  }
}

TEST(GeometryIdentities, HoldOnEveryFixture) {
  for (const auto& info : metric_fixture_list())
    for (int n : {3, 4, 5}) {
      if (info.name == "schwarzschild" && n != 4) continue;
      const MetricFixture f = metric_fixture(info.name, {{"n", n}, {"seed", 9}});
      SamplePlan plan;
      plan.seed = 11;
      plan.count = 3;
      plan.box = f.box;
      for (const Point& x : plan.points()) {
        const CheckReport r = curvature_identities(curvature_zoo(f.spec, x, 4));
        EXPECT_TRUE(r.pass()) << info.name << " n=" << n << " " << failures(r);
      }
    }
}

TEST(GeometryIdentities, HoldOnRandomMetrics) {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.integer(3, 6);
    const CheckReport r = curvature_identities(curvature_zoo(random_metric(rng, n, 0.15), random_point(rng, n), 4));
    EXPECT_TRUE(r.pass()) << "trial " << trial << " " << failures(r);
  }
}

TEST(GeometryConformal, CovarianceUnderRescaling) {
  Rng rng(24);
  for (int n : {3, 4, 5})
    for (int trial = 0; trial < 3; ++trial) {
      const MetricSpec g = random_metric(rng, n, 0.1);
      const Expr omega = Expr::constant(0.2) * testing::random_expr(rng, 3, 2);
      const CheckReport r = conformal_covariance_check(g, omega, random_point(rng, n));
      EXPECT_TRUE(r.pass()) << "n=" << n << " " << omega.str() << " " << failures(r);
    }
}

TEST(GeometryConformal, RescaledFlatMetricHasVanishingWeyl) {
  const MetricSpec flat = fixture("flat", 4);
  const Point x{0.1, -0.2, 0.3, 0.05};
  const Jet omega = jet_eval(parse("0.2*x0*x1 - 0.1*x2^2 + 0.05*x3", 4), x, 4);
  const GeometryPoint geo = curvature_from_jets(4, rescaled_metric(flat.jets(x, 4), omega), x);
  EXPECT_LT(geo.weyl.max_value(), 1e-12);
  EXPECT_GT(geo.schouten.max_value(), 1e-3);
  EXPECT_LT(geo.bach.max_value(), 1e-10);
}

TEST(MetricSpec, ValidationRejectsAsymmetricComponents) {
  MetricSpec g = fixture("flat", 3);
  g.g[1] = parse("x0", 3);
  EXPECT_THROW(g.validate(), std::invalid_argument);
  EXPECT_THROW(metric_fixture("schwarzschild", {{"n", 3}}), std::invalid_argument);
  EXPECT_THROW(metric_fixture("no-such-metric", {}), std::invalid_argument);
}

}  // namespace
}  // namespace detour
