#include <gtest/gtest.h>

#include "detour/fixtures.hpp"
#include "detour/tractor.hpp"
#include "generators.hpp"

namespace detour {
namespace {

using testing::failures;
using testing::random_metric;
using testing::random_point;
using testing::random_symmetric;

CJet scalar(Rng& rng, int n, const Point& x, int order) {
  return random_field(rng, n, {}, 1, 3, 1.0, true).jets(x, order)();
}

CTensor tractor(Rng& rng, int n, const Point& x, int order) {
  return random_field(rng, n, {}, n + 2, 3, 1.0, true).jets(x, order);
}

MetricSpec fixture(const std::string& name, int n) { return metric_fixture(name, {{"n", n}}).spec; }

TEST(TractorIdentities, HoldOnRandomMetrics) {
  Rng rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + trial % 3;
    const MetricSpec g = random_metric(rng, n);
    const Point x = random_point(rng, n);
    const TractorGeometry tg5 = tractor_geometry(g, x, 5);
    const TractorGeometry tg4 = tractor_geometry(g, x, 4);
    const std::string tag = "n=" + std::to_string(n) + " trial " + std::to_string(trial);
    const CheckReport reps[] = {
        check_eincomm(tg5, scalar(rng, n, x, 5)),
        check_tractor_curvature(tg5),
        check_MP(tg5, scalar(rng, n, x, 5)),
        check_MT_composition(tg4, tfs(random_symmetric(rng, n).jets(x, 4), tg4.geo.metric)),
        check_trmetric_parallel(tg4, tractor(rng, n, x, 4), tractor(rng, n, x, 4)),
        check_adjoint_square(tg4, random_field(rng, n, {Variance::Co}, n + 2, 3, 1.0, true).jets(x, 4)),
    };
    for (const CheckReport& r : reps) EXPECT_TRUE(r.pass()) << tag << " " << r.suite << " " << failures(r);
  }
}

TEST(TractorIdentities, EquivarianceUnderRescaling) {
  Rng rng(42);
  for (int n : {3, 4, 5}) {
    const MetricSpec g = random_metric(rng, n);
    const Expr omega = Expr::constant(0.2) * testing::random_expr(rng, n, 2);
    const FieldSpec s = random_field(rng, n, {}, n + 2, 3, 1.0, true);
    const CheckReport r = transf_equivariance(g, omega, s, random_point(rng, n));
    EXPECT_FALSE(r.items.empty());
    EXPECT_TRUE(r.pass()) << "n=" << n << " " << omega.str() << " " << failures(r);
  }
}

TEST(TractorIdentities, FourDimensionalCovariance) {
  Rng rng(43);
  for (int trial = 0; trial < 3; ++trial) {
    const MetricSpec g = random_metric(rng, 4);
    const Expr omega = parse("0.1*x0 + 0.05*x1*x2 - 0.03*x0^2", 4);
    const CheckReport r = tractor_conformal_n4(g, omega, random_field(rng, 4, {}, 1, 3, 1.0, true), random_symmetric(rng, 4),
                                               random_point(rng, 4));
    EXPECT_TRUE(r.pass()) << failures(r);
  }
}

// The opposite sign on the (n-4) term is measurably wrong away from n = 4.
TEST(TractorRegression, MPSignAwayFromDimensionFour) {
  Rng rng(44);
  for (int n : {3, 5, 6}) {
    const MetricSpec g = random_metric(rng, n, 0.2);
    const Point x = random_point(rng, n);
    const CheckReport r = check_MP(tractor_geometry(g, x, 5), scalar(rng, n, x, 5));
    EXPECT_TRUE(r.pass()) << "n=" << n << " " << failures(r);
    EXPECT_GT(r.measured.at("opposite-sign-residual"), 1e-4) << "n=" << n;
  }
}

// On space forms of curvature k, D(1) = (1, 0, -k/2) is parallel.
TEST(TractorClosedForm, UnitDensityIsParallelOnSpaceForms) {
  for (const char* name : {"sphere", "hyperbolic"})
    for (int n : {3, 4, 5}) {
      Point x(static_cast<std::size_t>(n), 0.1);
      x[0] = -0.2;
      const TractorGeometry tg = tractor_geometry(fixture(name, n), x, 4);
      const CJet one(n, 3, cplx(1.0));
      const CTensor I = splitting_D(tg.geo, one);
      const double k = std::string(name) == "sphere" ? 1.0 : -1.0;
      EXPECT_NEAR(std::abs(I(0).value() - 1.0), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(I(n + 1).value() + k / 2.0), 0.0, 1e-10) << name;
      const CTensor dI = tg.twisted().D(I);
      EXPECT_LT(dI.max_value(), 1e-10) << name << " n=" << n;
    }
}

// On flat space h(D sigma, D sigma) = |d sigma|^2 - 2 sigma lap(sigma) / n, computed from jets.
TEST(TractorClosedForm, TractorNormOfDOnFlatSpace) {
  Rng rng(45);
  for (int n : {3, 4, 5}) {
    const Point x = random_point(rng, n);
    const TractorGeometry tg = tractor_geometry(fixture("flat", n), x, 4);
    const Jet s = random_field(rng, n, {}, 1, 3).real_jets(x, 4)();
    double grad2 = 0.0, lap = 0.0;
    for (int a = 0; a < n; ++a) {
      grad2 += s.partial(a).value() * s.partial(a).value();
      lap += s.partial(a).partial(a).value();
    }
    const double want = grad2 - 2.0 * s.value() * lap / n;
    CJet cs(n, 4, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) cs[i] = s[i];
    const CTensor D = splitting_D(tg.geo, cs);
    const CTensor h = tractor_metric(tg.geo);
    cplx got = 0.0;
    for (int A = 0; A < n + 2; ++A)
      for (int B = 0; B < n + 2; ++B) got += D(A).value() * h(A * (n + 2) + B).value() * D(B).value();
    EXPECT_NEAR(got.real(), want, 1e-10);
    EXPECT_NEAR(got.imag(), 0.0, 1e-12);
  }
}

TEST(TractorClosedForm, EinsteinFixturesHaveVanishingBach) {
  struct Case {
    const char* name;
    Point x;
  };
  const Case cases[] = {{"sphere", {0.1, 0.2, -0.3, 0.0}}, {"hyperbolic", {0.1, -0.1, 0.2, 0.05}},
                        {"schwarzschild", {0.0, 5.0, 1.2, 0.4}}};
  Rng rng(46);
  for (const Case& c : cases) {
    const TractorGeometry tg = tractor_geometry(fixture(c.name, 4), c.x, 5);
    EXPECT_LT(tg.geo.bach.max_value(), 1e-8) << c.name;
    const CheckReport r = check_MP(tg, scalar(rng, 4, c.x, 5));
    EXPECT_TRUE(r.pass()) << c.name << " " << failures(r);
    EXPECT_LT(r.measured.at("bach"), 1e-8);
  }
}

TEST(TractorClosedForm, MetricSignatureIsShiftedByOneOne) {
  Rng rng(47);
  const MetricSpec lorentz = metric_fixture("flat", {{"n", 4}, {"q", 1}}).spec;
  const Point x = random_point(rng, 4);
  const TractorGeometry tg = tractor_geometry(lorentz, x, 4);
  const CheckReport r = check_trmetric_parallel(tg, tractor(rng, 4, x, 4), tractor(rng, 4, x, 4));
  EXPECT_TRUE(r.pass()) << failures(r);
  EXPECT_EQ(r.measured.at("signature-p"), 4.0);
  EXPECT_EQ(r.measured.at("signature-q"), 2.0);
}

}  // namespace
}  // namespace detour
