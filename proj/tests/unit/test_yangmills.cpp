#include <gtest/gtest.h>

#include "detour/fixtures.hpp"
#include "detour/yangmills.hpp"
#include "generators.hpp"

namespace detour {
namespace {

using testing::failures;
using testing::random_connection;
using testing::random_metric;
using testing::random_point;

constexpr int kOrder = 4;

Twisted twisted(const MetricSpec& g, const ConnectionSpec& c, const Point& x, int order = kOrder) {
  const MetricAtPoint m = MetricAtPoint::from_components(g.n, g.jets(x, order));
  return Twisted(m, christoffel(m), c.jets(x, order));
}

CTensor section(Rng& rng, int n, int k, const Point& x) {
  return random_field(rng, n, {}, k, 3, 1.0, true).jets(x, kOrder);
}
CTensor one_form(Rng& rng, int n, int k, const Point& x) {
  return random_field(rng, n, {Variance::Co}, k, 3, 1.0, true).jets(x, kOrder);
}

MetricSpec flat(int n) { return metric_fixture("flat", {{"n", n}}).spec; }
ConnectionSpec named(const std::string& name, int n = 4) { return connection_fixture(name, {{"n", n}}).spec; }

TEST(YangMillsAlgebra, ActionOfTheCurrentOnRandomConnections) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(3, 5), k = rng.integer(1, 3), deg = rng.integer(1, 3);
    const ConnectionSpec c = random_connection(rng, n, k, deg);
    const MetricSpec g = trial % 2 ? random_metric(rng, n) : flat(n);
    const Point x = random_point(rng, n);
    const Twisted tw = twisted(g, c, x);
    const CheckReport r = check_algact(tw, section(rng, n, k, x), one_form(rng, n, k, x));
    EXPECT_TRUE(r.pass()) << "trial " << trial << " n=" << n << " k=" << k << " " << failures(r);
  }
}

TEST(YangMillsAlgebra, ActionOnSu2Connections) {
  Rng rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    const ConnectionSpec c = random_connection(rng, 4, 2, 2, true);
    const Point x = random_point(rng, 4);
    const CheckReport r = check_algact(twisted(random_metric(rng, 4), c, x), section(rng, 4, 2, x), one_form(rng, 4, 2, x));
    EXPECT_TRUE(r.pass()) << failures(r);
  }
}

TEST(YangMillsComplex, CompositionsVanishForYangMillsConnections) {
  Rng rng(33);
  for (const char* name : {"abelian-linear", "bpst", "zero"}) {
    const ConnectionSpec c = named(name);
    for (int trial = 0; trial < 3; ++trial) {
      const Point x = random_point(rng, 4);
      const CheckReport r = detour_compositions(twisted(flat(4), c, x), section(rng, 4, c.k, x), one_form(rng, 4, c.k, x));
      EXPECT_TRUE(r.pass()) << name << " " << failures(r);
      EXPECT_LT(r.measured.at("current"), 1e-10) << name;
    }
  }
}

// A = x0^2 dx1 on flat space: F_01 = 2 x0, so the current (delta F)_1 = -d_0 F_01 = -2
// and M d Phi must equal -2 Phi on the dx1 component and vanish elsewhere.
TEST(YangMillsComplex, AbelianQuadraticCompositionIsTheCurrentAction) {
  const ConnectionSpec c = named("abelian-quadratic");
  Rng rng(34);
  for (int trial = 0; trial < 4; ++trial) {
    const Point x = random_point(rng, 4);
    const Twisted tw = twisted(flat(4), c, x);
    const CTensor Phi = section(rng, 4, 1, x);
    const CTensor MdPhi = tw.M(tw.d(Phi));
    CTensor want = MdPhi;
    for (auto& j : want.data()) j = CJet(0.0);
    want(1, 0) = Phi(0) * cplx(-2.0);
    EXPECT_LT(residual(MdPhi, want), 1e-10);
    const CTensor J = tw.current();
    EXPECT_NEAR(std::abs(J(1, 0).value() - cplx(-2.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(J(0, 0).value()), 0.0, 1e-12);
    const CheckReport r = detour_compositions(tw, Phi, one_form(rng, 4, 1, x));
    EXPECT_FALSE(r.pass());
    EXPECT_NEAR(r.measured.at("current"), 2.0, 1e-12);
  }
}

TEST(YangMillsVariations, CurrentDerivativeAlongRandomDirections) {
  Rng rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng.integer(3, 4), k = rng.integer(1, 2);
    const ConnectionSpec c = random_connection(rng, n, k, 2);
    const FieldSpec Adot = random_field(rng, n, {Variance::Co}, k * k, 2, 0.5, true);
    const FieldSpec udot = random_field(rng, n, {}, k * k, 2, 0.5, true);
    const MetricSpec g = trial % 2 ? random_metric(rng, n) : flat(n);
    const CheckReport r = variational_checks(c, Adot, udot, g, random_point(rng, n));
    EXPECT_TRUE(r.pass()) << "trial " << trial << " " << failures(r);
  }
}

TEST(YangMillsHalfFlat, BpstCurvatureIsKilledByThePlusProjection) {
  const ConnectionSpec c = named("bpst");
  Rng rng(36);
  for (int trial = 0; trial < 4; ++trial) {
    const Point x = random_point(rng, 4);
    const Twisted tw = twisted(flat(4), c, x);
    const CheckReport r = check_half_flat(tw, section(rng, 4, 2, x), one_form(rng, 4, 2, x), 1);
    EXPECT_TRUE(r.pass()) << failures(r);
    EXPECT_GT(r.measured.at("dd-minus"), 1e-6);
  }
}

TEST(YangMillsHalfFlat, AbelianLinearFieldHasBothHalves) {
  const ConnectionSpec c = named("abelian-linear");
  Rng rng(37);
  const Point x = random_point(rng, 4);
  const Twisted tw = twisted(flat(4), c, x);
  const CTensor Phi = section(rng, 4, 1, x), phi = one_form(rng, 4, 1, x);
  EXPECT_TRUE(check_half_flat(tw, Phi, phi, 0).pass());
  EXPECT_FALSE(check_half_flat(tw, Phi, phi, 1).pass());
  EXPECT_FALSE(check_half_flat(tw, Phi, phi, -1).pass());
}

TEST(YangMillsHodge, StarSquaresToTheSignatureSign) {
  Rng rng(38);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 4;
    const Point x = random_point(rng, n);
    const MetricAtPoint m = MetricAtPoint::from_components(n, random_metric(rng, n).jets(x, 2));
    for (int deg = 0; deg <= n; ++deg) {
      std::vector<Variance> idx(static_cast<std::size_t>(deg), Variance::Co);
      CTensor psi = random_field(rng, n, idx, 1, 2, 1.0, true).jets(x, 2);
      if (deg >= 2) {
        std::vector<int> all(static_cast<std::size_t>(deg));
        for (int i = 0; i < deg; ++i) all[static_cast<std::size_t>(i)] = i;
        psi = asym<cplx>(psi, all);
      }
      CTensor ss = hodge_star(hodge_star(psi, m), m);
      if ((deg * (n - deg)) % 2) ss *= cplx(-1.0);
      EXPECT_LT(residual(ss, psi), 1e-10) << "degree " << deg;
    }
  }
}

TEST(YangMillsQuadrature, IntegratedAdjointness) {
  Rng rng(39);
  const int n = 4;
  QuadratureGrid grid;
  grid.box.assign(4, {-1.0, 1.0});
  grid.cells = 8;
  Expr bump = Expr::constant(1.0);
  for (int i = 0; i < n; ++i) {
    const Expr xi = Expr::variable(i);
    bump = bump * Expr::binary(ExprKind::Pow, Expr::constant(1.0) - xi * xi, Expr::constant(3.0));
  }
  const ConnectionSpec c = named("bpst");
  const FieldSpec phi0 = scaled(random_field(rng, n, {}, 2, 2, 1.0, true), bump);
  const FieldSpec phi1 = scaled(random_field(rng, n, {Variance::Co}, 2, 2, 1.0, true), bump);
  const FieldSpec psi1 = scaled(random_field(rng, n, {Variance::Co}, 2, 2, 1.0, true), bump);
  const CheckReport r = quadrature_adjointness(c, flat(n), phi0, phi1, psi1, grid);
  EXPECT_TRUE(r.pass()) << failures(r);
  EXPECT_GT(r.measured.at("d-pairing"), 1e-3);
}

}  // namespace
}  // namespace detour
