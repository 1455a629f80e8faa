#include <gtest/gtest.h>

#include "detour/fixtures.hpp"
#include "detour/spin.hpp"
#include "generators.hpp"

namespace detour {
namespace {

using testing::failures;
using testing::random_metric;
using testing::random_point;

CTensor spinor(Rng& rng, int n, int d, const Point& x, int order) {
  return random_field(rng, n, {}, d, 3, 1.0, true).jets(x, order);
}

MetricSpec fixture(const std::string& name, int n, int q = 0) {
  return metric_fixture(name, {{"n", n}, {"q", q}}).spec;
}

TEST(Clifford, RelationAndPairingInEverySignature) {
  for (int n = 1; n <= 6; ++n)
    for (int q = 0; q <= n; ++q) {
      const CliffordRep c = clifford_build(n - q, q);
      const std::string tag = "(" + std::to_string(n - q) + "," + std::to_string(q) + ")";
      EXPECT_TRUE(check_clifford(c).pass()) << tag << " " << failures(check_clifford(c));
      ASSERT_EQ(c.dim, 1 << (n / 2)) << tag;
      // Independent recomputation of the defining relations.
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          CMatrix want = CMatrix::zero(c.dim);
          if (i == j) want = cplx(-c.eta[static_cast<std::size_t>(i)]) * CMatrix::identity(c.dim);
          worst = std::max(worst, (c.beta[i] * c.beta[j] + c.beta[j] * c.beta[i] - want).max_abs());
        }
      EXPECT_LT(worst, 1e-14) << tag;
      const int eps = (n % 2 == 1 && q % 2 == 1) ? 1 : -1;
      EXPECT_EQ(c.pairing_sign, eps) << tag;
      for (const CMatrix& b : c.beta)
        EXPECT_LT((b.adjoint() * c.pairing - cplx(eps) * (c.pairing * b)).max_abs(), 1e-14) << tag;
      EXPECT_GT(c.pairing.max_abs(), 0.5) << tag;
    }
}

TEST(Clifford, ChiralityInEvenDimensions) {
  for (int n : {2, 4, 6})
    for (int q = 0; q <= n; ++q) {
      const CliffordRep c = clifford_build(n - q, q);
      ASSERT_EQ(c.chirality.dim, c.dim);
      EXPECT_LT((c.chirality * c.chirality - CMatrix::identity(c.dim)).max_abs(), 1e-14);
      for (const CMatrix& b : c.beta) EXPECT_LT((c.chirality * b + b * c.chirality).max_abs(), 1e-14);
    }
  EXPECT_EQ(clifford_build(3, 0).chirality.dim, 0);
  EXPECT_THROW(clifford_build(4, 3), std::invalid_argument);
}

// On a flat metric D^2 = beta^a beta^b d_a d_b = -1/2 eta^ab d_a d_b.
TEST(SpinOracle, DiracSquaresToTheLaplacianOnFlatSpace) {
  Rng rng(51);
  for (int n : {3, 4, 5})
    for (int q : {0, 1}) {
      const MetricSpec g = fixture("flat", n, q);
      const Point x = random_point(rng, n);
      const SpinGeometry sg = spin_geometry(g, x, 4);
      const int d = sg.spinor_dim();
      const CTensor psi = spinor(rng, n, d, x, 4);
      const CTensor dd = dirac(sg, dirac(sg, psi));
      double worst = 0.0;
      for (int f = 0; f < d; ++f) {
        cplx lap = 0.0;
        for (int a = 0; a < n; ++a) {
          const double eta = a < q ? -1.0 : 1.0;
          lap += eta * psi(f).partial(a).partial(a).value();
        }
        worst = std::max(worst, std::abs(dd(f).value() + 0.5 * lap));
      }
      EXPECT_LT(worst, 1e-11) << "n=" << n << " q=" << q;
    }
}

TEST(SpinCurvature, IdentitiesOnRandomMetrics) {
  Rng rng(52);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + trial % 3;
    const Point x = random_point(rng, n);
    const SpinGeometry sg = spin_geometry(random_metric(rng, n), x, 5);
    const int d = sg.spinor_dim();
    const CheckReport r = check_spin_curvature(sg, spinor(rng, n, d, x, 5));
    EXPECT_TRUE(r.pass()) << "n=" << n << " " << failures(r);
    const CheckReport p = check_spin_pairing(sg, spinor(rng, n, 2 * d, x, 5), spinor(rng, n, 2 * d, x, 5));
    EXPECT_TRUE(p.pass()) << "n=" << n << " " << failures(p);
  }
}

TEST(SpinCommutation, FlatSphereAndPerturbedMetrics) {
  Rng rng(53);
  std::vector<MetricSpec> metrics{fixture("flat", 4), fixture("sphere", 4), fixture("sphere", 3)};
  for (int seed = 0; seed < 10; ++seed) metrics.push_back(random_metric(rng, 3 + seed % 3));
  for (const MetricSpec& g : metrics) {
    const Point x = random_point(rng, g.n, 0.3);
    const SpinGeometry sg = spin_geometry(g, x, 5);
    const CheckReport r = check_spincomm(sg, spinor(rng, g.n, sg.spinor_dim(), x, 5));
    EXPECT_TRUE(r.pass()) << g.name << " n=" << g.n << " " << failures(r);
  }
}

TEST(SpinCommutation, EquivarianceUnderRescaling) {
  Rng rng(54);
  for (int n : {3, 4, 5}) {
    const MetricSpec g = random_metric(rng, n);
    const int d = clifford_build(n, 0).dim;
    const Expr omega = Expr::constant(0.2) * testing::random_expr(rng, n, 2);
    const CheckReport r = spintrtr_equivariance(g, omega, random_field(rng, n, {}, d, 3, 1.0, true),
                                                random_field(rng, n, {}, 2 * d, 2, 1.0, true), random_point(rng, n));
    EXPECT_TRUE(r.pass()) << "n=" << n << " " << failures(r);
  }
}

TEST(TwistorSpinors, FlatFixturesAreKilledByT) {
  Rng rng(55);
  for (int n : {3, 4, 5}) {
    const MetricSpec g = fixture("flat", n);
    const Point x = random_point(rng, n);
    const SpinGeometry sg = spin_geometry(g, x, 3);
    for (const char* name : {"const-spinor", "linear-twistor"}) {
      const CTensor psi = spinor_fixture(name, g).jets(x, 3);
      EXPECT_GT(psi.max_value(), 1e-3) << name;
      EXPECT_LT(twistor_T(sg, psi).max_value(), 1e-12) << name << " n=" << n;
      EXPECT_LT(sg.twisted().D(L0(sg, psi)).max_value(), 1e-10) << name << " n=" << n;
    }
    const CTensor generic = spinor_fixture("random-spinor", g, {{"seed", 3}}).jets(x, 3);
    EXPECT_GT(twistor_T(sg, generic).max_value(), 1e-3);
  }
}

TEST(TwistorFourDimensional, ChiralityExchange) {
  Rng rng(56);
  for (int trial = 0; trial < 3; ++trial) {
    const Point x = random_point(rng, 4);
    const SpinGeometry sg = spin_geometry(random_metric(rng, 4), x, 6);
    const CTensor u = twistor_project(sg, random_field(rng, 4, {Variance::Co}, sg.spinor_dim(), 3, 1.0, true).jets(x, 6));
    const CheckReport r = check_chirality(sg, u);
    EXPECT_TRUE(r.pass()) << failures(r);
  }
}

// Regression for the Bach-Clifford constant: M^Sigma T phi = -B_ab beta^b phi.
TEST(TwistorFourDimensional, BachCliffordConstantIsMinusOne) {
  const MetricSpec g = metric_fixture("perturbed-flat", {{"n", 4}, {"seed", 7}, {"amplitude", 0.2}}).spec;
  const FieldSpec phi = spinor_fixture("random-spinor", g, {{"seed", 2}});
  Rng rng(57);
  std::vector<BachCliffordSample> samples;
  for (int k = 0; k < 3; ++k) {
    const Point x = random_point(rng, 4);
    samples.push_back(bach_clifford_sample(spin_geometry(g, x, 6), phi.jets(x, 6)));
  }
  const CheckReport r = check_bach_clifford(samples);
  EXPECT_TRUE(r.pass()) << failures(r);
  EXPECT_NEAR(r.measured.at("c-real"), -1.0, 1e-8);
  EXPECT_NEAR(r.measured.at("c-imag"), 0.0, 1e-8);
  EXPECT_GT(r.measured.at("bach-action"), 1e-4);
}

TEST(TwistorFourDimensional, BachFreeMetricsAnnihilateTPhi) {
  struct Case {
    MetricSpec g;
    Point x;
  };
  const Case cases[] = {{fixture("flat", 4), {0.1, -0.2, 0.3, 0.0}},
                        {metric_fixture("schwarzschild", {}).spec, {0.0, 5.0, 1.2, 0.4}}};
  for (const Case& c : cases) {
    const FieldSpec phi = spinor_fixture("random-spinor", c.g, {{"seed", 4}});
    const BachCliffordSample s = bach_clifford_sample(spin_geometry(c.g, c.x, 6), phi.jets(c.x, 6));
    EXPECT_LT(s.lhs.max_value(), 1e-7) << c.g.name;
    EXPECT_LT(s.rhs.max_value(), 1e-7) << c.g.name;
  }
}

}  // namespace
}  // namespace detour
