#include <gtest/gtest.h>

#include "detour/field.hpp"
#include "detour/geometry.hpp"
#include "detour/report.hpp"
#include "generators.hpp"

namespace detour {
namespace {

using testing::random_metric;
using testing::random_point;

struct Frame {
  int n;
  Point x;
  MetricAtPoint m;
};

Frame setup(Rng& rng, int n) {
  const Point x = random_point(rng, n);
  const MetricSpec g = random_metric(rng, n);
  return {n, x, MetricAtPoint::from_components(n, g.jets(x, 3))};
}

Tensor random_tensor(Rng& rng, const Frame& s, std::vector<Variance> idx, double weight = 0.0) {
  Tensor t = random_field(rng, s.n, std::move(idx), 1, 3).real_jets(s.x, 3);
  t.set_weight(weight);
  return t;
}

Tensor zero_like(const Tensor& t) {
  Tensor z = t;
  for (auto& j : z.data()) j = Jet(0.0);
  return z;
}

TEST(TensorAlgebra, SymmetrisationIsLinearAndIdempotent) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Frame s = setup(rng, rng.integer(2, 5));
    const Tensor a = random_tensor(rng, s, {Variance::Co, Variance::Co, Variance::Co});
    const Tensor b = random_tensor(rng, s, {Variance::Co, Variance::Co, Variance::Co});
    const std::vector<int> all{0, 1, 2}, pair{0, 2};
    const double c = rng.uniform(-2.0, 2.0);
    EXPECT_LT(residual(sym<double>(c * a + b, all), c * sym<double>(a, all) + sym<double>(b, all)), 1e-12);
    EXPECT_LT(residual(asym<double>(c * a + b, pair), c * asym<double>(a, pair) + asym<double>(b, pair)), 1e-12);
    EXPECT_LT(residual(sym<double>(sym<double>(a, all), all), sym<double>(a, all)), 1e-12);
    EXPECT_LT(residual(asym<double>(asym<double>(a, all), all), asym<double>(a, all)), 1e-12);
  }
}

TEST(TensorAlgebra, SymAndAsymAnnihilateEachOther) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Frame s = setup(rng, rng.integer(2, 5));
    const Tensor t = random_tensor(rng, s, {Variance::Co, Variance::Co});
    const std::vector<int> p{0, 1};
    EXPECT_LT(asym<double>(sym<double>(t, p), p).max_value(), 1e-12);
    EXPECT_LT(sym<double>(asym<double>(t, p), p).max_value(), 1e-12);
    EXPECT_LT(residual(sym<double>(t, p) + asym<double>(t, p), t), 1e-12);
  }
}

TEST(TensorAlgebra, TraceFreeSymmetricPart) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Frame s = setup(rng, rng.integer(2, 6));
    const Tensor t = random_tensor(rng, s, {Variance::Co, Variance::Co});
    const Tensor h = tfs(t, s.m);
    const Tensor tr = contract(h, 0, 1, s.m);
    EXPECT_LT(std::abs(tr().value()), 1e-12);
    EXPECT_LT(residual(tfs(h, s.m), h), 1e-12);
    const std::vector<int> p{0, 1};
    EXPECT_LT(asym<double>(h, p).max_value(), 1e-12);
  }
}

TEST(TensorAlgebra, WeightBookkeeping) {
  Rng rng(4);
  const Frame s = setup(rng, 4);
  const Tensor t = random_tensor(rng, s, {Variance::Co, Variance::Co}, 1.5);
  EXPECT_DOUBLE_EQ(contract(t, 0, 1, s.m).weight(), -0.5);
  const Tensor up = raise_lower(t, 0, s.m);
  EXPECT_EQ(up.variance(0), Variance::Contra);
  EXPECT_DOUBLE_EQ(up.weight(), -0.5);
  EXPECT_DOUBLE_EQ(contract(up, 0, 1, s.m).weight(), -0.5);
  const Tensor uu = raise_lower(up, 1, s.m);
  EXPECT_DOUBLE_EQ(uu.weight(), -2.5);
  EXPECT_DOUBLE_EQ(contract(uu, 0, 1, s.m).weight(), -0.5);
  const Tensor back = raise_lower(up, 0, s.m);
  EXPECT_DOUBLE_EQ(back.weight(), 1.5);
  EXPECT_LT(residual(back, t), 1e-12);
  EXPECT_DOUBLE_EQ(s.m.g.weight(), 2.0);
  EXPECT_DOUBLE_EQ(s.m.ginv.weight(), -2.0);
}

TEST(TensorAlgebra, InverseMetricIsAnInverseAsJets) {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Frame s = setup(rng, rng.integer(2, 6));
    for (int a = 0; a < s.n; ++a)
      for (int c = 0; c < s.n; ++c) {
        Jet acc(0.0);
        for (int b = 0; b < s.n; ++b) acc += s.m.g(a, b) * s.m.ginv(b, c);
        Jet want(s.n, 3, a == c ? 1.0 : 0.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < acc.size(); ++k) worst = std::max(worst, std::abs(acc[k] - want[k]));
        EXPECT_LT(worst, 1e-12);
      }
  }
}

TEST(TensorAlgebra, SignatureCount) {
  EXPECT_EQ(signature_of({1, 0, 0, 0, -1, 0, 0, 0, 2}, 3), (std::array<int, 2>{2, 1}));
  EXPECT_EQ(signature_of({0, 1, 1, 0}, 2), (std::array<int, 2>{1, 1}));
}

TEST(TensorAlgebra, ZeroTensorHasNoResidual) {
  Rng rng(6);
  const Frame s = setup(rng, 3);
  const Tensor t = random_tensor(rng, s, {Variance::Co});
  EXPECT_EQ(residual(t - t, zero_like(t)), 0.0);
}

}  // namespace
}  // namespace detour
