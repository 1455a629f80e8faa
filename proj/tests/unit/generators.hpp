#pragma once

// Hand-rolled generators for property tests.  Every generator draws from a
// caller-owned Rng so a failing case is reproduced by its seed alone.

#include <string>
#include <vector>

#include "detour/fixtures.hpp"
#include "detour/sample.hpp"

namespace detour::testing {

inline Point random_point(Rng& rng, int n, double h = 0.4) {
  Point x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.uniform(-h, h);
  return x;
}

// Random expression tree over x0..x(n-1) mixing polynomial and transcendental
// nodes.  Division and log only see arguments bounded away from zero.
inline Expr random_expr(Rng& rng, int n, int depth) {
  if (depth == 0 || rng.uniform() < 0.25) {
    if (rng.uniform() < 0.4) return Expr::constant(rng.uniform(-2.0, 2.0));
    return Expr::variable(rng.integer(0, n - 1));
  }
  const Expr a = random_expr(rng, n, depth - 1);
  switch (rng.integer(0, 7)) {
    case 0: return a + random_expr(rng, n, depth - 1);
    case 1: return a - random_expr(rng, n, depth - 1);
    case 2: return a * random_expr(rng, n, depth - 1);
    case 3: return a / (Expr::constant(2.0) + Expr::unary(ExprKind::Sin, random_expr(rng, n, depth - 1)));
    case 4: return Expr::unary(ExprKind::Exp, Expr::constant(0.5) * a);
    case 5: return Expr::unary(ExprKind::Cos, a);
    case 6: return Expr::unary(ExprKind::Log, Expr::constant(3.0) + Expr::unary(ExprKind::Sin, a));
    default: return Expr::binary(ExprKind::Pow, a, Expr::constant(static_cast<double>(rng.integer(2, 3))));
  }
}

inline MetricSpec random_metric(Rng& rng, int n, double amplitude = 0.1) {
  FixtureParams p{{"n", n}, {"seed", static_cast<double>(rng.integer(1, 1 << 20))}, {"amplitude", amplitude}};
  return metric_fixture("perturbed-flat", p).spec;
}

// Random polynomial connection; gl(k) unless su2 is requested.
inline ConnectionSpec random_connection(Rng& rng, int n, int rank, int degree, bool su2 = false) {
  FixtureParams p{{"n", n}, {"rank", rank}, {"degree", degree}, {"seed", static_cast<double>(rng.integer(1, 1 << 20))}};
  return connection_fixture(su2 ? "random-su2" : "random-gl", p).spec;
}

inline FieldSpec random_symmetric(Rng& rng, int n, int degree = 3) {
  FieldSpec f = random_field(rng, n, {Variance::Co, Variance::Co}, 1, degree, 1.0, true);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b) {
      f.re[static_cast<std::size_t>(a * n + b)] = f.re[static_cast<std::size_t>(b * n + a)];
      f.im[static_cast<std::size_t>(a * n + b)] = f.im[static_cast<std::size_t>(b * n + a)];
    }
  return f;
}

inline std::vector<double> random_covector(Rng& rng, int n) {
  std::vector<double> xi(static_cast<std::size_t>(n));
  for (double& v : xi) v = rng.uniform(-1.0, 1.0);
  return xi;
}

// Failing item names, for readable assertion messages.
inline std::string failures(const CheckReport& r) {
  std::string s;
  for (const auto& it : r.items)
    if (!it.pass) s += it.name + "=" + std::to_string(it.residual) + " ";
  for (const auto& n : r.notes) s += "[" + n + "] ";
  return s;
}

}  // namespace detour::testing
