#pragma once

#include <string>
#include <vector>

#include "detour/expr.hpp"
#include "detour/report.hpp"
#include "detour/sample.hpp"
#include "detour/tensor.hpp"

namespace detour {

struct MetricSpec {
  int n = 0;
  int p = 0, q = 0;
  std::vector<Expr> g;  // n*n, row-major
  std::string name;

  // Structural symmetry and arity; throws std::invalid_argument.
  void validate() const;
  std::vector<Jet> jets(const Point& x, int order) const;
};

// Metric geometry at one point.  With base order R the metric carries R,
// Christoffel symbols R-1, curvature R-2, Cotton R-3 and Bach R-4.
// Riemann convention: [nabla_a, nabla_b] v^c = R_ab^c_d v^d, Ric_bd = R_abcd g^ac,
// so the unit sphere has Sc = n(n-1).
struct GeometryPoint {
  Point point;
  int order = 0;
  MetricAtPoint metric;
  Tensor christoffel;  // Gamma^a_bc
  Tensor riemann;      // R_abcd
  Tensor ricci;
  Jet scalar;
  Tensor weyl;      // C_abcd
  Tensor schouten;  // P_ab
  Jet J;
  Tensor cotton;  // A_abc = 2 nabla_[b P_c]a
  Tensor bach;    // B_ab = nabla^c A_acb + P^dc C_dacb

  int dim() const { return metric.n; }
};

Tensor christoffel(const MetricAtPoint& m);
Tensor christoffel(const MetricSpec& g, const Point& x, int order = 4);

// Full curvature zoo; needs n >= 3.  Bach is filled only when order >= 4.
GeometryPoint curvature_zoo(const MetricSpec& g, const Point& x, int order = 4);
GeometryPoint curvature_from_jets(int n, const std::vector<Jet>& gab, const Point& x);

// Levi-Civita derivative; the new covariant index is placed first.
template <class S>
BasicTensor<S> covariant_derivative(const BasicTensor<S>& t, const Tensor& gamma);
template <class S>
BasicTensor<S> covariant_derivative(const BasicTensor<S>& t, const GeometryPoint& geo) {
  return covariant_derivative(t, geo.christoffel);
}

// Metric jets of e^{2 omega} g.
std::vector<Jet> rescaled_metric(const std::vector<Jet>& gab, const Jet& omega);

// Weyl invariance, the Christoffel transformation law and, at n = 4, the
// rescaling power of Bach.
CheckReport conformal_covariance_check(const MetricSpec& g, const Expr& omega, const Point& x);

// S_b^c -> -2 nabla^a nabla_[a S_b]^c - R_ba^c_d S^ad for S with indices (Co, Contra).
Tensor harmonic_curvature_op(const GeometryPoint& geo, const Tensor& S);
// (nabla^a R_ba^c_d) v^d: the curvature-divergence action predicted for S = nabla v.
Tensor curvature_divergence_action(const GeometryPoint& geo, const Tensor& v);

// Self-consistency: Bianchi identities, trace-freeness, decomposition, Cotton traces.
CheckReport curvature_identities(const GeometryPoint& geo, double tol_bianchi = 1e-9);

// Polynomial tensor field with uniformly drawn coefficients in [-amp, amp]
// up to degree `degree`, expressed as jets at the base point of order `order`.
Jet random_polynomial_jet(Rng& rng, int n, int order, int degree, double amp = 1.0);

}  // namespace detour
