#pragma once

#include <string>
#include <vector>

#include "detour/field.hpp"
#include "detour/geometry.hpp"
#include "detour/report.hpp"

namespace detour {

// Connection 1-form A_a on a rank-k bundle in a local frame, stored as a
// complex 1-form whose fiber index i*k + j is the matrix entry (i, j).
// The covariant derivative is D_a v = d_a v + A_a v.
struct FiberConnection {
  int k = 0;
  CTensor A;

  static FiberConnection zero(int n, int k, int order);
  int dim() const { return A.dim(); }
  const CJet& operator()(int a, int i, int j) const { return A(a, i * k + j); }
  CJet& operator()(int a, int i, int j) { return A(a, i * k + j); }

  // Induced connection on End(V): u -> [A, u], fiber i*k + j.
  FiberConnection adjoint() const;
  // Connection -A^T on the dual bundle.
  FiberConnection dual() const;
  // A + s * dA, with dA an End-valued 1-form.
  FiberConnection plus(const CTensor& dA, cplx s) const;
};

struct ConnectionSpec {
  int n = 0;
  int k = 1;
  std::vector<Expr> re;  // n*k*k entries, index (a*k + i)*k + j
  std::vector<Expr> im;  // empty for real connections
  // Fiber form preserved by the connection when `compatible`; row-major k*k.
  std::vector<cplx> hV;
  bool compatible = false;
  std::string name;

  void validate() const;
  FiberConnection jets(const Point& x, int order) const;
};

// k x k jet matrix products on fiber-packed components.
void fiber_matmul(const CJet* a, const CJet* b, CJet* out, int k, cplx s = 1.0);

// Differential calculus of V-valued forms for one metric and connection
// at a point.  Forms are CTensors with covariant manifold indices and the
// bundle on the fiber axis.
class Twisted {
 public:
  Twisted(MetricAtPoint metric, Tensor gamma, FiberConnection conn);
  Twisted(const GeometryPoint& geo, FiberConnection conn) : Twisted(geo.metric, geo.christoffel, std::move(conn)) {}

  int dim() const { return metric_.n; }
  int rank() const { return conn_.k; }
  const MetricAtPoint& metric() const { return metric_; }
  const Tensor& gamma() const { return gamma_; }
  const FiberConnection& connection() const { return conn_; }
  // The same metric with the induced connection on End(V).
  Twisted adjoint() const { return Twisted(metric_, gamma_, conn_.adjoint()); }

  // Levi-Civita coupled derivative; the new index comes first.
  CTensor D(const CTensor& t) const;
  // (d phi)_{a0..ak} = sum_j (-1)^j D_{aj} phi_{a0..^aj..ak}.
  CTensor d(const CTensor& phi) const;
  // (delta psi)_{a1..ak} = -D^b psi_{b a1..ak}.
  CTensor delta(const CTensor& psi) const;
  // F_ab = d_a A_b - d_b A_a + [A_a, A_b], End-valued.
  CTensor F() const;
  // (F.phi)_b = F_b^a phi_a.
  CTensor F_dot(const CTensor& phi) const;
  // delta d phi - F.phi.
  CTensor M(const CTensor& phi) const;
  // -D^a D_a phi_b + D^a D_b phi_a - F_b^a phi_a, assembled from second derivatives.
  CTensor M_expanded(const CTensor& phi) const;
  // delta F computed with the End(V) connection.
  CTensor current() const;

  // Action of an End-valued tensor on a V-valued one, contracting nothing.
  // Result indices: those of `e` then those of `t`.
  CTensor act(const CTensor& e, const CTensor& t) const;
  // e(alpha) Phi = alpha_b Phi for an End-valued 1-form and a section.
  CTensor ext(const CTensor& alpha, const CTensor& Phi) const { return act(alpha, Phi); }
  // i(alpha) psi = alpha^a psi_a.
  CTensor intr(const CTensor& alpha, const CTensor& psi) const;

 private:
  MetricAtPoint metric_;
  Tensor gamma_;
  FiberConnection conn_;
};

// Levi-Civita derivative coupled with a fiber connection.
CTensor coupled_derivative(const CTensor& t, const Tensor& gamma, const FiberConnection& A);

// Hodge star on k-forms with orientation dx0 ^ ... ^ dx(n-1); the fiber is carried along.
CTensor hodge_star(const CTensor& psi, const MetricAtPoint& m);
// Projection onto the +1/-1 (q even) or +i/-i (q odd) eigenspace of the star on 2-forms, n = 4.
CTensor sd_project(const CTensor& psi, const MetricAtPoint& m, int sign);

// Algebraic action of the current: M d Phi = e(delta F) Phi and delta M psi = -i(delta F) psi.
CheckReport check_algact(const Twisted& tw, const CTensor& Phi, const CTensor& psi);

// Derivatives of the Yang-Mills current along a connection line and a
// gauge orbit compared with M applied to the tangent vector.
CheckReport variational_checks(const ConnectionSpec& c, const FieldSpec& Adot, const FieldSpec& udot,
                               const MetricSpec& g, const Point& x, double step = 1e-4);

// Composition verdicts for E^0 -> E^1 -> E_1 -> E_0; the current is reported
// as a measured value so callers can decide what vanishing means.
CheckReport detour_compositions(const Twisted& tw, const CTensor& Phi, const CTensor& psi);

// Half-flat sub-complexes in dimension 4.  `flat_half` is the projection
// sign annihilating F (+1 or -1).
CheckReport check_half_flat(const Twisted& tw, const CTensor& Phi, const CTensor& phi, int flat_half);

// Dimension-4 covariance of M under g -> e^{2 omega} g.
CheckReport md_conformal_check(const ConnectionSpec& c, const MetricSpec& g, const Expr& omega,
                               const FieldSpec& phi, const Point& x);

// Integrated pairings on a midpoint grid: <d phi, psi> = <phi, delta psi>
// and, for compatible connections, symmetry of M.  Fields should decay at
// the box boundary.
struct QuadratureGrid {
  std::vector<std::pair<double, double>> box;
  int cells = 16;
};
CheckReport quadrature_adjointness(const ConnectionSpec& c, const MetricSpec& g, const FieldSpec& phi0,
                                   const FieldSpec& phi1, const FieldSpec& psi1, const QuadratureGrid& grid);

}  // namespace detour
