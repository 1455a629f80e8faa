#pragma once

#include "detour/field.hpp"
#include "detour/geometry.hpp"
#include "detour/report.hpp"
#include "detour/yangmills.hpp"

namespace detour {

// Standard tractor bundle in the splitting of a chosen metric.  Sections are
// CTensors whose fiber holds the slots in the order
//   0: sigma (weight 1),  1 + b: mu_b (weight 1),  n + 1: rho (weight -1),
// with mu in coordinate components.  Tractor forms carry covariant manifold
// indices in front of that fiber.
struct TractorGeometry {
  GeometryPoint geo;
  FiberConnection conn;  // nabla_a = d_a + A_a in the slot basis

  explicit TractorGeometry(GeometryPoint g);
  int dim() const { return geo.dim(); }
  int slots() const { return geo.dim() + 2; }
  Twisted twisted() const { return Twisted(geo, conn); }
};

TractorGeometry tractor_geometry(const MetricSpec& g, const Point& x, int order);

// Connection matrices: row sigma takes -mu_a; row mu_b takes P_ab sigma,
// -Gamma^c_ab mu_c and g_ab rho; row rho takes -P_a^c mu_c.
FiberConnection tractor_connection_matrix(const GeometryPoint& geo);
// Slot formulas applied directly, independent of the matrix form.
CTensor tractor_connection_slots(const GeometryPoint& geo, const CTensor& s);
// h = g^{-1}(mu, mu) + 2 sigma rho as an (n+2) x (n+2) matrix in the fiber.
CTensor tractor_metric(const GeometryPoint& geo);

// Second covariant derivative of a scalar, (a, b) = nabla_a nabla_b f.
CTensor hessian(const GeometryPoint& geo, const CJet& f);
CJet laplacian(const GeometryPoint& geo, const CJet& f);

// sigma -> (sigma, nabla sigma, -(Delta sigma + J sigma)/n).
CTensor splitting_D(const GeometryPoint& geo, const CJet& sigma);
CJet project_X(const CTensor& s);
// (sigma, mu, rho) -> rho - nabla^a mu_a - (Delta sigma + J sigma)/n.
CJet adjoint_Dstar(const GeometryPoint& geo, const CTensor& s);
// psi_ab -> (0, psi_ab, -(n-1)^{-1} nabla^b psi_ab) as a tractor 1-form.
CTensor splitting_E(const GeometryPoint& geo, const CTensor& psi);
// (alpha_a, nu_ab, tau_a) -> TFS(nu) + (n-1)^{-1} TFS(nabla alpha).
CTensor adjoint_Estar(const GeometryPoint& geo, const CTensor& Phi);
// TF(nabla_a nabla_b sigma + P_ab sigma).
CTensor P_op(const GeometryPoint& geo, const CJet& sigma);
// nabla^a nabla^b phi_ab + P^ab phi_ab.
CJet adjoint_Pstar(const GeometryPoint& geo, const CTensor& phi);
// Explicit second-order formula for E* M E on trace-free symmetric h.
CTensor M_T(const GeometryPoint& geo, const CTensor& h);
// (Q nu)_abc = 2 nabla_[a nu_b]c + 2 g_c[a tau_b], tau_a = -(n-1)^{-1} nabla^b nu_ab.
CTensor Q_op(const GeometryPoint& geo, const CTensor& nu);
// Formal adjoint of Q for the pairing that weights the antisymmetric pair by 1/2.
CTensor Q_adjoint(const GeometryPoint& geo, const CTensor& w);

// Block formulas for the tractor curvature and its divergence nabla^a Omega_ab.
CTensor tractor_curvature_blocks(const GeometryPoint& geo);
CTensor div_tractor_curvature_blocks(const GeometryPoint& geo);

CheckReport check_eincomm(const TractorGeometry& tg, const CJet& sigma);
CheckReport check_tractor_curvature(const TractorGeometry& tg);
CheckReport check_MT_composition(const TractorGeometry& tg, const CTensor& h);
CheckReport check_MP(const TractorGeometry& tg, const CJet& sigma);
CheckReport check_trmetric_parallel(const TractorGeometry& tg, const CTensor& s, const CTensor& t);
// D* delta = P* E* on tractor 1-forms.
CheckReport check_adjoint_square(const TractorGeometry& tg, const CTensor& Phi);
// M_T - Q*Q applied to h and to h + dh, where dh vanishes to second order at the point.
CheckReport check_QQ_leading(const TractorGeometry& tg, const CTensor& h, const CTensor& dh);
// Two-path equivariance of the connection and invariance of h under a rescaling.
CheckReport transf_equivariance(const MetricSpec& g, const Expr& omega, const FieldSpec& s, const Point& x);
// Dimension-4 covariance of P, M_T and P*.
CheckReport tractor_conformal_n4(const MetricSpec& g, const Expr& omega, const FieldSpec& sigma,
                                 const FieldSpec& h, const Point& x);

// Slot remap of a tractor (or each component of a tractor form) from the
// g splitting to the e^{2 omega} g splitting, including density factors.
CTensor tractor_rescale(const GeometryPoint& geo, const Jet& omega, const CTensor& s);

}  // namespace detour
