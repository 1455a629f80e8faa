#pragma once

#include <string>
#include <vector>

#include "detour/field.hpp"
#include "detour/fixtures.hpp"
#include "detour/geometry.hpp"
#include "detour/report.hpp"
#include "detour/yangmills.hpp"

namespace detour {

// Row-major square complex matrix.
struct CMatrix {
  int dim = 0;
  std::vector<cplx> a;

  static CMatrix zero(int d) { return {d, std::vector<cplx>(static_cast<std::size_t>(d * d))}; }
  static CMatrix identity(int d);
  cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i * dim + j)]; }
  cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(i * dim + j)]; }
  CMatrix adjoint() const;
  double max_abs() const;
};

CMatrix operator*(const CMatrix& x, const CMatrix& y);
CMatrix operator+(CMatrix x, const CMatrix& y);
CMatrix operator-(CMatrix x, const CMatrix& y);
CMatrix operator*(cplx s, CMatrix x);

// Clifford module for the diagonal form eta (entries +1 / -1), with
// beta^i beta^j + beta^j beta^i = -eta^ij Id.  Generators are Pauli tensor
// products scaled by 1/sqrt(2), times i on the +1 directions, so they are
// anti-Hermitian there and Hermitian on the -1 directions.
struct CliffordRep {
  int p = 0, q = 0;
  std::vector<int> eta;
  int dim = 0;  // 2^floor(n/2)
  std::vector<CMatrix> beta;
  // Hermitian H with beta^dagger H = eps H beta, so <beta x, y> = eps <x, beta y>
  // for <x, y> = x^dagger H y.  eps = -1 whenever possible; odd n with odd q
  // only admits eps = +1.
  CMatrix pairing;
  int pairing_sign = -1;
  // Even n: chi^2 = 1, anticommutes with every generator.  Empty for odd n.
  CMatrix chirality;

  int n() const { return static_cast<int>(eta.size()); }
};

// First p directions positive, last q negative.  Throws for p + q > 6 or < 1.
CliffordRep clifford_build(int p, int q);
// Any ordering of signs, for frames whose timelike vectors are not last.
CliffordRep clifford_for(const std::vector<int>& eta);

CheckReport check_clifford(const CliffordRep& c);

// Orthonormal frame, Clifford symbols and spin connection at a point.  The
// frame is Gram-Schmidt of the coordinate frame in index order; eta records
// the sign each vector ends up with.  Spinors are CTensors with fiber
// `spinor_dim()` in the frame gauge.
struct SpinGeometry {
  GeometryPoint geo;
  CliffordRep cl;
  Tensor frame;  // (i, a) = e_i^a
  CTensor beta;  // beta^a, fiber dim^2
  CTensor beta_low;  // beta_a
  std::vector<Tensor> omega;  // omega[a](i, j) = g(e_i, nabla_a e_j)
  FiberConnection spin;  // -1/2 omega_aij beta^i beta^j
  FiberConnection tractor;  // spin-tractor connection, fiber 2 * dim

  int dim() const { return geo.dim(); }
  int spinor_dim() const { return cl.dim; }
  Twisted spinor() const { return Twisted(geo, spin); }
  Twisted twisted() const { return Twisted(geo, tractor); }
};

SpinGeometry spin_geometry(GeometryPoint geo);
SpinGeometry spin_geometry(const MetricSpec& g, const Point& x, int order);

// Clifford multiplication of each fiber by beta^a (contravariant) or beta_a;
// for a form, the new index is placed first.
CTensor clifford_up(const SpinGeometry& sg, const CTensor& v);
CTensor clifford_down(const SpinGeometry& sg, const CTensor& v);
// beta^a u_a for a spinor 1-form.
CTensor clifford_trace(const SpinGeometry& sg, const CTensor& u);
// u_a + (2/n) beta_a beta^c u_c: projection onto the twistor bundle.
CTensor twistor_project(const SpinGeometry& sg, const CTensor& u);
// Applies a fiber matrix field (CJet per entry) to each spinor.
CTensor fiber_apply(const CJet* m, const CTensor& v, int dim);

CTensor dirac(const SpinGeometry& sg, const CTensor& psi);
CTensor twistor_T(const SpinGeometry& sg, const CTensor& psi);
CTensor adjoint_Tstar(const SpinGeometry& sg, const CTensor& u);

// Spin-tractor sections have fiber 2 * dim: psi in the first half, phi in the second.
CTensor spin_tractor(const CTensor& psi, const CTensor& phi);
CTensor tractor_top(const CTensor& s);
CTensor tractor_bottom(const CTensor& s);

// psi -> (psi, (2/n) D psi).
CTensor L0(const SpinGeometry& sg, const CTensor& psi);
// u_a -> (u_a, 2/(n-2) (D u_a - (n-1)^{-1} beta_a nabla^b u_b)); u must be beta-traceless.
CTensor L1(const SpinGeometry& sg, const CTensor& u);
// Pairing adjoint of L1: (X_a, Y_a) -> pi(Y_a + 2/(n-2) (D X_a - (n-1)^{-1} nabla_a(beta^b X_b))).
CTensor L1_adjoint(const SpinGeometry& sg, const CTensor& Phi);
// Third-order operator L1* M L1 on twistor fields.
CTensor M_Sigma(const SpinGeometry& sg, const CTensor& u);

// Slot formula (nabla psi + beta_a phi, nabla phi + P_ab beta^b psi).
CTensor spin_tractor_slots(const SpinGeometry& sg, const CTensor& s);
// <phi, psi'> - eps <psi, phi'>, which the connection preserves for either eps.
CJet spin_tractor_pairing(const SpinGeometry& sg, const CTensor& s, const CTensor& t);
// Remap from the g splitting to the e^{2 omega} g splitting with density factors:
// (e^{omega/2} psi, e^{-omega/2} (phi + Ups_c beta^c psi)).
CTensor spin_tractor_rescale(const SpinGeometry& sg, const Jet& omega, const CTensor& s);

CheckReport check_spin_curvature(const SpinGeometry& sg, const CTensor& phi);
CheckReport check_bcurv(const SpinGeometry& sg);
CheckReport check_spin_pairing(const SpinGeometry& sg, const CTensor& s, const CTensor& t);
// Items: spincomm (slotwise), pl, keyid, bcurv-ricci, bcurv-scalar.
CheckReport check_spincomm(const SpinGeometry& sg, const CTensor& psi);
// Two-path equivariance of the spin-tractor connection and of L0.
CheckReport spintrtr_equivariance(const MetricSpec& g, const Expr& omega, const FieldSpec& psi, const FieldSpec& s,
                                  const Point& x);
// Dimension-4: M_Sigma(e^{w/2} u) in the rescaled metric equals e^{-5w/2} M_Sigma(u).
CheckReport spin_conformal_n4(const MetricSpec& g, const Expr& omega, const FieldSpec& u, const Point& x);
// n = 4 chirality bookkeeping: M_Sigma maps positive-chirality twistor fields to negative ones and back.
CheckReport check_chirality(const SpinGeometry& sg, const CTensor& u);

// Fits M_Sigma T phi = c B_ab beta^b phi over all samples.  Measured: c (real,
// imaginary), spread of per-sample constants, and the largest Bach action.
struct BachCliffordSample {
  CTensor lhs;  // M_Sigma T phi
  CTensor rhs;  // B_ab beta^b phi
};
BachCliffordSample bach_clifford_sample(const SpinGeometry& sg, const CTensor& phi);
CheckReport check_bach_clifford(const std::vector<BachCliffordSample>& samples, double tol = 1e-8);

// Spinor fields: "const-spinor", "linear-twistor" (x^a beta_a psi0 for a flat metric),
// "random-spinor" (seed, degree, amplitude).
FieldSpec spinor_fixture(const std::string& name, const MetricSpec& g, const FixtureParams& params = {});

}  // namespace detour
