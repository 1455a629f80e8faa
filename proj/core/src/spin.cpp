#include "detour/spin.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace detour {

namespace {

std::vector<Variance> co(int r) { return std::vector<Variance>(static_cast<std::size_t>(r), Variance::Co); }

bool zero_jet(const Jet& j) { return j.is_constant() && j.value() == 0.0; }
bool zero_cjet(const CJet& j) { return j.is_constant() && j.value() == cplx(0.0); }

CJet conj(CJet j) {
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = std::conj(j[i]);
  return j;
}

CMatrix kron(const CMatrix& x, const CMatrix& y) {
  CMatrix out = CMatrix::zero(x.dim * y.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int j = 0; j < x.dim; ++j)
      for (int k = 0; k < y.dim; ++k)
        for (int l = 0; l < y.dim; ++l) out(i * y.dim + k, j * y.dim + l) = x(i, j) * y(k, l);
  return out;
}

CMatrix pauli(int which) {
  const cplx i(0.0, 1.0);
  CMatrix m = CMatrix::zero(2);
  if (which == 1) m.a = {0.0, 1.0, 1.0, 0.0};
  if (which == 2) m.a = {0.0, -i, i, 0.0};
  if (which == 3) m.a = {1.0, 0.0, 0.0, -1.0};
  return m;
}

// Constant matrix as a fiber block of jets.
std::vector<CJet> jets_of(const CMatrix& m) { return {m.a.begin(), m.a.end()}; }

// out(rest, f) = sum_b M(b)_{fg} t(b, rest, g): contracts a fiber-matrix 1-form
// against the first manifold index of t.
CTensor contract_first(const CTensor& M, const CTensor& t, int d) {
  const int n = t.dim();
  std::vector<Variance> idx(t.indices().begin() + 1, t.indices().end());
  CTensor out(n, idx, t.weight(), d);
  const std::size_t block = t.size() / static_cast<std::size_t>(n);
  const std::size_t comps = block / static_cast<std::size_t>(d);
  for (int b = 0; b < n; ++b) {
    const CJet* m = &M(b, 0);
    for (std::size_t c = 0; c < comps; ++c)
      for (int f = 0; f < d; ++f)
        for (int g = 0; g < d; ++g) {
          const CJet& x = m[f * d + g];
          if (zero_cjet(x)) continue;
          const CJet& y = t.flat_at(static_cast<std::size_t>(b) * block + c * static_cast<std::size_t>(d) + static_cast<std::size_t>(g));
          if (zero_cjet(y)) continue;
          mac(out.flat_at(c * static_cast<std::size_t>(d) + static_cast<std::size_t>(f)), x, y);
        }
  }
  return out;
}

// Prepends an index a: out(a, rest, f) = M(a)_{fg} t(rest, g).
CTensor prepend(const CTensor& M, const CTensor& t, int d, Variance v) {
  const int n = t.dim();
  std::vector<Variance> idx{v};
  idx.insert(idx.end(), t.indices().begin(), t.indices().end());
  CTensor out(n, idx, t.weight(), d);
  const std::size_t block = t.size();
  for (int a = 0; a < n; ++a) {
    CTensor one = fiber_apply(&M(a, 0), t, d);
    for (std::size_t k = 0; k < block; ++k) out.flat_at(static_cast<std::size_t>(a) * block + k) = std::move(one.flat_at(k));
  }
  return out;
}

CTensor scaled_by(CTensor t, const CJet& f) {
  for (auto& v : t.data()) v = v * f;
  return t;
}

CTensor half(const CTensor& s, int d, int which) {
  std::vector<Variance> idx = s.indices();
  CTensor out(s.dim(), idx, s.weight(), d);
  const std::size_t comps = s.size() / static_cast<std::size_t>(2 * d);
  for (std::size_t c = 0; c < comps; ++c)
    for (int f = 0; f < d; ++f)
      out.flat_at(c * static_cast<std::size_t>(d) + static_cast<std::size_t>(f)) =
          s.flat_at(c * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(which * d + f));
  return out;
}

double relative(double num, double scale) { return num / std::max(1.0, scale); }

}  // namespace

CMatrix CMatrix::identity(int d) {
  CMatrix m = zero(d);
  for (int i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m = zero(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = std::conj((*this)(j, i));
  return m;
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : a) m = std::max(m, std::abs(z));
  return m;
}

CMatrix operator*(const CMatrix& x, const CMatrix& y) {
  CMatrix out = CMatrix::zero(x.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int k = 0; k < x.dim; ++k) {
      const cplx v = x(i, k);
      if (v == cplx(0.0)) continue;
      for (int j = 0; j < x.dim; ++j) out(i, j) += v * y(k, j);
    }
  return out;
}

CMatrix operator+(CMatrix x, const CMatrix& y) {
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
  return x;
}

CMatrix operator-(CMatrix x, const CMatrix& y) {
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] -= y.a[i];
  return x;
}

CMatrix operator*(cplx s, CMatrix x) {
  for (auto& z : x.a) z *= s;
  return x;
}

CliffordRep clifford_for(const std::vector<int>& eta) {
  const int n = static_cast<int>(eta.size());
  if (n < 1 || n > 6) throw std::invalid_argument("clifford: dimension must be between 1 and 6");
  for (int e : eta)
    if (e != 1 && e != -1) throw std::invalid_argument("clifford: eta entries must be +1 or -1");
  const int m = n / 2;
  CliffordRep c;
  c.eta = eta;
  c.p = static_cast<int>(std::count(eta.begin(), eta.end(), 1));
  c.q = n - c.p;
  c.dim = 1 << m;
  // Hermitian generators squaring to the identity.
  std::vector<CMatrix> herm;
  for (int j = 0; j < m; ++j)
    for (int s : {1, 2}) {
      CMatrix g = CMatrix::identity(1);
      for (int k = 0; k < m; ++k) g = kron(g, k < j ? pauli(3) : k == j ? pauli(s) : CMatrix::identity(2));
      herm.push_back(g);
    }
  if (n % 2 == 1) {
    CMatrix g = CMatrix::identity(1);
    for (int k = 0; k < m; ++k) g = kron(g, pauli(3));
    herm.push_back(g);
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    c.beta.push_back((eta[static_cast<std::size_t>(i)] > 0 ? cplx(0.0, r) : cplx(r)) * herm[static_cast<std::size_t>(i)]);

  // Pairing: kernel of H -> beta^dagger H - eps H beta over all generators,
  // eps = -1 when such an H exists (always for even n), else +1.
  const int d = c.dim, d2 = d * d;
  Eigen::MatrixXcd ker;
  for (int eps : {-1, 1}) {
    Eigen::MatrixXcd sys = Eigen::MatrixXcd::Zero(n * d2, d2);
    for (int g = 0; g < n; ++g) {
      const CMatrix bd = c.beta[static_cast<std::size_t>(g)].adjoint();
      const CMatrix& b = c.beta[static_cast<std::size_t>(g)];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const int row = g * d2 + i * d + j;
          for (int k = 0; k < d; ++k) {
            sys(row, k * d + j) += bd(i, k);
            sys(row, i * d + k) -= static_cast<double>(eps) * b(k, j);
          }
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(sys);
    ker = lu.kernel();
    c.pairing_sign = eps;
    if (ker.norm() > 1e-12) break;
  }
  if (ker.norm() < 1e-12) throw std::runtime_error("clifford: no compatible pairing");
  CMatrix K = CMatrix::zero(d);
  for (int i = 0; i < d2; ++i) K.a[static_cast<std::size_t>(i)] = ker(i, 0);
  CMatrix H = K + K.adjoint();
  if (H.max_abs() < 1e-10) H = cplx(0.0, 1.0) * (K - K.adjoint());
  H = cplx(1.0 / H.max_abs()) * H;
  // Fix the overall sign: positive trace, else positive first nonzero entry.
  cplx tr = 0.0;
  for (int i = 0; i < d; ++i) tr += H(i, i);
  double sign = tr.real();
  if (std::abs(sign) < 1e-12)
    for (const cplx& z : H.a)
      if (std::abs(z) > 1e-12) {
        sign = std::abs(z.real()) > 1e-12 ? z.real() : z.imag();
        break;
      }
  if (sign < 0) H = cplx(-1.0) * H;
  for (auto& z : H.a) {
    if (std::abs(z.real()) < 1e-14) z.real(0.0);
    if (std::abs(z.imag()) < 1e-14) z.imag(0.0);
  }
  c.pairing = H;

  if (n % 2 == 0) {
    CMatrix B = CMatrix::identity(d);
    for (const CMatrix& b : c.beta) B = B * b;
    const cplx s = (B * B)(0, 0);
    c.chirality = (1.0 / std::sqrt(s)) * B;
  }
  return c;
}

CliffordRep clifford_build(int p, int q) {
  if (p < 0 || q < 0) throw std::invalid_argument("clifford: negative signature");
  std::vector<int> eta(static_cast<std::size_t>(p), 1);
  eta.insert(eta.end(), static_cast<std::size_t>(q), -1);
  return clifford_for(eta);
}

CheckReport check_clifford(const CliffordRep& c) {
  CheckReport rep;
  rep.suite = "clifford";
  const int n = c.n(), d = c.dim;
  double rel = 0.0, tr = 0.0, pair = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const CMatrix& a = c.beta[static_cast<std::size_t>(i)];
      const CMatrix& b = c.beta[static_cast<std::size_t>(j)];
      CMatrix ac = a * b + b * a;
      const double eta = i == j ? c.eta[static_cast<std::size_t>(i)] : 0.0;
      for (int k = 0; k < d; ++k) ac(k, k) += eta;
      rel = std::max(rel, ac.max_abs());
      cplx t = 0.0;
      const CMatrix ab = a * b;
      for (int k = 0; k < d; ++k) t += ab(k, k);
      tr = std::max(tr, std::abs(t + 0.5 * d * eta));
    }
  for (const CMatrix& b : c.beta)
    pair = std::max(pair, (b.adjoint() * c.pairing - cplx(c.pairing_sign) * (c.pairing * b)).max_abs());
  rep.add("anticommutator", rel, 1e-15);
  rep.add("trace", tr, 1e-14);
  rep.add("pairing-compatible", pair, 1e-14);
  rep.add("pairing-hermitian", (c.pairing - c.pairing.adjoint()).max_abs(), 1e-15);
  if (n % 2 == 0) {
    CMatrix sq = c.chirality * c.chirality;
    rep.add("chirality-square", (sq - CMatrix::identity(d)).max_abs(), 1e-14);
    double anti = 0.0;
    for (const CMatrix& b : c.beta) anti = std::max(anti, (c.chirality * b + b * c.chirality).max_abs());
    rep.add("chirality-anticommutes", anti, 1e-14);
  }
  return rep;
}

SpinGeometry spin_geometry(GeometryPoint geo) {
  const int n = geo.dim();
  const auto& g = geo.metric.g;
  auto inner = [&](const std::vector<Jet>& u, const std::vector<Jet>& v) {
    Jet s(0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (!zero_jet(u[static_cast<std::size_t>(a)]) && !zero_jet(v[static_cast<std::size_t>(b)]))
          s += g(a, b) * u[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)];
    return s;
  };
  std::vector<std::vector<Jet>> e;
  std::vector<int> eta;
  const double scale = geo.metric.scale();
  for (int i = 0; i < n; ++i) {
    std::vector<Jet> v(static_cast<std::size_t>(n), Jet(0.0));
    v[static_cast<std::size_t>(i)] = Jet(1.0);
    for (int j = 0; j < i; ++j) {
      const Jet c = inner(v, e[static_cast<std::size_t>(j)]) * static_cast<double>(eta[static_cast<std::size_t>(j)]);
      for (int a = 0; a < n; ++a) v[static_cast<std::size_t>(a)] -= c * e[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)];
    }
    const Jet N = inner(v, v);
    if (std::abs(N.value()) < 1e-10 * std::max(1.0, scale)) throw DomainError("spin frame: null vector in Gram-Schmidt");
    const int s = N.value() > 0 ? 1 : -1;
    const Jet inv = reciprocal(sqrt(N * static_cast<double>(s)));
    for (auto& x : v) x = x * inv;
    e.push_back(std::move(v));
    eta.push_back(s);
  }

  SpinGeometry sg;
  sg.cl = clifford_for(eta);
  const int d = sg.cl.dim;
  sg.frame = Tensor(n, {Variance::Contra, Variance::Contra});
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) sg.frame(i, a) = e[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];

  sg.beta = CTensor(n, {Variance::Contra}, -1.0, d * d);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) {
      const Jet& ei = sg.frame(i, a);
      if (zero_jet(ei)) continue;
      const CMatrix& b = sg.cl.beta[static_cast<std::size_t>(i)];
      for (int k = 0; k < d * d; ++k)
        if (b.a[static_cast<std::size_t>(k)] != cplx(0.0)) mac(sg.beta(a, k), complexify(ei), CJet(b.a[static_cast<std::size_t>(k)]));
    }
  sg.beta_low = CTensor(n, co(1), 1.0, d * d);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (zero_jet(g(a, b))) continue;
      for (int k = 0; k < d * d; ++k) mac(sg.beta_low(a, k), sg.beta(b, k), g(a, b));
    }

  // omega[a](i, j) = g(e_i, nabla_a e_j).
  sg.omega.assign(static_cast<std::size_t>(n), Tensor(n, co(2)));
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j) {
      std::vector<Jet> de(static_cast<std::size_t>(n));
      for (int b = 0; b < n; ++b) {
        Jet v = sg.frame(j, b).partial(a);
        for (int c = 0; c < n; ++c) mac(v, geo.christoffel(b, a, c), sg.frame(j, c));
        de[static_cast<std::size_t>(b)] = std::move(v);
      }
      for (int i = 0; i < n; ++i) sg.omega[static_cast<std::size_t>(a)](i, j) = inner(e[static_cast<std::size_t>(i)], de);
    }

  std::vector<std::vector<CMatrix>> bb(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bb[static_cast<std::size_t>(i)].push_back(sg.cl.beta[static_cast<std::size_t>(i)] * sg.cl.beta[static_cast<std::size_t>(j)]);
  sg.spin = FiberConnection{d, CTensor(n, co(1), 0.0, d * d)};
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Jet& w = sg.omega[static_cast<std::size_t>(a)](i, j);
        if (i == j || zero_jet(w)) continue;
        const CMatrix& m = bb[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        for (int k = 0; k < d * d; ++k)
          if (m.a[static_cast<std::size_t>(k)] != cplx(0.0)) mac(sg.spin.A(a, k), CJet(m.a[static_cast<std::size_t>(k)]), w, -0.5);
      }

  const int D = 2 * d;
  sg.tractor = FiberConnection{D, CTensor(n, co(1), 0.0, D * D)};
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < d; ++f)
      for (int h = 0; h < d; ++h) {
        const CJet& om = sg.spin(a, f, h);
        sg.tractor(a, f, h) = om;
        sg.tractor(a, d + f, d + h) = om;
        sg.tractor(a, f, d + h) = sg.beta_low(a, f * d + h);
        CJet pb(0.0);
        for (int b = 0; b < n; ++b) mac(pb, sg.beta(b, f * d + h), geo.schouten(a, b));
        sg.tractor(a, d + f, h) = std::move(pb);
      }
  sg.geo = std::move(geo);
  return sg;
}

SpinGeometry spin_geometry(const MetricSpec& g, const Point& x, int order) {
  return spin_geometry(curvature_zoo(g, x, order));
}

CTensor fiber_apply(const CJet* m, const CTensor& v, int d) {
  if (v.fiber() != d) throw std::invalid_argument("fiber_apply: fiber mismatch");
  CTensor out(v.dim(), v.indices(), v.weight(), d);
  const std::size_t comps = v.size() / static_cast<std::size_t>(d);
  for (std::size_t c = 0; c < comps; ++c) {
    const CJet* src = &v.flat_at(c * static_cast<std::size_t>(d));
    CJet* dst = &out.flat_at(c * static_cast<std::size_t>(d));
    for (int f = 0; f < d; ++f) {
      dst[f] = CJet(0.0);
      for (int g = 0; g < d; ++g) {
        const CJet& x = m[f * d + g];
        if (zero_cjet(x) || zero_cjet(src[g])) continue;
        mac(dst[f], x, src[g]);
      }
    }
  }
  return out;
}

CTensor clifford_up(const SpinGeometry& sg, const CTensor& v) {
  return prepend(sg.beta, v, sg.spinor_dim(), Variance::Contra);
}

CTensor clifford_down(const SpinGeometry& sg, const CTensor& v) {
  return prepend(sg.beta_low, v, sg.spinor_dim(), Variance::Co);
}

CTensor clifford_trace(const SpinGeometry& sg, const CTensor& u) { return contract_first(sg.beta, u, sg.spinor_dim()); }

CTensor twistor_project(const SpinGeometry& sg, const CTensor& u) {
  CTensor t = clifford_down(sg, clifford_trace(sg, u));
  t *= cplx(2.0 / sg.dim());
  t += u;
  return t;
}

CTensor dirac(const SpinGeometry& sg, const CTensor& psi) {
  return contract_first(sg.beta, sg.spinor().D(psi), sg.spinor_dim());
}

CTensor twistor_T(const SpinGeometry& sg, const CTensor& psi) {
  CTensor out = clifford_down(sg, dirac(sg, psi));
  out *= cplx(2.0 / sg.dim());
  out += sg.spinor().D(psi);
  return out;
}

CTensor adjoint_Tstar(const SpinGeometry& sg, const CTensor& u) { return sg.spinor().delta(u); }

CTensor spin_tractor(const CTensor& psi, const CTensor& phi) {
  const int d = psi.fiber();
  if (phi.fiber() != d || phi.size() != psi.size()) throw std::invalid_argument("spin_tractor: slot shapes differ");
  CTensor out(psi.dim(), psi.indices(), psi.weight(), 2 * d);
  const std::size_t comps = psi.size() / static_cast<std::size_t>(d);
  for (std::size_t c = 0; c < comps; ++c)
    for (int f = 0; f < d; ++f) {
      out.flat_at(c * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(f)) = psi.flat_at(c * static_cast<std::size_t>(d) + static_cast<std::size_t>(f));
      out.flat_at(c * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(d + f)) = phi.flat_at(c * static_cast<std::size_t>(d) + static_cast<std::size_t>(f));
    }
  return out;
}

CTensor tractor_top(const CTensor& s) { return half(s, s.fiber() / 2, 0); }
CTensor tractor_bottom(const CTensor& s) { return half(s, s.fiber() / 2, 1); }

CTensor L0(const SpinGeometry& sg, const CTensor& psi) {
  CTensor b = dirac(sg, psi);
  b *= cplx(2.0 / sg.dim());
  return spin_tractor(psi, b);
}

CTensor L1(const SpinGeometry& sg, const CTensor& u) {
  const int n = sg.dim();
  if (n < 3) throw std::invalid_argument("L1: needs n >= 3");
  const double tr = clifford_trace(sg, u).max_value();
  if (tr > 1e-10 * std::max(1.0, u.max_value())) throw std::invalid_argument("L1: input is not beta-traceless");
  CTensor div = sg.spinor().delta(u);  // -nabla^b u_b
  CTensor b = clifford_down(sg, div);
  b *= cplx(1.0 / (n - 1));
  b += dirac(sg, u);
  b *= cplx(2.0 / (n - 2));
  return spin_tractor(u, b);
}

CTensor L1_adjoint(const SpinGeometry& sg, const CTensor& Phi) {
  const int n = sg.dim();
  const CTensor X = tractor_top(Phi);
  CTensor out = sg.spinor().D(clifford_trace(sg, X));
  out *= cplx(-1.0 / (n - 1));
  out += dirac(sg, X);
  out *= cplx(2.0 / (n - 2));
  out += tractor_bottom(Phi);
  return twistor_project(sg, out);
}

CTensor M_Sigma(const SpinGeometry& sg, const CTensor& u) { return L1_adjoint(sg, sg.twisted().M(L1(sg, u))); }

CTensor spin_tractor_slots(const SpinGeometry& sg, const CTensor& s) {
  const int n = sg.dim();
  const CTensor psi = tractor_top(s), phi = tractor_bottom(s);
  CTensor top = sg.spinor().D(psi);
  top += clifford_down(sg, phi);
  CTensor bot = sg.spinor().D(phi);
  const CTensor bpsi = clifford_up(sg, psi);
  const std::size_t block = psi.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet& P = sg.geo.schouten(a, b);
      if (zero_jet(P)) continue;
      for (std::size_t k = 0; k < block; ++k)
        mac(bot.flat_at(static_cast<std::size_t>(a) * block + k), bpsi.flat_at(static_cast<std::size_t>(b) * block + k), P);
    }
  return spin_tractor(top, bot);
}

CJet spin_tractor_pairing(const SpinGeometry& sg, const CTensor& s, const CTensor& t) {
  const int d = sg.spinor_dim();
  const CMatrix& H = sg.cl.pairing;
  auto herm = [&](const CJet* x, const CJet* y) {
    CJet v(0.0);
    for (int f = 0; f < d; ++f)
      for (int g = 0; g < d; ++g)
        if (H(f, g) != cplx(0.0)) v += conj(x[f]) * y[g] * H(f, g);
    return v;
  };
  return herm(&s(d), &t(0)) - herm(&s(0), &t(d)) * cplx(sg.cl.pairing_sign);
}

CTensor spin_tractor_rescale(const SpinGeometry& sg, const Jet& omega, const CTensor& s) {
  const int n = sg.dim(), d = sg.spinor_dim();
  const CJet up = complexify(exp(omega * 0.5)), down = complexify(exp(omega * -0.5));
  // Ups_c beta^c as a fiber matrix.
  std::vector<CJet> ub(static_cast<std::size_t>(d * d), CJet(0.0));
  for (int c = 0; c < n; ++c) {
    const Jet uc = omega.partial(c);
    for (int k = 0; k < d * d; ++k) mac(ub[static_cast<std::size_t>(k)], sg.beta(c, k), uc);
  }
  const CTensor psi = tractor_top(s), phi = tractor_bottom(s);
  CTensor bot = fiber_apply(ub.data(), psi, d);
  bot += phi;
  return spin_tractor(scaled_by(psi, up), scaled_by(bot, down));
}

namespace {

// -1/2 R_abcd beta^c beta^d phi, indices (a, b).
CTensor curvature_action(const SpinGeometry& sg, const CTensor& phi) {
  const int n = sg.dim(), d = sg.spinor_dim();
  const CTensor bb = clifford_up(sg, clifford_up(sg, phi));  // (c, d', f)
  CTensor out(n, co(2), 0.0, d);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          const Jet& R = sg.geo.riemann(a, b, c, e);
          if (zero_jet(R)) continue;
          for (int f = 0; f < d; ++f) mac(out(a, b, f), bb(c, e, f), R, -0.5);
        }
  return out;
}

}  // namespace

CheckReport check_spin_curvature(const SpinGeometry& sg, const CTensor& phi) {
  const int n = sg.dim(), d = sg.spinor_dim();
  const CTensor dd = sg.spinor().D(sg.spinor().D(phi));
  CTensor comm(n, co(2), 0.0, d);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int f = 0; f < d; ++f) comm(a, b, f) = dd(a, b, f) - dd(b, a, f);
  CheckReport rep;
  rep.suite = "spin-curvature";
  rep.add("commutator", residual(comm, curvature_action(sg, phi)), 1e-9);
  // beta^a is parallel for the Levi-Civita plus spin connection.
  const Twisted end(sg.geo, sg.spin.adjoint());
  rep.add("clifford-parallel", end.D(sg.beta).max_value(), 1e-10);
  // Frame orthonormality in every jet coefficient.
  double ortho = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet s(0.0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += sg.geo.metric.g(a, b) * sg.frame(i, a) * sg.frame(j, b);
      s -= Jet(i == j ? static_cast<double>(sg.cl.eta[static_cast<std::size_t>(i)]) : 0.0);
      ortho = std::max(ortho, s.max_abs());
    }
  rep.add("frame-orthonormal", ortho, 1e-10);
  return rep;
}

CheckReport check_bcurv(const SpinGeometry& sg) {
  const int n = sg.dim(), d = sg.spinor_dim(), d2 = d * d;
  auto mat = [&](const CTensor& t, int a) { return std::vector<CJet>(&t(a, 0), &t(a, 0) + d2); };
  std::vector<std::vector<CJet>> up(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) up[static_cast<std::size_t>(a)] = mat(sg.beta, a);
  // pair[c][e] = beta^c beta^e
  std::vector<std::vector<std::vector<CJet>>> pair(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e) {
      std::vector<CJet> m(static_cast<std::size_t>(d2), CJet(0.0));
      fiber_matmul(up[static_cast<std::size_t>(c)].data(), up[static_cast<std::size_t>(e)].data(), m.data(), d);
      pair[static_cast<std::size_t>(c)].push_back(std::move(m));
    }
  double ric = 0.0, ricscale = 0.0;
  std::vector<CJet> four(static_cast<std::size_t>(d2), CJet(0.0));
  for (int a = 0; a < n; ++a) {
    std::vector<CJet> three(static_cast<std::size_t>(d2), CJet(0.0)), rb(static_cast<std::size_t>(d2), CJet(0.0));
    for (int b = 0; b < n; ++b) {
      std::vector<CJet> inner(static_cast<std::size_t>(d2), CJet(0.0));
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          const Jet& R = sg.geo.riemann(a, b, c, e);
          if (zero_jet(R)) continue;
          for (int k = 0; k < d2; ++k) mac(inner[static_cast<std::size_t>(k)], pair[static_cast<std::size_t>(c)][static_cast<std::size_t>(e)][static_cast<std::size_t>(k)], R);
        }
      fiber_matmul(up[static_cast<std::size_t>(b)].data(), inner.data(), three.data(), d);
      for (int k = 0; k < d2; ++k) mac(rb[static_cast<std::size_t>(k)], up[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)], sg.geo.ricci(a, b));
    }
    fiber_matmul(up[static_cast<std::size_t>(a)].data(), three.data(), four.data(), d);
    for (int k = 0; k < d2; ++k) {
      const auto& x = three[static_cast<std::size_t>(k)];
      const auto& y = rb[static_cast<std::size_t>(k)];
      // three carries beta^b with b raised; lower a is on R, matching Ric_ab beta^b.
      ric = std::max(ric, std::abs(x.value() - y.value()));
      ricscale = std::max({ricscale, std::abs(x.value()), std::abs(y.value())});
    }
  }
  double sc = 0.0;
  for (int k = 0; k < d2; ++k) {
    const cplx v = four[static_cast<std::size_t>(k)].value() + (k % (d + 1) == 0 ? cplx(0.5 * sg.geo.scalar.value()) : cplx(0.0));
    sc = std::max(sc, std::abs(v));
  }
  CheckReport rep;
  rep.suite = "bcurv";
  rep.add("bcurv-ricci", relative(ric, ricscale), 1e-8);
  rep.add("bcurv-scalar", relative(sc, std::abs(sg.geo.scalar.value())), 1e-8);
  return rep;
}

CheckReport check_spin_pairing(const SpinGeometry& sg, const CTensor& s, const CTensor& t) {
  const int n = sg.dim();
  const Twisted tw = sg.twisted();
  const CTensor Ds = tw.D(s), Dt = tw.D(t);
  const CJet h = spin_tractor_pairing(sg, s, t);
  const int D = 2 * sg.spinor_dim();
  CTensor lhs(n, co(1)), rhs(n, co(1));
  for (int a = 0; a < n; ++a) {
    lhs(a) = h.partial(a);
    CTensor da(n, {}, 0.0, D), ta(n, {}, 0.0, D);
    for (int f = 0; f < D; ++f) {
      da(f) = Ds(a, f);
      ta(f) = Dt(a, f);
    }
    rhs(a) = spin_tractor_pairing(sg, da, t) + spin_tractor_pairing(sg, s, ta);
  }
  CheckReport rep;
  rep.suite = "spin-pairing";
  rep.add("parallel", residual(lhs, rhs), 1e-9);
  return rep;
}

CheckReport check_spincomm(const SpinGeometry& sg, const CTensor& psi) {
  const int n = sg.dim(), d = sg.spinor_dim();
  const Twisted sp = sg.spinor();
  const CTensor Tpsi = twistor_T(sg, psi);
  CheckReport rep;
  rep.suite = "spincomm";
  rep.add("spincomm", residual(sg.twisted().D(L0(sg, psi)), L1(sg, Tpsi)), 1e-8);
  rep.add("twistor-traceless", clifford_trace(sg, Tpsi).max_value() / std::max(1.0, Tpsi.max_value()), 1e-12);

  // (2/n) nabla_a D psi + P_ab beta^b psi versus 2/(n-2) (D T_a psi - (n-1)^{-1} beta_a nabla^b T_b psi).
  CTensor lhs = sp.D(dirac(sg, psi));
  lhs *= cplx(2.0 / n);
  const CTensor bpsi = clifford_up(sg, psi);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int f = 0; f < d; ++f) mac(lhs(a, f), bpsi(b, f), sg.geo.schouten(a, b));
  CTensor rhs = clifford_down(sg, sp.delta(Tpsi));
  rhs *= cplx(1.0 / (n - 1));
  rhs += dirac(sg, Tpsi);
  rhs *= cplx(2.0 / (n - 2));
  rep.add("pl", residual(lhs, rhs), 1e-8);

  // -T*T psi = 2((1-n)/n) D^2 psi + Sc/4 psi.
  CTensor k = adjoint_Tstar(sg, Tpsi);
  k *= cplx(-1.0);
  CTensor k2 = dirac(sg, dirac(sg, psi));
  k2 *= cplx(2.0 * (1.0 - n) / n);
  for (int f = 0; f < d; ++f) mac(k2(f), psi(f), sg.geo.scalar, 0.25);
  rep.add("keyid", residual(k, k2), 1e-8);
  rep.merge(check_bcurv(sg));
  return rep;
}

CheckReport spintrtr_equivariance(const MetricSpec& g, const Expr& omega, const FieldSpec& psi, const FieldSpec& s,
                                  const Point& x) {
  const int order = 4;
  const auto gj = g.jets(x, order);
  const Jet w = jet_eval(omega, x, order);
  const SpinGeometry a = spin_geometry(curvature_from_jets(g.n, gj, x));
  const SpinGeometry b = spin_geometry(curvature_from_jets(g.n, rescaled_metric(gj, w), x));
  CheckReport rep;
  rep.suite = "spintrtr";
  rep.fixture = g.name;
  if (a.cl.eta != b.cl.eta) throw std::logic_error("spintrtr: frame signs changed under rescaling");
  const CTensor sec = s.jets(x, order);
  const CTensor shat = spin_tractor_rescale(a, w, sec);
  rep.add("connection", residual(spin_tractor_rescale(a, w, a.twisted().D(sec)), b.twisted().D(shat)), 1e-9);
  const CTensor p = psi.jets(x, order);
  const CJet up = complexify(exp(w * 0.5));
  const CTensor phat = scaled_by(p, up);
  rep.add("L0", residual(spin_tractor_rescale(a, w, L0(a, p)), L0(b, phat)), 1e-9);
  rep.add("twistor", residual(scaled_by(twistor_T(a, p), up), twistor_T(b, phat)), 1e-9);
  const CJet h0 = spin_tractor_pairing(a, sec, sec), h1 = spin_tractor_pairing(b, shat, shat);
  rep.add("pairing", residual(h0, h1), 1e-12);
  return rep;
}

CheckReport spin_conformal_n4(const MetricSpec& g, const Expr& omega, const FieldSpec& u, const Point& x) {
  if (g.n != 4) throw std::invalid_argument("spin covariance is a dimension-4 statement");
  const int order = 6;
  const auto gj = g.jets(x, order);
  const Jet w = jet_eval(omega, x, order);
  const SpinGeometry a = spin_geometry(curvature_from_jets(4, gj, x));
  const SpinGeometry b = spin_geometry(curvature_from_jets(4, rescaled_metric(gj, w), x));
  const CTensor t = twistor_project(a, u.jets(x, order));
  const CTensor lhs = M_Sigma(b, scaled_by(t, complexify(exp(w * 0.5))));
  const CTensor rhs = scaled_by(M_Sigma(a, t), complexify(exp(w * -2.5)));
  CheckReport rep;
  rep.suite = "conformal-n4";
  rep.fixture = g.name;
  rep.add("M-Sigma", residual(lhs, rhs), 1e-8);
  rep.measured["M-Sigma"] = rhs.max_value();
  return rep;
}

CheckReport check_chirality(const SpinGeometry& sg, const CTensor& u) {
  if (sg.dim() != 4) throw std::invalid_argument("chirality bookkeeping is checked in dimension 4");
  const int d = sg.spinor_dim();
  auto proj = [&](const CTensor& v, int sign) {
    CMatrix P = CMatrix::identity(d) + cplx(sign) * sg.cl.chirality;
    P = cplx(0.5) * P;
    const auto m = jets_of(P);
    return fiber_apply(m.data(), v, d);
  };
  CheckReport rep;
  rep.suite = "chirality";
  for (int s : {1, -1}) {
    const CTensor t = twistor_project(sg, proj(u, s));
    const CTensor out = M_Sigma(sg, t);
    const CTensor wrong = proj(out, s);
    rep.add(s > 0 ? "plus-to-minus" : "minus-to-plus", wrong.max_value() / std::max(1.0, out.max_value()), 1e-10);
    rep.measured[s > 0 ? "image-plus" : "image-minus"] = out.max_value();
  }
  return rep;
}

BachCliffordSample bach_clifford_sample(const SpinGeometry& sg, const CTensor& phi) {
  const int n = sg.dim(), d = sg.spinor_dim();
  BachCliffordSample s;
  s.lhs = M_Sigma(sg, twistor_T(sg, phi));
  const CTensor bphi = clifford_up(sg, phi);
  s.rhs = CTensor(n, co(1), 0.0, d);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int f = 0; f < d; ++f) mac(s.rhs(a, f), bphi(b, f), sg.geo.bach(a, b));
  return s;
}

CheckReport check_bach_clifford(const std::vector<BachCliffordSample>& samples, double tol) {
  CheckReport rep;
  rep.suite = "bach-clifford";
  cplx num = 0.0;
  double den = 0.0, lmax = 0.0, rmax = 0.0;
  for (const auto& s : samples)
    for (std::size_t k = 0; k < s.lhs.size(); ++k) {
      const cplx l = s.lhs.flat_at(k).value(), r = s.rhs.flat_at(k).value();
      num += std::conj(r) * l;
      den += std::norm(r);
      lmax = std::max(lmax, std::abs(l));
      rmax = std::max(rmax, std::abs(r));
    }
  rep.measured["bach-action"] = rmax;
  rep.measured["lhs"] = lmax;
  if (rmax < 1e-9) {
    rep.add("vanishes", lmax, tol);
    return rep;
  }
  const cplx c = num / den;
  double fit = 0.0, spread = 0.0;
  for (const auto& s : samples) {
    cplx nk = 0.0;
    double dk = 0.0;
    for (std::size_t k = 0; k < s.lhs.size(); ++k) {
      const cplx l = s.lhs.flat_at(k).value(), r = s.rhs.flat_at(k).value();
      fit = std::max(fit, std::abs(l - c * r));
      nk += std::conj(r) * l;
      dk += std::norm(r);
    }
    if (dk > 1e-18) spread = std::max(spread, std::abs(nk / dk - c) / std::abs(c));
  }
  rep.add("fit", fit / std::max({1.0, lmax, rmax}), tol);
  rep.add("consistency", spread, 1e-6);
  rep.expect("nonzero-constant", std::abs(c) > 1e-6);
  rep.measured["c-real"] = c.real();
  rep.measured["c-imag"] = c.imag();
  return rep;
}

FieldSpec spinor_fixture(const std::string& name, const MetricSpec& g, const FixtureParams& params) {
  auto param = [&](const std::string& k, double f) {
    auto it = params.find(k);
    return it == params.end() ? f : it->second;
  };
  const int n = g.n;
  const int d = 1 << (n / 2);
  FieldSpec f;
  f.n = n;
  f.fiber = d;
  f.weight = 0.5;
  if (name == "const-spinor") {
    for (int k = 0; k < d; ++k) f.re.push_back(Expr::constant(1.0 / (k + 1)));
    for (int k = 0; k < d; ++k) f.im.push_back(Expr::constant(k % 2 ? 0.5 : 0.0));
  } else if (name == "linear-twistor") {
    for (std::size_t i = 0; i < g.g.size(); ++i)
      if (!g.g[i].is_constant()) throw std::invalid_argument("linear-twistor: needs a constant metric");
    const Point origin(static_cast<std::size_t>(n), 0.0);
    const SpinGeometry sg = spin_geometry(curvature_zoo(g, origin, 2));
    std::vector<cplx> psi0(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) psi0[static_cast<std::size_t>(k)] = cplx(1.0 / (k + 1), k % 2 ? 0.5 : 0.0);
    for (int k = 0; k < d; ++k) {
      Expr re = Expr::constant(0.0), im = Expr::constant(0.0);
      for (int a = 0; a < n; ++a) {
        cplx c = 0.0;
        for (int h = 0; h < d; ++h) c += sg.beta_low(a, k * d + h).value() * psi0[static_cast<std::size_t>(h)];
        if (c.real() != 0.0) re = re + Expr::constant(c.real()) * Expr::variable(a);
        if (c.imag() != 0.0) im = im + Expr::constant(c.imag()) * Expr::variable(a);
      }
      f.re.push_back(re);
      f.im.push_back(im);
    }
  } else if (name == "random-spinor") {
    Rng rng(static_cast<std::uint64_t>(param("seed", 1.0)));
    FieldSpec r = random_field(rng, n, {}, d, static_cast<int>(param("degree", 3.0)), param("amplitude", 1.0), true);
    r.weight = 0.5;
    return r;
  } else {
    throw std::invalid_argument("unknown spinor fixture: " + name);
  }
  return f;
}

}  // namespace detour
