#include "detour/yangmills.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace detour {

namespace {

bool is_zero(const CJet& j) { return j.is_constant() && j.value() == cplx(0.0); }

CTensor zero_like(const CTensor& t) { return CTensor(t.dim(), t.indices(), t.weight(), t.fiber()); }

std::vector<Variance> co(int r) { return std::vector<Variance>(static_cast<std::size_t>(r), Variance::Co); }

// exp(s X) for a k x k jet matrix by its power series.
std::vector<CJet> matrix_exp(const std::vector<CJet>& X, int k, cplx s) {
  const std::size_t K = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  std::vector<CJet> out(K), term(K), next(K);
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i * k + i)] = CJet(1.0);
  term = out;
  for (int m = 1; m < 40; ++m) {
    std::fill(next.begin(), next.end(), CJet(0.0));
    fiber_matmul(term.data(), X.data(), next.data(), k, s / static_cast<double>(m));
    double size = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      out[i] += next[i];
      size = std::max(size, next[i].max_abs());
    }
    term.swap(next);
    if (size < 1e-20) break;
  }
  return out;
}

std::vector<CJet> fiber_of(const CTensor& t, std::size_t base, std::size_t K) {
  return {t.data().begin() + static_cast<std::ptrdiff_t>(base), t.data().begin() + static_cast<std::ptrdiff_t>(base + K)};
}

// Gauge transform A -> u^{-1} A u + u^{-1} du.
FiberConnection gauge_transform(const FiberConnection& A, const std::vector<CJet>& u, const std::vector<CJet>& uinv) {
  const int k = A.k, n = A.dim();
  const std::size_t K = static_cast<std::size_t>(k * k);
  FiberConnection out{k, zero_like(A.A)};
  std::vector<CJet> tmp(K), du(K);
  for (int a = 0; a < n; ++a) {
    std::fill(tmp.begin(), tmp.end(), CJet(0.0));
    fiber_matmul(uinv.data(), &A.A(a, 0), tmp.data(), k);
    CJet* dst = &out.A(a, 0);
    fiber_matmul(tmp.data(), u.data(), dst, k);
    for (std::size_t i = 0; i < K; ++i) du[i] = u[i].partial(a);
    fiber_matmul(uinv.data(), du.data(), dst, k);
  }
  return out;
}

}  // namespace

void fiber_matmul(const CJet* a, const CJet* b, CJet* out, int k, cplx s) {
  for (int i = 0; i < k; ++i)
    for (int l = 0; l < k; ++l) {
      const CJet& x = a[i * k + l];
      if (is_zero(x)) continue;
      for (int j = 0; j < k; ++j) {
        const CJet& y = b[l * k + j];
        if (is_zero(y)) continue;
        mac(out[i * k + j], x, y, s);
      }
    }
}

FiberConnection FiberConnection::zero(int n, int k, int order) {
  FiberConnection c{k, CTensor(n, {Variance::Co}, 0.0, k * k)};
  for (auto& v : c.A.data()) v = CJet(n, order);
  return c;
}

FiberConnection FiberConnection::adjoint() const {
  const int n = dim();
  const int K = k * k;
  FiberConnection out{K, CTensor(n, {Variance::Co}, 0.0, K * K)};
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int l = 0; l < k; ++l)
          for (int m = 0; m < k; ++m) {
            CJet& dst = out(a, i * k + j, l * k + m);
            if (j == m) dst += (*this)(a, i, l);
            if (i == l) dst -= (*this)(a, m, j);
          }
  return out;
}

FiberConnection FiberConnection::dual() const {
  FiberConnection out{k, zero_like(A)};
  for (int a = 0; a < dim(); ++a)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) out(a, i, j) = -(*this)(a, j, i);
  return out;
}

FiberConnection FiberConnection::plus(const CTensor& dA, cplx s) const {
  if (dA.size() != A.size()) throw std::invalid_argument("connection: perturbation shape mismatch");
  FiberConnection out = *this;
  for (std::size_t i = 0; i < A.size(); ++i) out.A.flat_at(i) += dA.flat_at(i) * CJet(s);
  return out;
}

void ConnectionSpec::validate() const {
  const std::size_t N = static_cast<std::size_t>(n * k * k);
  if (n < 1 || k < 1) throw std::invalid_argument("connection: dimension and rank must be positive");
  if (re.size() != N) throw std::invalid_argument("connection: expected n*k*k real components");
  if (!im.empty() && im.size() != N) throw std::invalid_argument("connection: expected n*k*k imaginary components");
  if (compatible && hV.size() != static_cast<std::size_t>(k * k))
    throw std::invalid_argument("connection: compatibility requested without a k*k fiber form");
  for (const Expr& e : re)
    if (e.arity() > n) throw std::invalid_argument("connection: component uses a variable beyond the dimension");
  for (const Expr& e : im)
    if (e.arity() > n) throw std::invalid_argument("connection: component uses a variable beyond the dimension");
}

FiberConnection ConnectionSpec::jets(const Point& x, int order) const {
  validate();
  FieldSpec f;
  f.n = n;
  f.indices = {Variance::Co};
  f.fiber = k * k;
  f.re = re;
  f.im = im;
  return FiberConnection{k, f.jets(x, order)};
}

CTensor coupled_derivative(const CTensor& t, const Tensor& gamma, const FiberConnection& A) {
  if (t.fiber() != A.k) throw std::invalid_argument("coupled derivative: fiber size does not match the connection");
  CTensor out = covariant_derivative(t, gamma);
  const int n = t.dim(), k = A.k;
  const std::size_t block = t.size();
  const std::size_t comps = block / static_cast<std::size_t>(k);
  for (int a = 0; a < n; ++a) {
    const CJet* Aa = &A.A(a, 0);
    for (std::size_t c = 0; c < comps; ++c) {
      const std::size_t src = c * static_cast<std::size_t>(k);
      const std::size_t dst = static_cast<std::size_t>(a) * block + src;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          const CJet& x = Aa[i * k + j];
          if (is_zero(x)) continue;
          const CJet& y = t.flat_at(src + static_cast<std::size_t>(j));
          if (is_zero(y)) continue;
          mac(out.flat_at(dst + static_cast<std::size_t>(i)), x, y);
        }
    }
  }
  return out;
}

Twisted::Twisted(MetricAtPoint metric, Tensor gamma, FiberConnection conn)
    : metric_(std::move(metric)), gamma_(std::move(gamma)), conn_(std::move(conn)) {
  if (conn_.dim() != metric_.n) throw std::invalid_argument("twisted: connection dimension mismatch");
}

CTensor Twisted::D(const CTensor& t) const { return coupled_derivative(t, gamma_, conn_); }

CTensor Twisted::d(const CTensor& phi) const {
  const int n = dim(), r = phi.rank(), F = phi.fiber();
  for (int i = 0; i < r; ++i)
    if (phi.variance(i) != Variance::Co) throw std::invalid_argument("d: expects a form");
  const CTensor Dphi = D(phi);
  CTensor out(n, co(r + 1), phi.weight(), F);
  std::vector<int> src(static_cast<std::size_t>(r + 1));
  for_each_index(n, r + 1, [&](std::vector<int>& I) {
    for (int j = 0; j <= r; ++j) {
      src[0] = I[static_cast<std::size_t>(j)];
      int p = 1;
      for (int m = 0; m <= r; ++m)
        if (m != j) src[static_cast<std::size_t>(p++)] = I[static_cast<std::size_t>(m)];
      const std::size_t so = Dphi.offset(src), dof = out.offset(I);
      const cplx sign = (j % 2 == 0) ? 1.0 : -1.0;
      for (int f = 0; f < F; ++f)
        out.flat_at(dof + static_cast<std::size_t>(f)) += Dphi.flat_at(so + static_cast<std::size_t>(f)) * CJet(sign);
    }
  });
  return out;
}

CTensor Twisted::delta(const CTensor& psi) const {
  const int n = dim(), r = psi.rank(), F = psi.fiber();
  if (r < 1) throw std::invalid_argument("delta: expects a form of positive degree");
  const CTensor Dpsi = D(psi);  // (c, b, rest)
  CTensor out(n, co(r - 1), psi.weight() - 2.0, F);
  const std::size_t rest = out.size();
  const std::size_t inner = static_cast<std::size_t>(n) * rest;
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      const Jet& gi = metric_.ginv(b, c);
      if (gi.is_constant() && gi.value() == 0.0) continue;
      const std::size_t base = static_cast<std::size_t>(c) * inner + static_cast<std::size_t>(b) * rest;
      for (std::size_t k = 0; k < rest; ++k) mac(out.flat_at(k), Dpsi.flat_at(base + k), gi, -1.0);
    }
  return out;
}

CTensor Twisted::F() const {
  const int n = dim(), k = rank();
  CTensor out(n, co(2), 0.0, k * k);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      CJet* dst = &out(a, b, 0);
      for (int f = 0; f < k * k; ++f) dst[f] = conn_.A(b, f).partial(a) - conn_.A(a, f).partial(b);
      fiber_matmul(&conn_.A(a, 0), &conn_.A(b, 0), dst, k);
      fiber_matmul(&conn_.A(b, 0), &conn_.A(a, 0), dst, k, -1.0);
    }
  return out;
}

CTensor Twisted::act(const CTensor& e, const CTensor& t) const {
  const int k = rank();
  if (e.fiber() != k * k || t.fiber() != k) throw std::invalid_argument("act: fiber sizes do not match");
  std::vector<Variance> idx = e.indices();
  idx.insert(idx.end(), t.indices().begin(), t.indices().end());
  CTensor out(dim(), idx, e.weight() + t.weight(), k);
  const std::size_t ne = e.size() / static_cast<std::size_t>(k * k);
  const std::size_t nt = t.size() / static_cast<std::size_t>(k);
  for (std::size_t I = 0; I < ne; ++I)
    for (std::size_t J = 0; J < nt; ++J) {
      const CJet* M = &e.flat_at(I * static_cast<std::size_t>(k * k));
      const CJet* v = &t.flat_at(J * static_cast<std::size_t>(k));
      CJet* dst = &out.flat_at((I * nt + J) * static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          if (!is_zero(M[i * k + j]) && !is_zero(v[j])) mac(dst[i], M[i * k + j], v[j]);
    }
  return out;
}

CTensor Twisted::intr(const CTensor& alpha, const CTensor& psi) const {
  const int n = dim();
  if (alpha.rank() != 1 || psi.rank() < 1) throw std::invalid_argument("intr: expects a 1-form and a form");
  const CTensor full = act(alpha, psi);  // (a, b, rest)
  std::vector<Variance> rest_idx(psi.indices().begin() + 1, psi.indices().end());
  CTensor out(n, rest_idx, full.weight() - 2.0, psi.fiber());
  const std::size_t rest = out.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet& gi = metric_.ginv(a, b);
      if (gi.is_constant() && gi.value() == 0.0) continue;
      const std::size_t base = (static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)) * rest;
      for (std::size_t k = 0; k < rest; ++k) mac(out.flat_at(k), full.flat_at(base + k), gi);
    }
  return out;
}

CTensor Twisted::F_dot(const CTensor& phi) const {
  const int n = dim();
  if (phi.rank() != 1) throw std::invalid_argument("F_dot: expects a 1-form");
  const CTensor Fp = act(F(), phi);  // (b, c, a)
  CTensor out(n, co(1), phi.weight() - 2.0, phi.fiber());
  const int k = phi.fiber();
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        const Jet& gi = metric_.ginv(a, c);
        if (gi.is_constant() && gi.value() == 0.0) continue;
        for (int f = 0; f < k; ++f) mac(out(b, f), Fp(b, c, a, f), gi);
      }
  return out;
}

CTensor Twisted::M(const CTensor& phi) const {
  CTensor out = delta(d(phi));
  out -= F_dot(phi);
  return out;
}

CTensor Twisted::M_expanded(const CTensor& phi) const {
  const int n = dim(), k = phi.fiber();
  if (phi.rank() != 1) throw std::invalid_argument("M: expects a 1-form");
  const CTensor DD = D(D(phi));  // (c, a, b) = D_c D_a phi_b
  CTensor out = F_dot(phi);
  out *= cplx(-1.0);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        const Jet& gi = metric_.ginv(a, c);
        if (gi.is_constant() && gi.value() == 0.0) continue;
        for (int f = 0; f < k; ++f) {
          mac(out(b, f), DD(c, a, b, f), gi, -1.0);
          mac(out(b, f), DD(c, b, a, f), gi, 1.0);
        }
      }
  return out;
}

CTensor Twisted::current() const { return adjoint().delta(F()); }

CTensor hodge_star(const CTensor& psi, const MetricAtPoint& m) {
  const int n = m.n, k = psi.rank(), F = psi.fiber();
  if (psi.dim() != n) throw std::invalid_argument("hodge_star: dimension mismatch");
  CTensor up = psi;
  for (int i = 0; i < k; ++i)
    if (up.variance(i) == Variance::Co) up = raise_lower(up, i, m);
  const Jet det = m.det.value() < 0.0 ? -m.det : m.det;
  const Jet vol = sqrt(det);
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  CTensor out(n, co(n - k), psi.weight(), F);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)]) ++inversions;
    const double sign = (inversions % 2 == 0 ? 1.0 : -1.0) / kfact;
    const std::span<const int> a(perm.data(), static_cast<std::size_t>(k));
    const std::span<const int> b(perm.data() + k, static_cast<std::size_t>(n - k));
    const std::size_t so = up.offset(a), dof = out.offset(b);
    for (int f = 0; f < F; ++f) mac(out.flat_at(dof + static_cast<std::size_t>(f)), up.flat_at(so + static_cast<std::size_t>(f)), vol, sign);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

CTensor sd_project(const CTensor& psi, const MetricAtPoint& m, int sign) {
  if (m.n != 4 || psi.rank() != 2) throw std::invalid_argument("sd_project: needs a 2-form in dimension 4");
  CTensor s = hodge_star(psi, m);
  const cplx c = (m.q % 2 == 0) ? cplx(0.5 * sign) : cplx(0.0, -0.5 * sign);
  CTensor out = psi;
  out *= cplx(0.5);
  s *= c;
  out += s;
  return out;
}

CheckReport check_algact(const Twisted& tw, const CTensor& Phi, const CTensor& psi) {
  CheckReport rep;
  rep.suite = "algact";
  const CTensor J = tw.current();
  rep.measured["current"] = J.max_value();
  rep.add("M-d", residual(tw.M(tw.d(Phi)), tw.ext(J, Phi)), 1e-8);
  CTensor rhs = tw.intr(J, psi);
  rhs *= cplx(-1.0);
  rep.add("delta-M", residual(tw.delta(tw.M(psi)), rhs), 1e-8);
  rep.add("M-expanded", residual(tw.M(psi), tw.M_expanded(psi)), 1e-10);
  return rep;
}

CheckReport detour_compositions(const Twisted& tw, const CTensor& Phi, const CTensor& psi) {
  CheckReport rep;
  rep.suite = "detour-complex";
  const CTensor J = tw.current();
  rep.measured["current"] = J.max_value();
  const CTensor Md = tw.M(tw.d(Phi));
  const CTensor dM = tw.delta(tw.M(psi));
  const CTensor dMd = tw.delta(Md);
  rep.add("M-d", residual(Md, zero_like(Md)), 1e-8);
  rep.add("delta-M", residual(dM, zero_like(dM)), 1e-8);
  rep.add("delta-M-d", residual(dMd, zero_like(dMd)), 1e-8);
  return rep;
}

CheckReport check_half_flat(const Twisted& tw, const CTensor& Phi, const CTensor& phi, int flat_half) {
  CheckReport rep;
  rep.suite = "prop-agree";
  const auto& m = tw.metric();
  const CTensor ddPhi = tw.d(tw.d(Phi));
  const CTensor plus = sd_project(ddPhi, m, 1), minus = sd_project(ddPhi, m, -1);
  rep.measured["dd-plus"] = plus.max_value();
  rep.measured["dd-minus"] = minus.max_value();
  if (flat_half == 0) {
    rep.expect("subcx-plus-fails", plus.max_value() > 1e-6);
    rep.expect("subcx-minus-fails", minus.max_value() > 1e-6);
    return rep;
  }
  const CTensor& flat = flat_half > 0 ? plus : minus;
  rep.add("subcx", residual(flat, zero_like(flat)), 1e-8);
  CTensor half = tw.delta(sd_project(tw.d(phi), m, flat_half));
  half *= cplx(2.0);
  rep.add("agree", residual(half, tw.M(phi)), 1e-8);
  return rep;
}

CheckReport variational_checks(const ConnectionSpec& c, const FieldSpec& Adot, const FieldSpec& udot,
                               const MetricSpec& g, const Point& x, double step) {
  g.validate();
  const int order = 4;
  const MetricAtPoint m = MetricAtPoint::from_components(g.n, g.jets(x, order));
  const Tensor gamma = christoffel(m);
  const FiberConnection A = c.jets(x, order);
  const CTensor Ad = Adot.jets(x, order);
  const CTensor ud = udot.jets(x, order);
  const Twisted tw(m, gamma, A);
  const Twisted ad = tw.adjoint();
  CheckReport rep;
  rep.suite = "currentder";
  rep.fixture = c.name;

  CTensor fd = Twisted(m, gamma, A.plus(Ad, step)).current();
  fd -= Twisted(m, gamma, A.plus(Ad, -step)).current();
  fd *= cplx(0.5 / step);
  rep.add("currentder", residual(fd, ad.M(Ad)), 1e-6);

  const int k = A.k;
  const std::size_t K = static_cast<std::size_t>(k * k);
  const std::vector<CJet> U = fiber_of(ud, 0, K);
  auto gauged = [&](double s) {
    return gauge_transform(A, matrix_exp(U, k, s), matrix_exp(U, k, -s));
  };
  const FiberConnection Ap = gauged(step), Am = gauged(-step);
  CTensor dA = Ap.A;
  dA -= Am.A;
  dA *= cplx(0.5 / step);
  rep.add("gaugeder", residual(dA, ad.d(ud)), 1e-6);

  CTensor dJ = Twisted(m, gamma, Ap).current();
  dJ -= Twisted(m, gamma, Am).current();
  dJ *= cplx(0.5 / step);
  const CTensor Mdu = ad.M(ad.d(ud));
  rep.add("gauge-current", residual(dJ, Mdu), 1e-6);

  // [delta F, u] by direct matrix products.
  const CTensor J = tw.current();
  CTensor comm(m.n, co(1), 0.0, static_cast<int>(K));
  for (int b = 0; b < m.n; ++b) {
    fiber_matmul(&J(b, 0), U.data(), &comm(b, 0), k);
    fiber_matmul(U.data(), &J(b, 0), &comm(b, 0), k, -1.0);
  }
  rep.add("end-algact", residual(Mdu, comm), 1e-8);
  return rep;
}

CheckReport md_conformal_check(const ConnectionSpec& c, const MetricSpec& g, const Expr& omega,
                               const FieldSpec& phi, const Point& x) {
  g.validate();
  if (g.n != 4) throw std::invalid_argument("M covariance is a dimension-4 statement");
  const int order = 3;
  const auto gj = g.jets(x, order);
  const Jet w = jet_eval(omega, x, order);
  const MetricAtPoint m = MetricAtPoint::from_components(g.n, gj);
  const MetricAtPoint mh = MetricAtPoint::from_components(g.n, rescaled_metric(gj, w));
  const FiberConnection A = c.jets(x, order);
  const CTensor p = phi.jets(x, order);
  CTensor lhs = Twisted(mh, christoffel(mh), A).M(p);
  CTensor rhs = Twisted(m, christoffel(m), A).M(p);
  const CJet f = complexify(exp(w * Jet(-2.0)));
  for (auto& v : rhs.data()) v = v * f;
  CheckReport rep;
  rep.suite = "conformal-n4";
  rep.fixture = c.name;
  rep.add("M-D", residual(lhs, rhs), 1e-8);
  return rep;
}

namespace {

// Pointwise g^{..} h(a, b) for forms of degree 0 or 1; h = identity when null.
std::complex<double> pair_forms(const CTensor& a, const CTensor& b, const MetricAtPoint& m, bool conj_a,
                                const std::vector<cplx>* h = nullptr) {
  const int n = m.n;
  const int F = a.fiber();
  auto fib = [&](const CJet* x, const CJet* y) {
    std::complex<double> s = 0.0;
    for (int f = 0; f < F; ++f) {
      const cplx xf = conj_a ? std::conj(x[f].value()) : x[f].value();
      if (!h) {
        s += xf * y[f].value();
        continue;
      }
      for (int e = 0; e < F; ++e) s += xf * (*h)[static_cast<std::size_t>(f * F + e)] * y[e].value();
    }
    return s;
  };
  if (a.rank() == 0) return fib(&a.flat_at(0), &b.flat_at(0));
  std::complex<double> s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double gi = m.ginv(i, j).value();
      if (gi != 0.0) s += gi * fib(&a(i, 0), &b(j, 0));
    }
  return s;
}

}  // namespace

CheckReport quadrature_adjointness(const ConnectionSpec& c, const MetricSpec& g, const FieldSpec& phi0,
                                   const FieldSpec& phi1, const FieldSpec& psi1, const QuadratureGrid& grid) {
  g.validate();
  const int n = g.n;
  if (static_cast<int>(grid.box.size()) != n) throw std::invalid_argument("quadrature: box dimension mismatch");
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(grid.cells);
  double cell = 1.0;
  for (const auto& [lo, hi] : grid.box) cell *= (hi - lo) / grid.cells;
  // phi0 is paired with d through the dual bundle, so the pairing is bilinear.
  std::complex<double> d_lhs = 0.0, d_rhs = 0.0, m_lhs = 0.0, m_rhs = 0.0;
  Point x(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = 0; i < n; ++i) {
      const auto [lo, hi] = grid.box[static_cast<std::size_t>(i)];
      const std::size_t ci = r % static_cast<std::size_t>(grid.cells);
      r /= static_cast<std::size_t>(grid.cells);
      x[static_cast<std::size_t>(i)] = lo + (static_cast<double>(ci) + 0.5) * (hi - lo) / grid.cells;
    }
    const MetricAtPoint m = MetricAtPoint::from_components(n, g.jets(x, 3));
    const Tensor gamma = christoffel(m);
    const FiberConnection A = c.jets(x, 2);
    const Twisted tw(m, gamma, A);
    const Twisted twd(m, gamma, A.dual());
    const double vol = std::sqrt(std::abs(m.det.value())) * cell;
    const CTensor f0 = phi0.jets(x, 2), f1 = phi1.jets(x, 2), p1 = psi1.jets(x, 2);
    d_lhs += vol * pair_forms(twd.d(f0), p1, m, false);
    d_rhs += vol * pair_forms(f0, tw.delta(p1), m, false);
    if (c.compatible) {
      m_lhs += vol * pair_forms(tw.M(f1), p1, m, true, &c.hV);
      m_rhs += vol * pair_forms(f1, tw.M(p1), m, true, &c.hV);
    }
  }
  CheckReport rep;
  rep.suite = "adjoint";
  rep.fixture = c.name;
  auto rel = [](std::complex<double> a, std::complex<double> b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
  };
  rep.measured["d-pairing"] = std::abs(d_lhs);
  rep.add("d-delta", rel(d_lhs, d_rhs), 1e-3);
  if (c.compatible) {
    rep.measured["M-pairing"] = std::abs(m_lhs);
    rep.add("M-symmetric", rel(m_lhs, m_rhs), 1e-3);
  }
  return rep;
}

}  // namespace detour
