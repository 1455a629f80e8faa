#include "detour/tractor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace detour {

namespace {

std::vector<Variance> co(int r) { return std::vector<Variance>(static_cast<std::size_t>(r), Variance::Co); }

CTensor zero_like(const CTensor& t) { return CTensor(t.dim(), t.indices(), t.weight(), t.fiber()); }

bool zero_jet(const Jet& j) { return j.is_constant() && j.value() == 0.0; }

// Covariant 1-form from the derivative of a scalar.
CTensor gradient(const CJet& f, int n) {
  CTensor out(n, co(1));
  for (int a = 0; a < n; ++a) out(a) = f.partial(a);
  return out;
}

// g^{ab} t_{..a..b..} over two positions of a fiber-1 complex tensor.
CTensor trace(const CTensor& t, int i, int j, const MetricAtPoint& m) { return contract(t, i, j, m); }

void check_tfs(const CTensor& h, const MetricAtPoint& m, const char* what) {
  if (h.rank() != 2) throw std::invalid_argument(std::string(what) + ": expects a 2-tensor");
  const CTensor p = tfs(h, m);
  if (residual(p, h) > 1e-10) throw std::invalid_argument(std::string(what) + ": input is not trace-free symmetric");
}

}  // namespace

TractorGeometry::TractorGeometry(GeometryPoint g) : geo(std::move(g)), conn(tractor_connection_matrix(geo)) {}

TractorGeometry tractor_geometry(const MetricSpec& g, const Point& x, int order) {
  return TractorGeometry(curvature_zoo(g, x, order));
}

FiberConnection tractor_connection_matrix(const GeometryPoint& geo) {
  const int n = geo.dim(), N = n + 2;
  FiberConnection c{N, CTensor(n, co(1), 0.0, N * N)};
  const auto& g = geo.metric.g;
  const auto& gi = geo.metric.ginv;
  const auto& P = geo.schouten;
  for (int a = 0; a < n; ++a) {
    c(a, 0, 1 + a) = CJet(-1.0);
    for (int b = 0; b < n; ++b) {
      c(a, 1 + b, 0) = complexify(P(a, b));
      c(a, 1 + b, n + 1) = complexify(g(a, b));
      for (int e = 0; e < n; ++e) c(a, 1 + b, 1 + e) = complexify(-geo.christoffel(e, a, b));
    }
    for (int e = 0; e < n; ++e) {
      Jet v(0.0);
      for (int b = 0; b < n; ++b) mac(v, P(a, b), gi(b, e), -1.0);
      c(a, n + 1, 1 + e) = complexify(v);
    }
  }
  return c;
}

CTensor tractor_connection_slots(const GeometryPoint& geo, const CTensor& s) {
  const int n = geo.dim();
  if (s.rank() != 0 || s.fiber() != n + 2) throw std::invalid_argument("tractor: expects a section");
  CTensor mu(n, co(1));
  for (int b = 0; b < n; ++b) mu(b) = s(1 + b);
  const CTensor Dmu = covariant_derivative(mu, geo.christoffel);
  const CJet& sigma = s(0);
  const CJet& rho = s(n + 1);
  CTensor out(n, co(1), 0.0, n + 2);
  for (int a = 0; a < n; ++a) {
    out(a, 0) = sigma.partial(a) - mu(a);
    for (int b = 0; b < n; ++b) {
      CJet v = Dmu(a, b);
      mac(v, rho, geo.metric.g(a, b));
      mac(v, sigma, geo.schouten(a, b));
      out(a, 1 + b) = std::move(v);
    }
    CJet r = rho.partial(a);
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const Jet t = geo.schouten(a, b) * geo.metric.ginv(b, c);
        mac(r, mu(c), t, -1.0);
      }
    out(a, n + 1) = std::move(r);
  }
  return out;
}

CTensor tractor_metric(const GeometryPoint& geo) {
  const int n = geo.dim(), N = n + 2;
  CTensor h(n, {}, 0.0, N * N);
  h(0 * N + n + 1) = CJet(1.0);
  h((n + 1) * N + 0) = CJet(1.0);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) h((1 + b) * N + 1 + c) = complexify(geo.metric.ginv(b, c));
  return h;
}

CTensor hessian(const GeometryPoint& geo, const CJet& f) {
  return covariant_derivative(gradient(f, geo.dim()), geo.christoffel);
}

CJet laplacian(const GeometryPoint& geo, const CJet& f) { return trace(hessian(geo, f), 0, 1, geo.metric)(); }

CTensor splitting_D(const GeometryPoint& geo, const CJet& sigma) {
  const int n = geo.dim();
  CTensor s(n, {}, 1.0, n + 2);
  s(0) = sigma;
  for (int b = 0; b < n; ++b) s(1 + b) = sigma.partial(b);
  CJet r = laplacian(geo, sigma);
  mac(r, sigma, geo.J);
  s(n + 1) = r * (-1.0 / n);
  return s;
}

CJet project_X(const CTensor& s) { return s(0); }

CJet adjoint_Dstar(const GeometryPoint& geo, const CTensor& s) {
  const int n = geo.dim();
  CTensor mu(n, co(1));
  for (int b = 0; b < n; ++b) mu(b) = s(1 + b);
  const CJet div = trace(covariant_derivative(mu, geo.christoffel), 0, 1, geo.metric)();
  CJet lap = laplacian(geo, s(0));
  mac(lap, s(0), geo.J);
  return s(n + 1) - div - lap * (1.0 / n);
}

CTensor splitting_E(const GeometryPoint& geo, const CTensor& psi) {
  const int n = geo.dim();
  check_tfs(psi, geo.metric, "splitting_E");
  const CTensor Dpsi = covariant_derivative(psi, geo.christoffel);  // (c, a, b)
  CTensor out(n, co(1), 1.0, n + 2);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) out(a, 1 + b) = psi(a, b);
    CJet r(0.0);
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (!zero_jet(geo.metric.ginv(b, c))) mac(r, Dpsi(c, a, b), geo.metric.ginv(b, c));
    out(a, n + 1) = r * (-1.0 / (n - 1));
  }
  return out;
}

CTensor adjoint_Estar(const GeometryPoint& geo, const CTensor& Phi) {
  const int n = geo.dim();
  if (Phi.rank() != 1 || Phi.fiber() != n + 2) throw std::invalid_argument("adjoint_Estar: expects a tractor 1-form");
  CTensor nu(n, co(2)), alpha(n, co(1));
  for (int a = 0; a < n; ++a) {
    alpha(a) = Phi(a, 0);
    for (int b = 0; b < n; ++b) nu(a, b) = Phi(a, 1 + b);
  }
  CTensor out = tfs(nu, geo.metric);
  CTensor da = tfs(covariant_derivative(alpha, geo.christoffel), geo.metric);
  da *= cplx(1.0 / (n - 1));
  out += da;
  out.set_weight(-1.0);
  return out;
}

CTensor P_op(const GeometryPoint& geo, const CJet& sigma) {
  const int n = geo.dim();
  CTensor t = hessian(geo, sigma);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) mac(t(a, b), sigma, geo.schouten(a, b));
  CTensor out = tfs(t, geo.metric);
  out.set_weight(1.0);
  return out;
}

CJet adjoint_Pstar(const GeometryPoint& geo, const CTensor& phi) {
  const int n = geo.dim();
  const CTensor dd = covariant_derivative(covariant_derivative(phi, geo.christoffel), geo.christoffel);  // (c,d,a,b)
  const auto& gi = geo.metric.ginv;
  CJet out(0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        if (zero_jet(gi(a, c))) continue;
        for (int d = 0; d < n; ++d) {
          if (zero_jet(gi(b, d))) continue;
          const Jet w = gi(a, c) * gi(b, d);
          mac(out, dd(c, d, a, b), w);
          mac(out, phi(a, b), w * geo.schouten(c, d));
        }
      }
  return out;
}

CTensor M_T(const GeometryPoint& geo, const CTensor& h) {
  const int n = geo.dim();
  check_tfs(h, geo.metric, "M_T");
  const auto& gi = geo.metric.ginv;
  const CTensor dd = covariant_derivative(covariant_derivative(h, geo.christoffel), geo.christoffel);  // (e,c,a,b)
  CTensor hup(n, {Variance::Contra, Variance::Contra});
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d)
      for (int e = 0; e < n; ++e)
        for (int f = 0; f < n; ++f)
          if (!zero_jet(gi(c, e)) && !zero_jet(gi(d, f))) mac(hup(c, d), h(e, f), gi(c, e) * gi(d, f));
  CTensor t(n, co(2));
  const double k = 1.0 / (n - 1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CJet& v = t(a, b);
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          if (zero_jet(gi(c, e))) continue;
          mac(v, dd(e, c, a, b) - dd(e, a, c, b), gi(c, e));
          mac(v, dd(a, e, b, c), gi(c, e), -k);
        }
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) mac(v, hup(c, d), geo.weyl(a, c, b, d));
    }
  CTensor out = tfs(t, geo.metric);
  out *= cplx(-1.0);
  out.set_weight(-1.0);
  return out;
}

CTensor Q_op(const GeometryPoint& geo, const CTensor& nu) {
  const int n = geo.dim();
  const auto& gi = geo.metric.ginv;
  const auto& g = geo.metric.g;
  const CTensor Dnu = covariant_derivative(nu, geo.christoffel);  // (c, a, b)
  CTensor tau(n, co(1));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d)
        if (!zero_jet(gi(b, d))) mac(tau(a), Dnu(d, a, b), gi(b, d), -1.0 / (n - 1));
  CTensor out(n, co(3));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        CJet v = Dnu(a, b, c) - Dnu(b, a, c);
        mac(v, tau(b), g(c, a));
        mac(v, tau(a), g(c, b), -1.0);
        out(a, b, c) = std::move(v);
      }
  return out;
}

CTensor Q_adjoint(const GeometryPoint& geo, const CTensor& w) {
  const int n = geo.dim();
  const auto& gi = geo.metric.ginv;
  const CTensor Dw = covariant_derivative(w, geo.christoffel);  // (d, a, b, c)
  CTensor t(n, co(1));
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        if (!zero_jet(gi(a, c))) mac(t(b), w(a, b, c), gi(a, c));
  const CTensor Dt = covariant_derivative(t, geo.christoffel);  // (c, b) = nabla_c t_b
  CTensor out(n, co(2));
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      CJet v = Dt(c, b) * (1.0 / (n - 1));
      for (int a = 0; a < n; ++a)
        for (int d = 0; d < n; ++d)
          if (!zero_jet(gi(a, d))) mac(v, Dw(d, a, b, c), gi(a, d), -1.0);
      out(b, c) = std::move(v);
    }
  return tfs(out, geo.metric);
}

CTensor tractor_curvature_blocks(const GeometryPoint& geo) {
  const int n = geo.dim(), N = n + 2;
  const auto& gi = geo.metric.ginv;
  CTensor out(n, co(2), 0.0, N * N);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        out(a, b, (1 + c) * N) = complexify(geo.cotton(c, a, b));
        for (int e = 0; e < n; ++e) {
          Jet mid(0.0);
          for (int d = 0; d < n; ++d) {
            if (zero_jet(gi(d, e))) continue;
            mac(mid, geo.weyl(a, b, c, d), gi(d, e));
          }
          out(a, b, (1 + c) * N + 1 + e) = complexify(mid);
        }
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int e = 0; e < n; ++e) {
        Jet bot(0.0);
        for (int d = 0; d < n; ++d)
          if (!zero_jet(gi(d, e))) mac(bot, geo.cotton(d, a, b), gi(d, e), -1.0);
        out(a, b, (n + 1) * N + 1 + e) = complexify(bot);
      }
  return out;
}

CTensor div_tractor_curvature_blocks(const GeometryPoint& geo) {
  const int n = geo.dim(), N = n + 2;
  const auto& gi = geo.metric.ginv;
  CTensor out(n, co(1), 0.0, N * N);
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) {
      out(b, (1 + c) * N) = complexify(geo.bach(c, b));
      for (int e = 0; e < n; ++e) {
        Jet mid(0.0);
        for (int d = 0; d < n; ++d)
          if (!zero_jet(gi(d, e))) mac(mid, geo.cotton(b, c, d), gi(d, e), static_cast<double>(n - 4));
        out(b, (1 + c) * N + 1 + e) = complexify(mid);
      }
    }
    for (int e = 0; e < n; ++e) {
      Jet bot(0.0);
      for (int d = 0; d < n; ++d)
        if (!zero_jet(gi(d, e))) mac(bot, geo.bach(d, b), gi(d, e), -1.0);
      out(b, (n + 1) * N + 1 + e) = complexify(bot);
    }
  }
  return out;
}

CheckReport check_eincomm(const TractorGeometry& tg, const CJet& sigma) {
  const GeometryPoint& geo = tg.geo;
  const int n = geo.dim();
  const Twisted tw = tg.twisted();
  const CTensor lhs = tw.D(splitting_D(geo, sigma));
  const CTensor Psig = P_op(geo, sigma);
  const CTensor rhs = splitting_E(geo, Psig);
  CheckReport rep;
  rep.suite = "eincomm";
  rep.add("nabla-D-vs-E-P", residual(lhs, rhs), 1e-9);
  // Bottom slot from the explicit third-slot formula.
  CJet lap = laplacian(geo, sigma);
  mac(lap, sigma, geo.J);
  CTensor third(n, co(1)), got(n, co(1));
  for (int a = 0; a < n; ++a) {
    CJet v = lap.partial(a) * (-1.0 / n);
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d)
        if (!zero_jet(geo.metric.ginv(c, d))) mac(v, sigma.partial(d), geo.schouten(a, c) * geo.metric.ginv(c, d), -1.0);
    third(a) = std::move(v);
    got(a) = lhs(a, n + 1);
  }
  rep.add("third-slot", residual(got, third), 1e-9);
  rep.add("slot-formula", residual(lhs, tractor_connection_slots(geo, splitting_D(geo, sigma))), 1e-10);
  rep.measured["P-sigma"] = Psig.max_value();
  return rep;
}

CheckReport check_tractor_curvature(const TractorGeometry& tg) {
  const GeometryPoint& geo = tg.geo;
  const Twisted tw = tg.twisted();
  CheckReport rep;
  rep.suite = "divtr";
  rep.add("omega-blocks", residual(tw.F(), tractor_curvature_blocks(geo)), 1e-9);
  if (geo.order >= 4) {
    CTensor div = tw.current();  // -nabla^a Omega_ab
    div *= cplx(-1.0);
    const CTensor blocks = div_tractor_curvature_blocks(geo);
    rep.add("divergence-blocks", residual(div, blocks), 1e-8);
    rep.measured["divergence"] = div.max_value();
  }
  return rep;
}

CheckReport check_MT_composition(const TractorGeometry& tg, const CTensor& h) {
  const GeometryPoint& geo = tg.geo;
  const Twisted tw = tg.twisted();
  CheckReport rep;
  rep.suite = "MT";
  rep.add("display-vs-composition", residual(M_T(geo, h), adjoint_Estar(geo, tw.M(splitting_E(geo, h)))), 1e-8);
  return rep;
}

namespace {

// -TFS(B sigma + s (n-4) A_abc nabla^c sigma).
CTensor mp_rhs(const GeometryPoint& geo, const CJet& sigma, double s) {
  const int n = geo.dim();
  CTensor t(n, co(2));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CJet v = sigma * complexify(geo.bach(a, b));
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          if (!zero_jet(geo.metric.ginv(c, d)))
            mac(v, sigma.partial(d), geo.cotton(a, b, c) * geo.metric.ginv(c, d), s * (n - 4));
      t(a, b) = std::move(v);
    }
  CTensor out = tfs(t, geo.metric);
  out *= cplx(-1.0);
  return out;
}

}  // namespace

CheckReport check_MP(const TractorGeometry& tg, const CJet& sigma) {
  const GeometryPoint& geo = tg.geo;
  const int n = geo.dim(), N = n + 2;
  const CTensor lhs = M_T(geo, P_op(geo, sigma));
  CheckReport rep;
  rep.suite = "MP";
  // The (n-4) term enters with the sign fixed by the divergence blocks:
  // M applied to nabla I is -(nabla^a Omega_ab) I, so E* of that with I = D sigma.
  rep.add("MP", residual(lhs, mp_rhs(geo, sigma, 1.0)), 1e-7);
  if (geo.order >= 4) {
    const CTensor div = div_tractor_curvature_blocks(geo);
    const CTensor I = splitting_D(geo, sigma);
    CTensor Phi(n, co(1), 0.0, N);
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) mac(Phi(b, i), div(b, i * N + j), I(j), -1.0);
    rep.add("MP-via-divergence", residual(lhs, adjoint_Estar(geo, Phi)), 1e-7);
  }
  rep.measured["MP"] = lhs.max_value();
  rep.measured["bach"] = geo.bach.max_value();
  if (n != 4) rep.measured["opposite-sign-residual"] = residual(lhs, mp_rhs(geo, sigma, -1.0));
  return rep;
}

CheckReport check_trmetric_parallel(const TractorGeometry& tg, const CTensor& s, const CTensor& t) {
  const GeometryPoint& geo = tg.geo;
  const int n = geo.dim(), N = n + 2;
  const CTensor H = tractor_metric(geo);
  const Twisted tw = tg.twisted();
  const CTensor Ds = tw.D(s), Dt = tw.D(t);
  auto pair = [&](const CJet* x, const CJet* y) {
    CJet v(0.0);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const CJet& h = H(i * N + j);
        if (h.is_constant() && h.value() == cplx(0.0)) continue;
        v += x[i] * h * y[j];
      }
    return v;
  };
  const CJet hst = pair(&s(0), &t(0));
  CTensor lhs(n, co(1)), rhs(n, co(1));
  for (int a = 0; a < n; ++a) {
    lhs(a) = hst.partial(a);
    rhs(a) = pair(&Ds(a, 0), &t(0)) + pair(&s(0), &Dt(a, 0));
  }
  CheckReport rep;
  rep.suite = "trmetric";
  rep.add("parallel", residual(lhs, rhs), 1e-9);
  std::vector<double> hv(static_cast<std::size_t>(N * N));
  for (int i = 0; i < N * N; ++i) hv[static_cast<std::size_t>(i)] = H(i).value().real();
  const auto sig = signature_of(hv, N);
  rep.expect("signature", sig[0] == geo.metric.p + 1 && sig[1] == geo.metric.q + 1);
  rep.measured["signature-p"] = sig[0];
  rep.measured["signature-q"] = sig[1];
  return rep;
}

CheckReport check_adjoint_square(const TractorGeometry& tg, const CTensor& Phi) {
  const GeometryPoint& geo = tg.geo;
  const Twisted tw = tg.twisted();
  const CJet lhs = adjoint_Dstar(geo, tw.delta(Phi));
  const CJet rhs = adjoint_Pstar(geo, adjoint_Estar(geo, Phi));
  CheckReport rep;
  rep.suite = "adjoint-square";
  rep.add("Dstar-delta-vs-Pstar-Estar", residual(lhs, rhs), 1e-8);
  return rep;
}

CheckReport check_QQ_leading(const TractorGeometry& tg, const CTensor& h, const CTensor& dh) {
  const GeometryPoint& geo = tg.geo;
  auto lot = [&](const CTensor& x) {
    CTensor d = M_T(geo, x);
    d -= Q_adjoint(geo, Q_op(geo, x));
    return d;
  };
  CTensor h2 = h;
  h2 += dh;
  CheckReport rep;
  rep.suite = "MT-leading";
  rep.add("second-order-cancels", residual(lot(h), lot(h2)), 1e-9);
  return rep;
}

CTensor tractor_rescale(const GeometryPoint& geo, const Jet& omega, const CTensor& s) {
  const int n = geo.dim(), N = n + 2;
  if (s.fiber() != N) throw std::invalid_argument("tractor_rescale: expects tractor values");
  const CJet ew = complexify(exp(omega)), emw = complexify(exp(-omega));
  std::vector<CJet> ups(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) ups[static_cast<std::size_t>(b)] = complexify(omega.partial(b));
  const auto& gi = geo.metric.ginv;
  CJet u2(0.0);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c)
      if (!zero_jet(gi(b, c))) mac(u2, ups[static_cast<std::size_t>(b)] * ups[static_cast<std::size_t>(c)], gi(b, c));
  CTensor out = zero_like(s);
  const std::size_t comps = s.size() / static_cast<std::size_t>(N);
  for (std::size_t k = 0; k < comps; ++k) {
    const CJet* v = &s.flat_at(k * static_cast<std::size_t>(N));
    CJet* o = &out.flat_at(k * static_cast<std::size_t>(N));
    o[0] = ew * v[0];
    CJet rho = v[n + 1];
    for (int b = 0; b < n; ++b) {
      o[1 + b] = ew * (v[1 + b] + v[0] * ups[static_cast<std::size_t>(b)]);
      for (int c = 0; c < n; ++c)
        if (!zero_jet(gi(b, c))) mac(rho, ups[static_cast<std::size_t>(b)] * v[1 + c], gi(b, c), -1.0);
    }
    mac(rho, v[0], u2, -0.5);
    o[n + 1] = emw * rho;
  }
  return out;
}

CheckReport transf_equivariance(const MetricSpec& g, const Expr& omega, const FieldSpec& s, const Point& x) {
  const int order = 3;
  const auto gj = g.jets(x, order);
  const Jet w = jet_eval(omega, x, order);
  const TractorGeometry a(curvature_from_jets(g.n, gj, x));
  const TractorGeometry b(curvature_from_jets(g.n, rescaled_metric(gj, w), x));
  const CTensor sec = s.jets(x, order);
  const CTensor path1 = tractor_rescale(a.geo, w, a.twisted().D(sec));
  const CTensor shat = tractor_rescale(a.geo, w, sec);
  const CTensor path2 = b.twisted().D(shat);
  CheckReport rep;
  rep.suite = "transf";
  rep.fixture = g.name;
  rep.add("connection", residual(path1, path2), 1e-9);
  const int N = g.n + 2;
  auto hval = [&](const GeometryPoint& geo, const CTensor& v) {
    const CTensor H = tractor_metric(geo);
    cplx acc = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) acc += v(i).value() * H(i * N + j).value() * v(j).value();
    return acc;
  };
  const cplx h0 = hval(a.geo, sec), h1 = hval(b.geo, shat);
  rep.add("metric", std::abs(h0 - h1) / std::max({1.0, std::abs(h0), std::abs(h1)}), 1e-12);
  return rep;
}

CheckReport tractor_conformal_n4(const MetricSpec& g, const Expr& omega, const FieldSpec& sigma, const FieldSpec& h,
                                 const Point& x) {
  if (g.n != 4) throw std::invalid_argument("tractor covariance is a dimension-4 statement");
  const int order = 4;
  const auto gj = g.jets(x, order);
  const Jet w = jet_eval(omega, x, order);
  const GeometryPoint a = curvature_from_jets(4, gj, x);
  const GeometryPoint b = curvature_from_jets(4, rescaled_metric(gj, w), x);
  const CJet ew = complexify(exp(w)), emw = complexify(exp(-w));
  const CJet sig = sigma.jets(x, order)();
  const CTensor ht = tfs(h.jets(x, order), a.metric);
  auto scaled = [](CTensor t, const CJet& f) {
    for (auto& v : t.data()) v = v * f;
    return t;
  };
  CheckReport rep;
  rep.suite = "conformal-n4";
  rep.fixture = g.name;
  rep.add("P", residual(P_op(b, ew * sig), scaled(P_op(a, sig), ew)), 1e-8);
  rep.add("M-T", residual(M_T(b, scaled(ht, ew)), scaled(M_T(a, ht), emw)), 1e-8);
  const CJet e5 = complexify(exp(w * Jet(-5.0)));
  rep.add("P-star", residual(adjoint_Pstar(b, scaled(ht, emw)), adjoint_Pstar(a, ht) * e5), 1e-8);
  return rep;
}

}  // namespace detour
