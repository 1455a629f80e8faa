#include "detour/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace detour {

void MetricSpec::validate() const {
  if (n < 1) throw std::invalid_argument("metric: dimension must be positive");
  if (static_cast<int>(g.size()) != n * n) throw std::invalid_argument("metric: expected n*n components");
  if (p + q != n) throw std::invalid_argument("metric: signature does not add up to the dimension");
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (g[static_cast<std::size_t>(a * n + b)].str() != g[static_cast<std::size_t>(b * n + a)].str())
        throw std::invalid_argument("metric: component (" + std::to_string(a) + "," + std::to_string(b) +
                                    ") differs from its transpose");
    }
  }
  for (const Expr& e : g)
    if (e.arity() > n) throw std::invalid_argument("metric: component uses a variable beyond the dimension");
}

std::vector<Jet> MetricSpec::jets(const Point& x, int order) const {
  std::vector<Jet> out;
  out.reserve(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const std::size_t a = k / static_cast<std::size_t>(n), b = k % static_cast<std::size_t>(n);
    if (b < a) {
      out.push_back(out[b * static_cast<std::size_t>(n) + a]);
    } else {
      out.push_back(jet_eval(g[k], x, order));
    }
  }
  return out;
}

template <class S>
BasicTensor<S> covariant_derivative(const BasicTensor<S>& t, const Tensor& gamma) {
  const int n = t.dim();
  const int r = t.rank();
  const int F = t.fiber();
  std::vector<Variance> idx;
  idx.reserve(static_cast<std::size_t>(r) + 1);
  idx.push_back(Variance::Co);
  idx.insert(idx.end(), t.indices().begin(), t.indices().end());
  BasicTensor<S> out(n, idx, t.weight(), F);
  const std::size_t block = t.size();
  for (int a = 0; a < n; ++a)
    for (std::size_t k = 0; k < block; ++k) out.flat_at(static_cast<std::size_t>(a) * block + k) = t.flat_at(k).partial(a);
  if (r == 0) return out;

  std::vector<std::size_t> stride(static_cast<std::size_t>(r));
  std::size_t s = static_cast<std::size_t>(F);
  for (int m = r - 1; m >= 0; --m) {
    stride[static_cast<std::size_t>(m)] = s;
    s *= static_cast<std::size_t>(n);
  }
  for_each_index(n, r, [&](std::vector<int>& I) {
    const std::size_t base = t.offset(I, 0);
    for (int a = 0; a < n; ++a) {
      for (int m = 0; m < r; ++m) {
        const int im = I[static_cast<std::size_t>(m)];
        const bool co = t.variance(m) == Variance::Co;
        for (int e = 0; e < n; ++e) {
          const Jet& G = co ? gamma(e, a, im) : gamma(im, a, e);
          if (G.is_constant() && G.value() == 0.0) continue;
          const std::size_t src =
              base + static_cast<std::size_t>(e) * stride[static_cast<std::size_t>(m)] -
              static_cast<std::size_t>(im) * stride[static_cast<std::size_t>(m)];
          for (int f = 0; f < F; ++f)
            mac(out.flat_at(static_cast<std::size_t>(a) * block + base + static_cast<std::size_t>(f)),
                t.flat_at(src + static_cast<std::size_t>(f)), G, co ? S(-1.0) : S(1.0));
        }
      }
    }
  });
  return out;
}

template Tensor covariant_derivative(const Tensor&, const Tensor&);
template CTensor covariant_derivative(const CTensor&, const Tensor&);

Tensor christoffel(const MetricAtPoint& m) {
  const int n = m.n;
  Tensor dg = Tensor::covariant(n, 3);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dg(c, a, b) = m.g(a, b).partial(c);
  Tensor G(n, {Variance::Contra, Variance::Co, Variance::Co});
  for (int b = 0; b < n; ++b) {
    for (int c = b; c < n; ++c) {
      for (int d = 0; d < n; ++d) {
        const Jet lower = dg(b, d, c) + dg(c, d, b) - dg(d, b, c);
        for (int a = 0; a < n; ++a) mac(G(a, b, c), m.ginv(a, d), lower, 0.5);
      }
      if (c != b)
        for (int a = 0; a < n; ++a) G(a, c, b) = G(a, b, c);
    }
  }
  return G;
}

Tensor christoffel(const MetricSpec& g, const Point& x, int order) {
  g.validate();
  return christoffel(MetricAtPoint::from_components(g.n, g.jets(x, order)));
}

GeometryPoint curvature_from_jets(int n, const std::vector<Jet>& gab, const Point& x) {
  if (n < 3) throw std::invalid_argument("curvature: dimension must be at least 3");
  GeometryPoint geo;
  geo.point = x;
  geo.metric = MetricAtPoint::from_components(n, gab);
  geo.order = geo.metric.g.order();
  if (geo.order < 2) throw std::invalid_argument("curvature: metric jets of order >= 2 required");
  const double scale = std::max(1e-300, geo.metric.scale());
  if (std::abs(geo.metric.det.value()) < 1e-8 * std::pow(scale, n)) throw DomainError("degenerate metric");
  const auto& g = geo.metric.g;
  const auto& gi = geo.metric.ginv;

  const Tensor& G = geo.christoffel = christoffel(geo.metric);
  // dG(c, a, d, b) = d_c Gamma^a_db
  Tensor dG(n, {Variance::Co, Variance::Contra, Variance::Co, Variance::Co});
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int d = 0; d < n; ++d)
        for (int b = 0; b < n; ++b) dG(c, a, d, b) = G(a, d, b).partial(c);

  // R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
  Tensor Rup(n, {Variance::Contra, Variance::Co, Variance::Co, Variance::Co});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          Jet v = dG(c, a, d, b) - dG(d, a, c, b);
          for (int e = 0; e < n; ++e) {
            mac(v, G(a, c, e), G(e, d, b));
            mac(v, G(a, d, e), G(e, c, b), -1.0);
          }
          Rup(a, b, d, c) = -v;
          Rup(a, b, c, d) = std::move(v);
        }
  Tensor& R = geo.riemann = Tensor::covariant(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e) mac(R(a, b, c, d), g(a, e), Rup(e, b, c, d));

  Tensor& Ric = geo.ricci = Tensor::covariant(n, 2);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d)
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) mac(Ric(b, d), gi(a, c), R(a, b, c, d));
  geo.scalar = Jet(0.0);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) mac(geo.scalar, gi(b, d), Ric(b, d));

  geo.J = geo.scalar * Jet(1.0 / (2.0 * (n - 1)));
  Tensor& P = geo.schouten = Tensor::covariant(n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      P(a, b) = Ric(a, b);
      mac(P(a, b), geo.J, g(a, b), -1.0);
      P(a, b) *= 1.0 / (n - 2);
    }

  // C = R - (g_ca P_bd - g_cb P_ad + g_db P_ac - g_da P_bc)
  Tensor& C = geo.weyl = R;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Jet& v = C(a, b, c, d);
          mac(v, g(c, a), P(b, d), -1.0);
          mac(v, g(c, b), P(a, d), 1.0);
          mac(v, g(d, b), P(a, c), -1.0);
          mac(v, g(d, a), P(b, c), 1.0);
        }

  if (geo.order >= 3) {
    const Tensor dP = covariant_derivative(P, G);  // (a, b, c) = nabla_a P_bc
    Tensor& A = geo.cotton = Tensor::covariant(n, 3);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) A(a, b, c) = dP(b, c, a) - dP(c, b, a);
  }
  if (geo.order >= 4) {
    const Tensor dA = covariant_derivative(geo.cotton, G);  // (d, a, b, c) = nabla_d A_abc
    Tensor Pup(n, {Variance::Contra, Variance::Contra});
    for (int d = 0; d < n; ++d)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e)
          for (int f = 0; f < n; ++f) {
            Jet t = gi(d, e) * gi(c, f);
            mac(Pup(d, c), t, P(e, f));
          }
    Tensor& B = geo.bach = Tensor::covariant(n, 2);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Jet& v = B(a, b);
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            mac(v, gi(c, d), dA(d, a, c, b));
            mac(v, Pup(d, c), C(d, a, c, b));
          }
      }
  }
  return geo;
}

GeometryPoint curvature_zoo(const MetricSpec& g, const Point& x, int order) {
  g.validate();
  if (g.n < 3) throw std::invalid_argument("curvature: dimension must be at least 3");
  if (static_cast<int>(x.size()) != g.n) throw std::invalid_argument("curvature: point dimension mismatch");
  return curvature_from_jets(g.n, g.jets(x, order), x);
}

std::vector<Jet> rescaled_metric(const std::vector<Jet>& gab, const Jet& omega) {
  const Jet e2w = exp(omega * Jet(2.0));
  std::vector<Jet> out;
  out.reserve(gab.size());
  for (const Jet& v : gab) out.push_back(e2w * v);
  return out;
}

namespace {

Tensor mixed_weyl(const GeometryPoint& geo) {
  const int n = geo.dim();
  Tensor out(n, {Variance::Contra, Variance::Co, Variance::Co, Variance::Co});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e) mac(out(a, b, c, d), geo.metric.ginv(a, e), geo.weyl(e, b, c, d));
  return out;
}

}  // namespace

CheckReport conformal_covariance_check(const MetricSpec& g, const Expr& omega, const Point& x) {
  g.validate();
  const int n = g.n;
  const int order = 4;
  const auto gj = g.jets(x, order);
  const Jet w = jet_eval(omega, x, order);
  const GeometryPoint geo = curvature_from_jets(n, gj, x);
  const GeometryPoint hat = curvature_from_jets(n, rescaled_metric(gj, w), x);
  CheckReport rep;
  rep.suite = "conformal";
  rep.fixture = g.name;
  rep.add("weyl", residual(mixed_weyl(hat), mixed_weyl(geo)), 1e-9);

  Tensor Ups = Tensor::covariant(n, 1);
  for (int a = 0; a < n; ++a) Ups(a) = w.partial(a);
  Tensor law = geo.christoffel;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Jet& v = law(a, b, c);
        if (a == b) v += Ups(c);
        if (a == c) v += Ups(b);
        for (int d = 0; d < n; ++d) {
          const Jet t = geo.metric.g(b, c) * geo.metric.ginv(a, d);
          mac(v, t, Ups(d), -1.0);
        }
      }
  rep.add("christoffel-law", residual(hat.christoffel, law), 1e-10);

  if (n == 4) {
    const Jet factor = exp(w * Jet(-2.0));
    Tensor expected = geo.bach;
    for (auto& v : expected.data()) v = v * factor;
    rep.add("bach", residual(hat.bach, expected), 1e-8);
    // Power k in B^ = e^{k omega} B, least squares over components.
    double bb = 0.0, hb = 0.0;
    for (std::size_t k = 0; k < geo.bach.size(); ++k) {
      bb += geo.bach.flat_at(k).value() * geo.bach.flat_at(k).value();
      hb += hat.bach.flat_at(k).value() * geo.bach.flat_at(k).value();
    }
    const double w0 = w.value();
    if (std::abs(w0) > 1e-6 && bb > 1e-20 && hb > 0.0) rep.measured["bach_power"] = std::log(hb / bb) / w0;
  }
  return rep;
}

Tensor harmonic_curvature_op(const GeometryPoint& geo, const Tensor& S) {
  const int n = geo.dim();
  if (S.rank() != 2 || S.variance(0) != Variance::Co || S.variance(1) != Variance::Contra)
    throw std::invalid_argument("harmonic_curvature_op: expects S_b^c");
  const auto& gi = geo.metric.ginv;
  const Tensor dS = covariant_derivative(S, geo.christoffel);    // (a, b, c)
  const Tensor ddS = covariant_derivative(dS, geo.christoffel);  // (d, a, b, c)
  Tensor out(n, {Variance::Co, Variance::Contra}, S.weight());
  // S^{ad} = g^{ae} S_e^d
  Tensor Sup(n, {Variance::Contra, Variance::Contra});
  for (int a = 0; a < n; ++a)
    for (int d = 0; d < n; ++d)
      for (int e = 0; e < n; ++e) mac(Sup(a, d), gi(a, e), S(e, d));
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      Jet& v = out(b, c);
      for (int a = 0; a < n; ++a)
        for (int d = 0; d < n; ++d) {
          mac(v, gi(d, a), ddS(d, a, b, c), -1.0);
          mac(v, gi(d, a), ddS(d, b, a, c), 1.0);
          // R_ba^c_d S^ad = g^ce R_baed S^ad
          for (int e = 0; e < n; ++e) {
            const Jet t = gi(c, e) * geo.riemann(b, a, e, d);
            mac(v, t, Sup(a, d), -1.0);
          }
        }
    }
  return out;
}

Tensor curvature_divergence_action(const GeometryPoint& geo, const Tensor& v) {
  const int n = geo.dim();
  const auto& gi = geo.metric.ginv;
  Tensor Rm(n, {Variance::Co, Variance::Co, Variance::Contra, Variance::Co});
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e) mac(Rm(b, a, c, d), gi(c, e), geo.riemann(b, a, e, d));
  const Tensor dR = covariant_derivative(Rm, geo.christoffel);  // (e, b, a, c, d)
  Tensor out(n, {Variance::Co, Variance::Contra});
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c)
      for (int e = 0; e < n; ++e)
        for (int a = 0; a < n; ++a) {
          if (gi(e, a).is_constant() && gi(e, a).value() == 0.0) continue;
          for (int d = 0; d < n; ++d) {
            const Jet t = gi(e, a) * dR(e, b, a, c, d);
            mac(out(b, c), t, v(d));
          }
        }
  return out;
}

CheckReport curvature_identities(const GeometryPoint& geo, double tol) {
  const int n = geo.dim();
  const auto& g = geo.metric.g;
  const auto& gi = geo.metric.ginv;
  const Tensor& R = geo.riemann;
  CheckReport rep;
  rep.suite = "curvature";
  Tensor zero4 = Tensor::covariant(n, 4);

  Tensor b1 = Tensor::covariant(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) b1(a, b, c, d) = R(a, b, c, d) + R(b, c, a, d) + R(c, a, b, d);
  rep.add("bianchi-first", residual(b1, zero4), tol);

  if (geo.order >= 3) {
    const Tensor dRic = covariant_derivative(geo.ricci, geo.christoffel);  // (a, b, c)
    Tensor lhs = Tensor::covariant(n, 1), rhs = Tensor::covariant(n, 1);
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) mac(lhs(b), gi(a, c), dRic(c, a, b));
      rhs(b) = geo.scalar.partial(b) * Jet(0.5);
    }
    rep.add("bianchi-second", residual(lhs, rhs), tol);

    Tensor tr = Tensor::covariant(n, 1), zero1 = Tensor::covariant(n, 1);
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) mac(tr(c), gi(a, b), geo.cotton(a, b, c));
    rep.add("cotton-trace", residual(tr, zero1), 1e-10 * std::max(1.0, geo.cotton.max_value()));
  }

  Tensor traces = Tensor::covariant(n, 3);
  double worst = 0.0;
  const int pairs[4][2] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
  for (const auto& pr : pairs) {
    const Tensor t = contract(geo.weyl, pr[0], pr[1], geo.metric);
    worst = std::max(worst, t.max_value());
  }
  rep.add("weyl-tracefree", worst / std::max(1.0, geo.weyl.max_value()), 1e-10);

  Tensor rebuilt = geo.weyl;
  const auto& P = geo.schouten;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Jet& v = rebuilt(a, b, c, d);
          mac(v, g(c, a), P(b, d));
          mac(v, g(c, b), P(a, d), -1.0);
          mac(v, g(d, b), P(a, c));
          mac(v, g(d, a), P(b, c), -1.0);
        }
  rep.add("decomposition", residual(rebuilt, R), 1e-10);

  Tensor ricP = geo.schouten;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      ricP(a, b) *= static_cast<double>(n - 2);
      mac(ricP(a, b), geo.J, g(a, b));
    }
  rep.add("schouten-ricci", residual(ricP, geo.ricci), 1e-10);
  return rep;
}

Jet random_polynomial_jet(Rng& rng, int n, int order, int degree, double amp) {
  Jet j(n, order);
  const JetLayout& L = j.layout();
  for (std::size_t i = 0; i < j.size(); ++i)
    if (L.degree(i) <= degree) j[i] = rng.uniform(-amp, amp);
  return j;
}

}  // namespace detour
