#include "detour/cli/suites.hpp"

#include <algorithm>
#include <cmath>

#include "detour/spin.hpp"
#include "detour/symbol.hpp"
#include "detour/tractor.hpp"

namespace detour::cli {

namespace {

constexpr int kDegree = 3;  // random test fields are cubic polynomials

FieldSpec field(Rng& rng, int n, std::vector<Variance> idx, int fiber, int degree = kDegree, double amp = 1.0) {
  return random_field(rng, n, std::move(idx), fiber, degree, amp, true);
}

FieldSpec symmetric_field(Rng& rng, int n) {
  FieldSpec f = field(rng, n, {Variance::Co, Variance::Co}, 1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b) {
      f.re[static_cast<std::size_t>(a * n + b)] = f.re[static_cast<std::size_t>(b * n + a)];
      f.im[static_cast<std::size_t>(a * n + b)] = f.im[static_cast<std::size_t>(b * n + a)];
    }
  return f;
}

// Keeps only Taylor coefficients of degree >= keep.
CTensor high_order_part(CTensor t, int keep) {
  for (auto& j : t.data()) {
    if (j.is_constant()) {
      j = CJet(0.0);
      continue;
    }
    const JetLayout& L = j.layout();
    for (std::size_t i = 0; i < j.size(); ++i)
      if (L.degree(i) < keep) j[i] = 0.0;
  }
  return t;
}

ConnectionSpec connection_or_zero(const RunContext& ctx) {
  if (ctx.run->connection) return *ctx.run->connection;
  return connection_fixture("zero", {{"n", ctx.dim()}}).spec;
}

Twisted twisted_at(const RunContext& ctx, const Point& x, int order) {
  const MetricAtPoint m = MetricAtPoint::from_components(ctx.dim(), ctx.metric().jets(x, order));
  return Twisted(m, christoffel(m), connection_or_zero(ctx).jets(x, order));
}

std::vector<double> unit_covector(Rng& rng, int n) {
  std::vector<double> xi(static_cast<std::size_t>(n));
  double s = 0.0;
  for (double& v : xi) {
    v = rng.uniform(-1.0, 1.0);
    s += v * v;
  }
  for (double& v : xi) v /= std::sqrt(s);
  return xi;
}

std::vector<CheckReport> one(CheckReport r) { return {std::move(r)}; }

// ---- per-point suites ----------------------------------------------------

std::vector<CheckReport> jet_oracle(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  const int n = ctx.dim();
  CheckReport rep;
  auto worst = [&](const std::vector<Expr>& es, const std::string& item) {
    double w = 0.0;
    for (const Expr& e : es)
      if (!e.is_constant()) w = std::max(w, jet_fd_check(e, x, 3).max_residual());
    rep.add(item, w, 1e-6);
  };
  std::vector<Expr> upper;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) upper.push_back(ctx.metric().g[static_cast<std::size_t>(a * n + b)]);
  worst(upper, "metric");
  if (ctx.run->connection) {
    std::vector<Expr> all = ctx.run->connection->re;
    all.insert(all.end(), ctx.run->connection->im.begin(), ctx.run->connection->im.end());
    worst(all, "connection");
  }
  return one(rep);
}

std::vector<CheckReport> curvature(const RunContext& ctx, int i) {
  const GeometryPoint geo = curvature_zoo(ctx.metric(), ctx.points[static_cast<std::size_t>(i)], 4);
  CheckReport rep = curvature_identities(geo);
  rep.measured["scalar"] = geo.scalar.value();
  rep.measured["J"] = geo.J.value();
  return one(rep);
}

std::vector<CheckReport> conformal(const RunContext& ctx, int i) {
  return one(conformal_covariance_check(ctx.metric(), ctx.omega, ctx.points[static_cast<std::size_t>(i)]));
}

std::vector<CheckReport> einstein_bach(const RunContext& ctx, int i) {
  const GeometryPoint geo = curvature_zoo(ctx.metric(), ctx.points[static_cast<std::size_t>(i)], 4);
  const int n = ctx.dim();
  Tensor tf = geo.ricci;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) tf(a, b) -= geo.scalar * geo.metric.g(a, b) * (1.0 / n);
  CheckReport rep;
  rep.add("einstein", tf.max_value() / std::max(1.0, geo.ricci.max_value()), 1e-9);
  rep.add("bach", geo.bach.max_value(), 1e-9);
  return one(rep);
}

std::vector<CheckReport> algact(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  const int n = ctx.dim(), R = 4;
  const Twisted tw = twisted_at(ctx, x, R);
  Rng rng(ctx.stream("algact", i));
  const CTensor Phi = field(rng, n, {}, tw.rank()).jets(x, R);
  const CTensor psi = field(rng, n, {Variance::Co}, tw.rank()).jets(x, R);
  return one(check_algact(tw, Phi, psi));
}

std::vector<CheckReport> detour_complex(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  const int n = ctx.dim(), R = 4;
  const Twisted tw = twisted_at(ctx, x, R);
  Rng rng(ctx.stream("detour-complex", i));
  const CTensor Phi = field(rng, n, {}, tw.rank()).jets(x, R);
  const CTensor psi = field(rng, n, {Variance::Co}, tw.rank()).jets(x, R);
  return one(detour_compositions(tw, Phi, psi));
}

std::vector<CheckReport> prop_agree(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  const int n = ctx.dim(), R = 4;
  const Twisted tw = twisted_at(ctx, x, R);
  Rng rng(ctx.stream("prop-agree", i));
  const CTensor Phi = field(rng, n, {}, tw.rank()).jets(x, R);
  const CTensor phi = field(rng, n, {Variance::Co}, tw.rank()).jets(x, R);
  return one(check_half_flat(tw, Phi, phi, ctx.run->flat_half));
}

std::vector<CheckReport> currentder(const RunContext& ctx, int i) {
  const int n = ctx.dim();
  const ConnectionSpec c = connection_or_zero(ctx);
  Rng rng(ctx.stream("currentder", i));
  const FieldSpec Adot = field(rng, n, {Variance::Co}, c.k * c.k, 2, 0.5);
  const FieldSpec udot = field(rng, n, {}, c.k * c.k, 2, 0.5);
  return one(variational_checks(c, Adot, udot, ctx.metric(), ctx.points[static_cast<std::size_t>(i)]));
}

std::vector<CheckReport> conformal_n4(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  const int n = ctx.dim();
  const ConnectionSpec c = connection_or_zero(ctx);
  Rng rng(ctx.stream("conformal-n4", i));
  CheckReport rep;
  rep.merge(md_conformal_check(c, ctx.metric(), ctx.omega, field(rng, n, {Variance::Co}, c.k, 2, 0.5), x), "M-D/");
  const FieldSpec sigma = field(rng, n, {}, 1);
  rep.merge(tractor_conformal_n4(ctx.metric(), ctx.omega, sigma, symmetric_field(rng, n), x), "tractor/");
  const int d = clifford_build(ctx.metric().p, ctx.metric().q).dim;
  rep.merge(spin_conformal_n4(ctx.metric(), ctx.omega, field(rng, n, {Variance::Co}, d), x), "spin/");
  const CheckReport weyl = conformal_covariance_check(ctx.metric(), ctx.omega, x);
  for (const CheckItem& it : weyl.items)
    if (it.name == "bach") rep.items.push_back(it);
  return one(rep);
}

TractorGeometry tractor_at(const RunContext& ctx, int i, int order) {
  return tractor_geometry(ctx.metric(), ctx.points[static_cast<std::size_t>(i)], order);
}

std::vector<CheckReport> eincomm(const RunContext& ctx, int i) {
  const TractorGeometry tg = tractor_at(ctx, i, 5);
  Rng rng(ctx.stream("eincomm", i));
  return one(check_eincomm(tg, field(rng, ctx.dim(), {}, 1).jets(tg.geo.point, 5)()));
}

std::vector<CheckReport> divtr(const RunContext& ctx, int i) { return one(check_tractor_curvature(tractor_at(ctx, i, 5))); }

std::vector<CheckReport> mp(const RunContext& ctx, int i) {
  const TractorGeometry tg = tractor_at(ctx, i, 5);
  Rng rng(ctx.stream("MP", i));
  return one(check_MP(tg, field(rng, ctx.dim(), {}, 1).jets(tg.geo.point, 5)()));
}

std::vector<CheckReport> mt_composition(const RunContext& ctx, int i) {
  const TractorGeometry tg = tractor_at(ctx, i, 4);
  const Point& x = tg.geo.point;
  const int n = ctx.dim();
  Rng rng(ctx.stream("MT-composition", i));
  const CTensor h = tfs(symmetric_field(rng, n).jets(x, 4), tg.geo.metric);
  CheckReport rep = check_MT_composition(tg, h);
  const CTensor dh = tfs(high_order_part(field(rng, n, {Variance::Co, Variance::Co}, 1, 4).jets(x, 4), 3), tg.geo.metric);
  rep.merge(check_QQ_leading(tg, h, dh));
  return one(rep);
}

std::vector<CheckReport> tractor_metric(const RunContext& ctx, int i) {
  const TractorGeometry tg = tractor_at(ctx, i, 4);
  const Point& x = tg.geo.point;
  const int n = ctx.dim();
  Rng rng(ctx.stream("tractor-metric", i));
  CheckReport rep = check_trmetric_parallel(tg, field(rng, n, {}, n + 2).jets(x, 4), field(rng, n, {}, n + 2).jets(x, 4));
  rep.merge(check_adjoint_square(tg, field(rng, n, {Variance::Co}, n + 2).jets(x, 4)));
  return one(rep);
}

std::vector<CheckReport> transf(const RunContext& ctx, int i) {
  const int n = ctx.dim();
  Rng rng(ctx.stream("transf", i));
  return one(transf_equivariance(ctx.metric(), ctx.omega, field(rng, n, {}, n + 2, 2), ctx.points[static_cast<std::size_t>(i)]));
}

std::vector<CheckReport> spin_curvature(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  const int n = ctx.dim();
  const SpinGeometry sg = spin_geometry(ctx.metric(), x, 5);
  Rng rng(ctx.stream("spin-curvature", i));
  const int d = sg.spinor_dim();
  CheckReport rep = check_spin_curvature(sg, field(rng, n, {}, d).jets(x, 5));
  rep.merge(check_spin_pairing(sg, field(rng, n, {}, 2 * d).jets(x, 5), field(rng, n, {}, 2 * d).jets(x, 5)), "pairing/");
  return one(rep);
}

std::vector<CheckReport> spincomm(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  const SpinGeometry sg = spin_geometry(ctx.metric(), x, 5);
  Rng rng(ctx.stream("spincomm", i));
  return one(check_spincomm(sg, field(rng, ctx.dim(), {}, sg.spinor_dim()).jets(x, 5)));
}

std::vector<CheckReport> spintrtr(const RunContext& ctx, int i) {
  const int n = ctx.dim();
  const int d = clifford_build(ctx.metric().p, ctx.metric().q).dim;
  Rng rng(ctx.stream("spintrtr", i));
  const FieldSpec psi = field(rng, n, {}, d);
  return one(spintrtr_equivariance(ctx.metric(), ctx.omega, psi, field(rng, n, {}, 2 * d, 2), ctx.points[static_cast<std::size_t>(i)]));
}

std::vector<CheckReport> twistor_spinors(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  const SpinGeometry sg = spin_geometry(ctx.metric(), x, 3);
  CheckReport rep;
  for (const char* name : {"const-spinor", "linear-twistor"}) {
    const CTensor psi = spinor_fixture(name, ctx.metric()).jets(x, 3);
    rep.add(std::string(name) + "/T", twistor_T(sg, psi).max_value(), 1e-10);
    rep.add(std::string(name) + "/L0-parallel", sg.twisted().D(L0(sg, psi)).max_value(), 1e-9);
  }
  return one(rep);
}

std::vector<CheckReport> symbol_sequence(const RunContext& ctx, int i, const std::string& seq) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  Rng rng(ctx.stream("symbol-" + seq, i));
  const std::vector<double> xi = unit_covector(rng, ctx.dim());
  const SymbolPoint sp = symbol_point(ctx.metric(), x);
  CheckReport rep = exactness_check(seq, sp, xi);
  if (seq == "maxwell") rep.merge(exactness_check(seq, sp, xi, 2), "rank-2/");
  for (const auto& op : sequence_operators(seq)) rep.merge(homogeneity_check(op, sp, xi), "homogeneity/");
  return one(rep);
}

std::vector<CheckReport> symbol_oracle_suite(const RunContext& ctx, int i) {
  const Point& x = ctx.points[static_cast<std::size_t>(i)];
  Rng rng(ctx.stream("symbol-oracle", i));
  const std::vector<double> xi = unit_covector(rng, ctx.dim());
  const std::uint64_t seed = ctx.stream("symbol-oracle-field", i);
  CheckReport rep;
  for (const auto& op : symbol_operators()) rep.merge(symbol_oracle(op, ctx.metric(), x, xi, seed));
  for (const char* op : {"d", "M", "delta"}) rep.merge(symbol_oracle(op, ctx.metric(), x, xi, seed, 2), "rank-2/");
  return one(rep);
}

// ---- whole-run suites ----------------------------------------------------

std::vector<CheckReport> clifford(const RunContext& ctx, int) {
  return one(check_clifford(clifford_build(ctx.metric().p, ctx.metric().q)));
}

std::vector<CheckReport> twistor_n4(const RunContext& ctx, int) {
  const int n = ctx.dim();
  std::vector<CheckReport> out;
  std::vector<BachCliffordSample> samples;
  const FieldSpec phi = spinor_fixture("random-spinor", ctx.metric(), {{"seed", static_cast<double>(ctx.seed)}});
  for (std::size_t k = 0; k < ctx.points.size(); ++k) {
    const Point& x = ctx.points[k];
    const SpinGeometry sg = spin_geometry(ctx.metric(), x, 6);
    Rng rng(ctx.stream("twistor-n4", static_cast<int>(k)));
    const CTensor u = twistor_project(sg, field(rng, n, {Variance::Co}, sg.spinor_dim()).jets(x, 6));
    CheckReport chi = check_chirality(sg, u);
    chi.point_index = static_cast<int>(k);
    out.push_back(std::move(chi));
    samples.push_back(bach_clifford_sample(sg, phi.jets(x, 6)));
  }
  CheckReport fit = check_bach_clifford(samples);
  fit.point_index = -1;
  out.insert(out.begin(), std::move(fit));
  return out;
}

std::vector<Suite> build() {
  using R = Requirements;
  R conn;
  conn.connection = true;
  R conn4 = conn;
  conn4.dim = 4;
  R four;
  four.dim = 4;
  R einstein;
  einstein.einstein = true;
  R riem;
  riem.riemannian = true;
  R riem4 = riem;
  riem4.dim = 4;
  R constant;
  constant.constant_metric = true;
  auto seq = [](const std::string& s) {
    return [s](const RunContext& c, int i) { return symbol_sequence(c, i, s); };
  };
  return {
      {"MP", "tractor form of M^T P against the Bach and Cotton terms", {}, true, mp},
      {"MT-composition", "M^T display against its tractor composition; leading-order cancellation", {}, true, mt_composition},
      {"algact", "M d Phi = e(delta F) Phi and delta M psi = -i(delta F) psi", conn, true, algact},
      {"clifford", "Clifford relations, pairing and chirality for the metric signature", {}, false, clifford},
      {"conformal", "Weyl invariance, Christoffel transformation law, Bach rescaling at n = 4", {}, true, conformal},
      {"conformal-n4", "rescaling covariance of the M operators in dimension 4", four, true, conformal_n4},
      {"currentder", "variation of the Yang-Mills current along connection lines and gauge orbits", conn, true, currentder},
      {"curvature", "Bianchi identities, trace-freeness and curvature decomposition", {}, true, curvature},
      {"detour-complex", "consecutive compositions of the twisted detour sequence vanish", conn, true, detour_complex},
      {"divtr", "tractor curvature blocks and their divergence", {}, true, divtr},
      {"eincomm", "tractor derivative of the splitting operator against E and P", {}, true, eincomm},
      {"einstein-bach", "Einstein metrics are Bach-flat", einstein, true, einstein_bach},
      {"jet-oracle", "jet derivatives against extrapolated finite differences", {}, true, jet_oracle},
      {"prop-agree", "half-flat subcomplexes and the half-composition identity", conn4, true, prop_agree},
      {"spin-curvature", "spin curvature, Clifford parallelism and the spin-tractor pairing", {}, true, spin_curvature},
      {"spincomm", "spin-tractor curvature identities and commutators", {}, true, spincomm},
      {"spintrtr", "two-path rescaling equivariance of the spin-tractor connection", {}, true, spintrtr},
      {"symbol-einstein", "exactness of the P, M^T, P* symbol sequence", riem4, true, seq("einstein")},
      {"symbol-maxwell", "exactness of the d, M, delta symbol sequence, untwisted and rank 2", riem, true, seq("maxwell")},
      {"symbol-oracle", "assembled symbols against plane-wave probing of the operators", {}, true, symbol_oracle_suite},
      {"symbol-twistor", "exactness of the T, M^Sigma, T* symbol sequence", riem4, true, seq("twistor")},
      {"tractor-metric", "tractor metric parallelism and the adjoint square", {}, true, tractor_metric},
      {"transf", "two-path rescaling equivariance of the tractor connection", {}, true, transf},
      {"twistor-n4", "chirality exchange of M^Sigma and the Bach-Clifford constant", four, false, twistor_n4},
      {"twistor-spinors", "constant and linear twistor spinors on a flat metric", constant, true, twistor_spinors},
  };
}

}  // namespace

std::uint64_t RunContext::stream(const std::string& suite, int point) const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (unsigned char c : suite) mix(c);
  for (int k = 0; k < 8; ++k) mix((seed >> (8 * k)) & 0xff);
  for (int k = 0; k < 4; ++k) mix((static_cast<std::uint32_t>(point) >> (8 * k)) & 0xff);
  return h;
}

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = build();
  return all;
}

const Suite* find_suite(const std::string& name) {
  for (const Suite& s : suites())
    if (s.name == name) return &s;
  return nullptr;
}

std::string describe(const Requirements& r) {
  std::string out;
  auto add = [&out](const std::string& s) { out += (out.empty() ? "" : ", ") + s; };
  if (r.dim) add("n = " + std::to_string(r.dim));
  if (r.riemannian) add("Riemannian");
  if (r.connection) add("connection");
  if (r.einstein) add("Einstein metric");
  if (r.constant_metric) add("constant metric");
  return out.empty() ? "-" : out;
}

std::string requirement_error(const Suite& s, const RunSpec& run) {
  const Requirements& r = s.req;
  const int n = run.metric.n;
  if (r.dim && n != r.dim) return "requires n = " + std::to_string(r.dim) + " (geometry has n = " + std::to_string(n) + ")";
  if (n < r.min_dim) return "requires n >= " + std::to_string(r.min_dim);
  if (r.riemannian && run.metric.q != 0) return "requires a Riemannian metric";
  if (r.connection && !run.connection) return "requires a connection";
  if (r.einstein && !run.einstein) return "requires an Einstein fixture";
  if (r.constant_metric)
    for (const Expr& e : run.metric.g)
      if (!e.is_constant()) return "requires a constant metric";
  return {};
}

}  // namespace detour::cli
