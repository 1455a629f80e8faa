#include "detour/fixtures.hpp"

#include <cstdio>
#include <stdexcept>

namespace detour {

namespace {

double param(const FixtureParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

int iparam(const FixtureParams& p, const std::string& key, int fallback) {
  return static_cast<int>(param(p, key, fallback));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string radius_squared(int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " + x" : "x") + std::to_string(i) + "^2";
  return s;
}

Box cube(int n, double h) { return Box(static_cast<std::size_t>(n), {-h, h}); }

MetricSpec conformally_flat(int n, const std::string& factor, const std::string& name) {
  return diagonal_metric(std::vector<std::string>(static_cast<std::size_t>(n), factor), n, 0, name);
}

}  // namespace

MetricSpec diagonal_metric(const std::vector<std::string>& diag, int p, int q, const std::string& name) {
  const int n = static_cast<int>(diag.size());
  MetricSpec s;
  s.n = n;
  s.p = p;
  s.q = q;
  s.name = name;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s.g.push_back(a == b ? parse(diag[static_cast<std::size_t>(a)], n) : Expr::constant(0.0));
  return s;
}

std::array<std::array<cplx, 4>, 3> su2_basis() {
  const cplx i(0.0, 1.0);
  return {{{0.0, -i, -i, 0.0}, {0.0, -1.0, 1.0, 0.0}, {-i, 0.0, 0.0, i}}};
}

MetricFixture metric_fixture(const std::string& name, const FixtureParams& params) {
  MetricFixture f;
  const int n = iparam(params, "n", 4);
  if (n < 2 || n > 10) throw std::invalid_argument("fixture: dimension out of range");
  if (name == "flat") {
    const int q = iparam(params, "q", 0);
    if (q < 0 || q > n) throw std::invalid_argument("fixture: bad signature");
    std::vector<std::string> d(static_cast<std::size_t>(n), "1");
    for (int i = 0; i < q; ++i) d[static_cast<std::size_t>(i)] = "-1";
    f.spec = diagonal_metric(d, n - q, q, name);
    f.box = cube(n, 1.0);
    f.einstein = true;
  } else if (name == "sphere") {
    const double a = param(params, "radius", 1.0);
    f.spec = conformally_flat(n, num(4.0 * a * a) + "/(1 + " + radius_squared(n) + ")^2", name);
    f.box = cube(n, 1.0);
    f.einstein = true;
  } else if (name == "hyperbolic") {
    f.spec = conformally_flat(n, "4/(1 - (" + radius_squared(n) + "))^2", name);
    f.box = cube(n, 0.4);
    f.einstein = true;
  } else if (name == "schwarzschild") {
    if (n != 4) throw std::invalid_argument("fixture: schwarzschild is four-dimensional");
    const std::string lapse = "(1 - " + num(2.0 * param(params, "mass", 1.0)) + "/x1)";
    f.spec = diagonal_metric({"-" + lapse, "1/" + lapse, "x1^2", "x1^2*sin(x2)^2"}, 3, 1, name);
    f.box = {{-1.0, 1.0}, {4.5, 5.5}, {0.6, 2.5}, {-1.0, 1.0}};
    f.einstein = true;
  } else if (name == "perturbed-flat") {
    Rng rng(static_cast<std::uint64_t>(param(params, "seed", 1.0)));
    const double amp = param(params, "amplitude", 0.1);
    f.spec.n = n;
    f.spec.p = n;
    f.spec.name = name;
    f.spec.g.resize(static_cast<std::size_t>(n * n));
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        Expr h = Expr::constant(amp) * random_polynomial(rng, n, 3, 1.0);
        if (a == b) h = Expr::constant(1.0) + h;
        f.spec.g[static_cast<std::size_t>(a * n + b)] = h;
        f.spec.g[static_cast<std::size_t>(b * n + a)] = h;
      }
    f.box = cube(n, 0.5);
  } else {
    throw std::invalid_argument("unknown metric fixture: " + name);
  }
  return f;
}

ConnectionFixture connection_fixture(const std::string& name, const FixtureParams& params) {
  ConnectionFixture f;
  const int n = iparam(params, "n", 4);
  ConnectionSpec& c = f.spec;
  c.n = n;
  c.name = name;
  f.box = cube(n, 1.0);
  auto abelian = [&](const std::string& a1) {
    if (n < 2) throw std::invalid_argument("fixture: abelian fixtures need n >= 2");
    c.k = 1;
    c.re.assign(static_cast<std::size_t>(n), Expr::constant(0.0));
    c.re[1] = parse(a1, n);
  };
  if (name == "zero") {
    c.k = iparam(params, "rank", 1);
    c.re.assign(static_cast<std::size_t>(n * c.k * c.k), Expr::constant(0.0));
    f.yang_mills = true;
    f.flat_half = 1;
  } else if (name == "abelian-linear") {
    abelian("x0");
    f.yang_mills = true;
  } else if (name == "abelian-quadratic") {
    abelian("x0^2");
  } else if (name == "bpst") {
    if (n != 4) throw std::invalid_argument("fixture: bpst is four-dimensional");
    const double s = param(params, "scale", 1.0);
    const std::string den = "(" + num(s * s) + " + " + radius_squared(4) + ")";
    const char* coef[3][4] = {{"-x1", "x0", "x3", "-x2"}, {"-x2", "-x3", "x0", "x1"}, {"-x3", "x2", "-x1", "x0"}};
    const auto E = su2_basis();
    c.k = 2;
    c.re.assign(16, Expr::constant(0.0));
    c.im.assign(16, Expr::constant(0.0));
    for (int a = 0; a < 4; ++a)
      for (int u = 0; u < 3; ++u) {
        const Expr cu = parse(std::string(coef[u][a]) + "/" + den, 4);
        for (int e = 0; e < 4; ++e) {
          const cplx z = E[static_cast<std::size_t>(u)][static_cast<std::size_t>(e)];
          const std::size_t at = static_cast<std::size_t>(a * 4 + e);
          if (z.real() != 0.0) c.re[at] = c.re[at] + Expr::constant(z.real()) * cu;
          if (z.imag() != 0.0) c.im[at] = c.im[at] + Expr::constant(z.imag()) * cu;
        }
      }
    c.hV = {1.0, 0.0, 0.0, 1.0};
    c.compatible = true;
    f.yang_mills = true;
    f.flat_half = 1;
  } else if (name == "random-su2") {
    Rng rng(static_cast<std::uint64_t>(param(params, "seed", 1.0)));
    const int degree = iparam(params, "degree", 2);
    const double amp = param(params, "amplitude", 0.5);
    const auto E = su2_basis();
    c.k = 2;
    c.re.assign(static_cast<std::size_t>(4 * n), Expr::constant(0.0));
    c.im.assign(static_cast<std::size_t>(4 * n), Expr::constant(0.0));
    for (int a = 0; a < n; ++a)
      for (int u = 0; u < 3; ++u) {
        const Expr p = random_polynomial(rng, n, degree, amp);
        for (int e = 0; e < 4; ++e) {
          const cplx z = E[static_cast<std::size_t>(u)][static_cast<std::size_t>(e)];
          const std::size_t at = static_cast<std::size_t>(a * 4 + e);
          if (z.real() != 0.0) c.re[at] = c.re[at] + Expr::constant(z.real()) * p;
          if (z.imag() != 0.0) c.im[at] = c.im[at] + Expr::constant(z.imag()) * p;
        }
      }
    c.hV = {1.0, 0.0, 0.0, 1.0};
    c.compatible = true;
  } else if (name == "random-gl") {
    Rng rng(static_cast<std::uint64_t>(param(params, "seed", 1.0)));
    const int degree = iparam(params, "degree", 2);
    const double amp = param(params, "amplitude", 0.5);
    c.k = iparam(params, "rank", 2);
    if (c.k < 1 || c.k > 4) throw std::invalid_argument("fixture: rank out of range");
    for (int i = 0; i < n * c.k * c.k; ++i) c.re.push_back(random_polynomial(rng, n, degree, amp));
  } else {
    throw std::invalid_argument("unknown connection fixture: " + name);
  }
  return f;
}

const std::vector<FixtureInfo>& metric_fixture_list() {
  static const std::vector<FixtureInfo> list = {
      {"flat", "n, q", "constant diagonal metric with q negative entries"},
      {"sphere", "n, radius", "round sphere in a stereographic chart"},
      {"hyperbolic", "n", "Poincare ball"},
      {"schwarzschild", "mass", "exterior Schwarzschild, coordinates (t, r, theta, phi)"},
      {"perturbed-flat", "n, seed, amplitude", "identity plus a seeded random cubic symmetric perturbation"},
  };
  return list;
}

const std::vector<FixtureInfo>& connection_fixture_list() {
  static const std::vector<FixtureInfo> list = {
      {"zero", "n, rank", "trivial connection"},
      {"abelian-linear", "n", "line bundle, A = x0 dx1, constant curvature dx0^dx1"},
      {"abelian-quadratic", "n", "line bundle, A = x0^2 dx1, not Yang-Mills"},
      {"bpst", "scale", "su(2) instanton on R^4"},
      {"random-su2", "n, seed, degree, amplitude", "su(2)-valued random polynomial connection"},
      {"random-gl", "n, rank, seed, degree, amplitude", "real matrix-valued random polynomial connection"},
  };
  return list;
}

}  // namespace detour
