#include "detour/symbol.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "detour/fixtures.hpp"
#include "detour/spin.hpp"
#include "detour/tractor.hpp"

namespace detour {

namespace {

using MatX = Eigen::MatrixXcd;

Matrix to_matrix(const MatX& m) {
  Matrix out = Matrix::zero(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out(i, j) = m(i, j);
  return out;
}

MatX to_eigen(const Matrix& m) {
  MatX out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
  return out;
}

enum class Fiber { Scalar, Form, Tfs, Spinor, Twistor };

struct OpInfo {
  Fiber source, target;
  int order;
};

const std::map<std::string, OpInfo>& op_table() {
  static const std::map<std::string, OpInfo> t = {
      {"d", {Fiber::Scalar, Fiber::Form, 1}},      {"M", {Fiber::Form, Fiber::Form, 2}},
      {"delta", {Fiber::Form, Fiber::Scalar, 1}},  {"P", {Fiber::Scalar, Fiber::Tfs, 2}},
      {"M-T", {Fiber::Tfs, Fiber::Tfs, 2}},        {"P-star", {Fiber::Tfs, Fiber::Scalar, 2}},
      {"T", {Fiber::Spinor, Fiber::Twistor, 1}},   {"M-Sigma", {Fiber::Twistor, Fiber::Twistor, 3}},
      {"T-star", {Fiber::Twistor, Fiber::Spinor, 1}},
  };
  return t;
}

const OpInfo& info(const std::string& op) {
  auto it = op_table().find(op);
  if (it == op_table().end()) throw std::invalid_argument("unknown operator: " + op);
  return it->second;
}

bool is_spinor(Fiber f) { return f == Fiber::Spinor || f == Fiber::Twistor; }

MatX mat(const std::vector<cplx>& v, int d) {
  MatX m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v[static_cast<std::size_t>(i * d + j)];
  return m;
}

std::vector<double> raise(const SymbolPoint& sp, const std::vector<double>& xi) {
  std::vector<double> up(static_cast<std::size_t>(sp.n), 0.0);
  for (int a = 0; a < sp.n; ++a)
    for (int b = 0; b < sp.n; ++b) up[static_cast<std::size_t>(a)] += sp.ginv[static_cast<std::size_t>(a * sp.n + b)] * xi[static_cast<std::size_t>(b)];
  return up;
}

// beta(v) = v_b beta^b.
MatX clifford_of(const SymbolPoint& sp, const std::vector<double>& v) {
  const int d = sp.spinor_dim;
  MatX m = MatX::Zero(d, d);
  for (int b = 0; b < sp.n; ++b) m += v[static_cast<std::size_t>(b)] * mat(sp.beta[static_cast<std::size_t>(b)], d);
  return m;
}

int ambient_dim(const SymbolPoint& sp, Fiber f, int r) {
  switch (f) {
    case Fiber::Scalar: return r;
    case Fiber::Form: return sp.n * r;
    case Fiber::Tfs: return sp.n * sp.n;
    case Fiber::Spinor: return sp.spinor_dim;
    case Fiber::Twistor: return sp.n * sp.spinor_dim;
  }
  return 0;
}

MatX tfs_projector(const SymbolPoint& sp) {
  const int n = sp.n;
  MatX P = MatX::Zero(n * n, n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      P(a * n + b, a * n + b) += 0.5;
      P(a * n + b, b * n + a) += 0.5;
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e)
          P(a * n + b, c * n + e) -= sp.g[static_cast<std::size_t>(a * n + b)] * sp.ginv[static_cast<std::size_t>(c * n + e)] / n;
    }
  return P;
}

// u_a + (2/n) beta_a beta^c u_c.
MatX twistor_projector(const SymbolPoint& sp) {
  const int n = sp.n, d = sp.spinor_dim;
  MatX P = MatX::Identity(n * d, n * d);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      P.block(a * d, c * d, d, d) += (2.0 / n) * mat(sp.beta_low[static_cast<std::size_t>(a)], d) * mat(sp.beta[static_cast<std::size_t>(c)], d);
  return P;
}

MatX projector(const SymbolPoint& sp, Fiber f, int r) {
  if (f == Fiber::Tfs) return tfs_projector(sp);
  if (f == Fiber::Twistor) return twistor_projector(sp);
  const int m = ambient_dim(sp, f, r);
  return MatX::Identity(m, m);
}

// Orthonormal basis of the range of a projector.
MatX range_basis(const MatX& P) {
  Eigen::JacobiSVD<MatX> svd(P, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int k = 0;
  const double top = s.size() ? s(0) : 0.0;
  while (k < s.size() && s(k) > 1e-8 * std::max(1.0, top)) ++k;
  return svd.matrixU().leftCols(k);
}

// Polynomial in a formal derivative scale z: coefficient matrices by degree.
using Poly = std::vector<MatX>;

Poly poly_mul(const Poly& x, const Poly& y) {
  Poly out(x.size() + y.size() - 1, MatX::Zero(x[0].rows(), y[0].cols()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

// Frozen-coefficient full symbol of L1* M L1, read off at degree 3.  The
// spin-tractor connection enters through its zero-order matrices; only the
// beta block survives at top degree but the whole matrix is kept.
MatX m_sigma_symbol(const SymbolPoint& sp, const std::vector<double>& xi) {
  const int n = sp.n, d = sp.spinor_dim, D = 2 * d;
  const double c = 2.0 / (n - 2), k = 1.0 / (n - 1);
  const auto up = raise(sp, xi);
  const MatX bxi = clifford_of(sp, xi);
  auto bl = [&](int a) { return mat(sp.beta_low[static_cast<std::size_t>(a)], d); };
  auto bu = [&](int a) { return mat(sp.beta[static_cast<std::size_t>(a)], d); };
  auto A = [&](int a) { return mat(sp.tractor[static_cast<std::size_t>(a)], D); };

  // L1: twistor ambient (n d) -> spin-tractor 1-forms (n 2d).
  Poly L1(2, MatX::Zero(n * D, n * d));
  for (int a = 0; a < n; ++a) {
    L1[0].block(a * D, a * d, d, d) = MatX::Identity(d, d);
    L1[1].block(a * D + d, a * d, d, d) += c * bxi;
    for (int e = 0; e < n; ++e) L1[1].block(a * D + d, e * d, d, d) -= c * k * up[static_cast<std::size_t>(e)] * bl(a);
  }
  // d: 1-forms -> 2-forms (a n + b) with D_a = z xi_a + A_a.
  Poly dz(2, MatX::Zero(n * n * D, n * D));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int row = (a * n + b) * D;
      dz[1].block(row, b * D, D, D) += xi[static_cast<std::size_t>(a)] * MatX::Identity(D, D);
      dz[0].block(row, b * D, D, D) += A(a);
      dz[1].block(row, a * D, D, D) -= xi[static_cast<std::size_t>(b)] * MatX::Identity(D, D);
      dz[0].block(row, a * D, D, D) -= A(b);
    }
  // delta: (delta psi)_b = -g^{ac} D_c psi_ab.
  Poly del(2, MatX::Zero(n * D, n * n * D));
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      for (int e = 0; e < n; ++e) {
        const double gi = sp.ginv[static_cast<std::size_t>(a * n + e)];
        if (gi == 0.0) continue;
        del[1].block(b * D, (a * n + b) * D, D, D) -= gi * xi[static_cast<std::size_t>(e)] * MatX::Identity(D, D);
        del[0].block(b * D, (a * n + b) * D, D, D) -= gi * A(e);
      }
  // L1*: (X, Y) -> pi(Y + c (z beta(xi) X_a - k z xi_a beta^b X_b)).
  const MatX pi = twistor_projector(sp);
  Poly La(2, MatX::Zero(n * d, n * D));
  for (int a = 0; a < n; ++a) {
    La[0].block(a * d, a * D + d, d, d) = MatX::Identity(d, d);
    La[1].block(a * d, a * D, d, d) += c * bxi;
    for (int b = 0; b < n; ++b) La[1].block(a * d, b * D, d, d) -= c * k * xi[static_cast<std::size_t>(a)] * bu(b);
  }
  for (auto& m : La) m = pi * m;
  const Poly full = poly_mul(La, poly_mul(del, poly_mul(dz, L1)));
  return full[3];
}

MatX ambient_symbol(const std::string& op, const SymbolPoint& sp, const std::vector<double>& xi, int r) {
  const int n = sp.n;
  const auto up = raise(sp, xi);
  double xx = 0.0;
  for (int a = 0; a < n; ++a) xx += up[static_cast<std::size_t>(a)] * xi[static_cast<std::size_t>(a)];
  const MatX Ir = MatX::Identity(r, r);
  if (op == "d") {
    MatX m = MatX::Zero(n * r, r);
    for (int a = 0; a < n; ++a) m.block(a * r, 0, r, r) = xi[static_cast<std::size_t>(a)] * Ir;
    return m;
  }
  if (op == "delta") {
    MatX m = MatX::Zero(r, n * r);
    for (int a = 0; a < n; ++a) m.block(0, a * r, r, r) = -up[static_cast<std::size_t>(a)] * Ir;
    return m;
  }
  if (op == "M") {
    MatX m = MatX::Zero(n * r, n * r);
    for (int b = 0; b < n; ++b) {
      m.block(b * r, b * r, r, r) -= xx * Ir;
      for (int a = 0; a < n; ++a) m.block(b * r, a * r, r, r) += xi[static_cast<std::size_t>(b)] * up[static_cast<std::size_t>(a)] * Ir;
    }
    return m;
  }
  if (op == "P") {
    MatX v(n * n, 1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) v(a * n + b, 0) = xi[static_cast<std::size_t>(a)] * xi[static_cast<std::size_t>(b)];
    return tfs_projector(sp) * v;
  }
  if (op == "P-star") {
    MatX m(1, n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) m(0, a * n + b) = up[static_cast<std::size_t>(a)] * up[static_cast<std::size_t>(b)];
    return m;
  }
  if (op == "M-T") {
    // -TFS(|xi|^2 h_ab - xi_a xi^c h_cb - (n-1)^{-1} xi_a xi^c h_bc)
    MatX m = MatX::Zero(n * n, n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        m(a * n + b, a * n + b) += xx;
        for (int c = 0; c < n; ++c) {
          m(a * n + b, c * n + b) -= xi[static_cast<std::size_t>(a)] * up[static_cast<std::size_t>(c)];
          m(a * n + b, b * n + c) -= xi[static_cast<std::size_t>(a)] * up[static_cast<std::size_t>(c)] / (n - 1);
        }
      }
    return -tfs_projector(sp) * m;
  }
  const int d = sp.spinor_dim;
  if (d == 0) throw std::invalid_argument("spinor symbols need n >= 3");
  if (op == "T") {
    const MatX bxi = clifford_of(sp, xi);
    MatX m = MatX::Zero(n * d, d);
    for (int a = 0; a < n; ++a)
      m.block(a * d, 0, d, d) = xi[static_cast<std::size_t>(a)] * MatX::Identity(d, d) + (2.0 / n) * mat(sp.beta_low[static_cast<std::size_t>(a)], d) * bxi;
    return m;
  }
  if (op == "T-star") {
    MatX m = MatX::Zero(d, n * d);
    for (int a = 0; a < n; ++a) m.block(0, a * d, d, d) = -up[static_cast<std::size_t>(a)] * MatX::Identity(d, d);
    return m;
  }
  if (op == "M-Sigma") return m_sigma_symbol(sp, xi);
  throw std::invalid_argument("unknown operator: " + op);
}

int rank_of(const MatX& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::FullPivLU<MatX> lu(m);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

}  // namespace

double Matrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : a) m = std::max(m, std::abs(z));
  return m;
}

Matrix operator*(const Matrix& x, const Matrix& y) { return to_matrix(to_eigen(x) * to_eigen(y)); }

int numeric_rank(const Matrix& m, double rel_tol) { return rank_of(to_eigen(m), rel_tol); }

SymbolPoint symbol_point(const MetricSpec& g, const Point& x) {
  SymbolPoint sp;
  sp.n = g.n;
  sp.p = g.p;
  sp.q = g.q;
  const auto gj = g.jets(x, 2);
  const MetricAtPoint m = MetricAtPoint::from_components(g.n, gj);
  for (int a = 0; a < g.n; ++a)
    for (int b = 0; b < g.n; ++b) {
      sp.g.push_back(m.g(a, b).value());
      sp.ginv.push_back(m.ginv(a, b).value());
    }
  if (g.n >= 3) {
    const SpinGeometry sg = spin_geometry(curvature_from_jets(g.n, gj, x));
    const int d = sg.spinor_dim(), D = 2 * d;
    sp.spinor_dim = d;
    for (int a = 0; a < g.n; ++a) {
      std::vector<cplx> up, low, tr;
      for (int k = 0; k < d * d; ++k) {
        up.push_back(sg.beta(a, k).value());
        low.push_back(sg.beta_low(a, k).value());
      }
      for (int k = 0; k < D * D; ++k) tr.push_back(sg.tractor.A(a, k).value());
      sp.beta.push_back(std::move(up));
      sp.beta_low.push_back(std::move(low));
      sp.tractor.push_back(std::move(tr));
    }
  }
  return sp;
}

const std::vector<std::string>& symbol_operators() {
  static const std::vector<std::string> ops = {"d", "M", "delta", "P", "M-T", "P-star", "T", "M-Sigma", "T-star"};
  return ops;
}

SymbolMap symbol_of(const std::string& op, const SymbolPoint& sp, const std::vector<double>& xi, int rank) {
  const OpInfo& oi = info(op);
  if (static_cast<int>(xi.size()) != sp.n) throw std::invalid_argument("symbol: covector has the wrong length");
  if (rank < 1) throw std::invalid_argument("symbol: rank must be positive");
  if (rank != 1 && (is_spinor(oi.source) || oi.source == Fiber::Tfs || oi.target == Fiber::Tfs))
    throw std::invalid_argument("symbol: twisting is supported for the form operators");
  double norm = 0.0;
  for (double v : xi) norm = std::max(norm, std::abs(v));
  if (norm == 0.0) throw std::invalid_argument("symbol: xi must be nonzero");
  SymbolMap s;
  s.op = op;
  s.order = oi.order;
  const MatX amb = ambient_symbol(op, sp, xi, rank);
  const MatX Bs = range_basis(projector(sp, oi.source, rank));
  const MatX Bt = range_basis(projector(sp, oi.target, rank));
  s.source_dim = static_cast<int>(Bs.cols());
  s.target_dim = static_cast<int>(Bt.cols());
  s.ambient = to_matrix(amb);
  s.reduced = to_matrix(Bt.adjoint() * amb * Bs);
  return s;
}

std::vector<std::string> sequence_operators(const std::string& sequence) {
  if (sequence == "maxwell") return {"d", "M", "delta"};
  if (sequence == "einstein") return {"P", "M-T", "P-star"};
  if (sequence == "twistor") return {"T", "M-Sigma", "T-star"};
  throw std::invalid_argument("unknown symbol sequence: " + sequence);
}

CheckReport exactness_check(const std::string& sequence, const SymbolPoint& sp, std::vector<double> xi, int rank) {
  if (sp.q != 0) throw std::invalid_argument("symbol exactness is checked in Riemannian signature");
  const auto ops = sequence_operators(sequence);
  const auto up = raise(sp, xi);
  double len = 0.0;
  for (int a = 0; a < sp.n; ++a) len += up[static_cast<std::size_t>(a)] * xi[static_cast<std::size_t>(a)];
  if (!(len > 0.0)) throw std::invalid_argument("symbol: xi must be nonzero");
  for (double& v : xi) v /= std::sqrt(len);

  std::vector<SymbolMap> s;
  for (const auto& op : ops) s.push_back(symbol_of(op, sp, xi, rank));
  CheckReport rep;
  rep.suite = "symbol-" + sequence;
  std::vector<int> ranks;
  for (const auto& m : s) ranks.push_back(numeric_rank(m.reduced));
  const std::vector<int> dims = {s[0].source_dim, s[1].source_dim, s[2].source_dim, s[2].target_dim};
  for (int i = 0; i < 3; ++i) rep.measured["rank-" + ops[static_cast<std::size_t>(i)]] = ranks[static_cast<std::size_t>(i)];
  for (int i = 0; i < 4; ++i) rep.measured["fiber-" + std::to_string(i)] = dims[static_cast<std::size_t>(i)];
  for (int i = 0; i < 2; ++i) {
    const Matrix comp = s[static_cast<std::size_t>(i + 1)].reduced * s[static_cast<std::size_t>(i)].reduced;
    const double scale = std::max({1.0, s[static_cast<std::size_t>(i)].reduced.max_abs(), s[static_cast<std::size_t>(i + 1)].reduced.max_abs()});
    rep.add("compose-" + std::to_string(i + 1), comp.max_abs() / scale, 1e-10);
    rep.expect("exact-at-" + std::to_string(i + 1),
               ranks[static_cast<std::size_t>(i)] + ranks[static_cast<std::size_t>(i + 1)] == dims[static_cast<std::size_t>(i + 1)]);
  }
  rep.expect("injective-start", ranks[0] == dims[0]);
  rep.expect("surjective-end", ranks[2] == dims[3]);
  return rep;
}

CheckReport homogeneity_check(const std::string& op, const SymbolPoint& sp, const std::vector<double>& xi, int rank) {
  std::vector<double> x2 = xi;
  for (double& v : x2) v *= 2.0;
  const SymbolMap a = symbol_of(op, sp, xi, rank), b = symbol_of(op, sp, x2, rank);
  const double f = std::pow(2.0, a.order);
  double r = 0.0;
  for (std::size_t i = 0; i < a.ambient.a.size(); ++i) r = std::max(r, std::abs(b.ambient.a[i] - f * a.ambient.a[i]));
  CheckReport rep;
  rep.suite = "symbol-homogeneity";
  rep.add(op, r / std::max(1.0, b.ambient.max_abs()), 1e-12);
  return rep;
}

CheckReport symbol_oracle(const std::string& op, const MetricSpec& g, const Point& x, const std::vector<double>& xi,
                          std::uint64_t seed, int rank) {
  const OpInfo& oi = info(op);
  const int n = g.n, k = oi.order;
  const int order = 6;
  const GeometryPoint geo = curvature_zoo(g, x, order);
  const SymbolPoint sp = symbol_point(g, x);
  const SymbolMap sym = symbol_of(op, sp, xi, rank);
  std::unique_ptr<SpinGeometry> sg;
  if (is_spinor(oi.source)) sg = std::make_unique<SpinGeometry>(spin_geometry(geo));
  FiberConnection conn = FiberConnection::zero(n, rank, order);
  if (rank > 1) conn = connection_fixture("random-gl", {{"n", n}, {"rank", rank}, {"seed", static_cast<double>(seed)}}).spec.jets(x, order);
  const Twisted tw(geo, conn);

  // Random source value u0, constrained to the source fiber.
  Rng rng(seed);
  const int src = sym.ambient.cols;
  MatX u0(src, 1);
  for (int i = 0; i < src; ++i) u0(i, 0) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  u0 = projector(sp, oi.source, rank) * u0;

  // theta = <xi, x - x0>
  Expr theta = Expr::constant(0.0);
  for (int a = 0; a < n; ++a)
    theta = theta + Expr::constant(xi[static_cast<std::size_t>(a)]) * (Expr::variable(a) - Expr::constant(x[static_cast<std::size_t>(a)]));

  auto apply = [&](double lambda) -> MatX {
    const Expr th = Expr::constant(lambda) * theta;
    const Expr c = Expr::unary(ExprKind::Cos, th), s = Expr::unary(ExprKind::Sin, th);
    FieldSpec f;
    f.n = n;
    switch (oi.source) {
      case Fiber::Scalar: f.fiber = rank; break;
      case Fiber::Form: f.indices = {Variance::Co}; f.fiber = rank; break;
      case Fiber::Tfs: f.indices = {Variance::Co, Variance::Co}; break;
      case Fiber::Spinor: f.fiber = sg->spinor_dim(); break;
      case Fiber::Twistor: f.indices = {Variance::Co}; f.fiber = sg->spinor_dim(); break;
    }
    for (int i = 0; i < src; ++i) {
      const double re = u0(i, 0).real(), im = u0(i, 0).imag();
      f.re.push_back(Expr::constant(re) * c - Expr::constant(im) * s);
      f.im.push_back(Expr::constant(im) * c + Expr::constant(re) * s);
    }
    CTensor u = f.jets(x, order);
    if (oi.source == Fiber::Tfs) u = tfs(u, geo.metric);
    if (oi.source == Fiber::Twistor) u = twistor_project(*sg, u);
    CTensor out;
    if (op == "d") out = tw.d(u);
    else if (op == "M") out = tw.M(u);
    else if (op == "delta") out = tw.delta(u);
    else if (op == "P") out = P_op(geo, u());
    else if (op == "M-T") out = M_T(geo, u);
    else if (op == "P-star") {
      out = CTensor(n, {});
      out() = adjoint_Pstar(geo, u);
    } else if (op == "T") out = twistor_T(*sg, u);
    else if (op == "M-Sigma") out = M_Sigma(*sg, u);
    else out = adjoint_Tstar(*sg, u);
    MatX v(static_cast<int>(out.size()), 1);
    for (std::size_t i = 0; i < out.size(); ++i) v(static_cast<int>(i), 0) = out.flat_at(i).value();
    return v;
  };

  // Interpolate the degree-k polynomial in lambda through k + 1 samples.
  MatX V(k + 1, k + 1);
  std::vector<MatX> samples;
  for (int j = 0; j <= k; ++j) {
    const double lam = 1.0 + j;
    for (int e = 0; e <= k; ++e) V(j, e) = std::pow(lam, e);
    samples.push_back(apply(lam));
  }
  const MatX Vinv = V.inverse();
  MatX top = MatX::Zero(samples[0].rows(), 1);
  for (int j = 0; j <= k; ++j) top += Vinv(k, j) * samples[static_cast<std::size_t>(j)];
  const cplx ik = std::pow(cplx(0.0, 1.0), k);
  const MatX want = ik * to_eigen(sym.ambient) * u0;
  CheckReport rep;
  rep.suite = "symbol-oracle";
  rep.fixture = g.name;
  const double scale = std::max({1.0, top.cwiseAbs().maxCoeff(), want.cwiseAbs().maxCoeff()});
  rep.add(op, (top - want).cwiseAbs().maxCoeff() / scale, 1e-8);
  return rep;
}

}  // namespace detour
