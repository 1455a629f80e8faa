#include "detour/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace detour {

namespace {

std::shared_ptr<const ExprNode> make(ExprKind kind, double value, int var, std::vector<Expr> args) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->value = value;
  n->var = var;
  n->args = std::move(args);
  return n;
}

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Neg:
      return 3;
    case ExprKind::Pow:
      return 4;
    default:
      return 5;
  }
}

const char* func_name(ExprKind k) {
  switch (k) {
    case ExprKind::Exp: return "exp";
    case ExprKind::Log: return "log";
    case ExprKind::Sin: return "sin";
    case ExprKind::Cos: return "cos";
    case ExprKind::Sinh: return "sinh";
    case ExprKind::Cosh: return "cosh";
    case ExprKind::Sqrt: return "sqrt";
    default: return nullptr;
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Shortest form that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) {
      s = buf;
      break;
    }
  }
  return s;
}

void print(const Expr& e, std::string& out) {
  const ExprNode& n = e.node();
  auto child = [&](const Expr& c, bool paren) {
    if (paren) out += '(';
    print(c, out);
    if (paren) out += ')';
  };
  switch (n.kind) {
    case ExprKind::Constant:
      if (n.value < 0 || std::signbit(n.value)) {
        out += '(' + format_number(n.value) + ')';
      } else {
        out += format_number(n.value);
      }
      return;
    case ExprKind::Variable:
      out += 'x' + std::to_string(n.var);
      return;
    case ExprKind::Neg:
      out += '-';
      child(n.args[0], precedence(n.args[0].kind()) <= precedence(ExprKind::Neg));
      return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
      const int p = precedence(n.kind);
      child(n.args[0], precedence(n.args[0].kind()) < p);
      out += n.kind == ExprKind::Add ? " + " : n.kind == ExprKind::Sub ? " - " : n.kind == ExprKind::Mul ? "*" : "/";
      child(n.args[1], precedence(n.args[1].kind()) <= p);
      return;
    }
    case ExprKind::Pow:
      child(n.args[0], precedence(n.args[0].kind()) <= precedence(ExprKind::Pow));
      out += '^';
      child(n.args[1], precedence(n.args[1].kind()) < precedence(ExprKind::Pow));
      return;
    default:
      out += func_name(n.kind);
      out += '(';
      print(n.args[0], out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  Parser(std::string_view s, int n) : s_(s), n_(n) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (eat('+')) {
        lhs = Expr::binary(ExprKind::Add, lhs, term());
      } else if (eat('-')) {
        lhs = Expr::binary(ExprKind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (eat('*')) {
        lhs = Expr::binary(ExprKind::Mul, lhs, unary());
      } else if (eat('/')) {
        lhs = Expr::binary(ExprKind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (eat('-')) return Expr::unary(ExprKind::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (eat('^')) return Expr::binary(ExprKind::Pow, base, unary());
    return base;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t k = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        ++k;
      }
      return k;
    };
    std::size_t nd = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) throw ParseError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    const std::string text(s_.substr(start, pos_ - start));
    return Expr::constant(std::strtod(text.c_str(), nullptr));
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);
    if (id.size() == 2 && id[0] == 'x' && std::isdigit(static_cast<unsigned char>(id[1]))) {
      const int k = id[1] - '0';
      if (k >= n_)
        throw ParseError("variable " + std::string(id) + " out of range for dimension " + std::to_string(n_), start);
      return Expr::variable(k);
    }
    static const std::pair<std::string_view, ExprKind> funcs[] = {
        {"exp", ExprKind::Exp},   {"log", ExprKind::Log},   {"sin", ExprKind::Sin}, {"cos", ExprKind::Cos},
        {"sinh", ExprKind::Sinh}, {"cosh", ExprKind::Cosh}, {"sqrt", ExprKind::Sqrt}};
    for (const auto& [name, kind] : funcs) {
      if (id == name) {
        if (!eat('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
        Expr arg = expr();
        if (!eat(')')) throw ParseError("expected ')'", pos_);
        return Expr::unary(kind, arg);
      }
    }
    throw ParseError("unknown identifier '" + std::string(id) + "'", start);
  }

  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;
};

bool constant_exponent(const Expr& e, double& out) {
  if (e.kind() == ExprKind::Constant) {
    out = e.node().value;
    return true;
  }
  const auto& a = e.node().args;
  double x, y;
  switch (e.kind()) {
    case ExprKind::Neg:
      if (!constant_exponent(a[0], x)) return false;
      out = -x;
      return true;
    case ExprKind::Div:
      if (!constant_exponent(a[0], x) || !constant_exponent(a[1], y) || y == 0.0) return false;
      out = x / y;
      return true;
    default:
      return false;
  }
}

}  // namespace

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error("parse error at " + std::to_string(pos) + ": " + msg), position(pos) {}

Expr::Expr() : node_(make(ExprKind::Constant, 0.0, -1, {})) {}

Expr Expr::constant(double v) { return Expr(make(ExprKind::Constant, v, -1, {})); }
Expr Expr::variable(int k) { return Expr(make(ExprKind::Variable, 0.0, k, {})); }
Expr Expr::unary(ExprKind kind, Expr a) { return Expr(make(kind, 0.0, -1, {std::move(a)})); }
Expr Expr::binary(ExprKind kind, Expr a, Expr b) { return Expr(make(kind, 0.0, -1, {std::move(a), std::move(b)})); }

Expr operator+(Expr a, Expr b) { return Expr::binary(ExprKind::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(ExprKind::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(ExprKind::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(ExprKind::Div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::unary(ExprKind::Neg, std::move(a)); }

int Expr::arity() const {
  if (node_->kind == ExprKind::Variable) return node_->var + 1;
  int m = 0;
  for (const Expr& a : node_->args) m = std::max(m, a.arity());
  return m;
}

double Expr::eval(std::span<const double> x) const {
  const ExprNode& n = *node_;
  auto arg = [&](int i) { return n.args[static_cast<std::size_t>(i)].eval(x); };
  switch (n.kind) {
    case ExprKind::Constant: return n.value;
    case ExprKind::Variable:
      if (static_cast<std::size_t>(n.var) >= x.size()) throw std::invalid_argument("eval: point too short");
      return x[static_cast<std::size_t>(n.var)];
    case ExprKind::Add: return arg(0) + arg(1);
    case ExprKind::Sub: return arg(0) - arg(1);
    case ExprKind::Mul: return arg(0) * arg(1);
    case ExprKind::Div: {
      const double d = arg(1);
      if (d == 0.0) throw DomainError("division by zero");
      return arg(0) / d;
    }
    case ExprKind::Neg: return -arg(0);
    case ExprKind::Pow: {
      const double b = arg(0);
      double p;
      if (constant_exponent(n.args[1], p) && p == std::round(p)) {
        if (b == 0.0 && p < 0) throw DomainError("division by zero");
        return std::pow(b, p);
      }
      p = arg(1);
      if (!(b > 0.0)) throw DomainError("non-integer power of a non-positive value");
      return std::pow(b, p);
    }
    case ExprKind::Exp: return std::exp(arg(0));
    case ExprKind::Log: {
      const double v = arg(0);
      if (!(v > 0.0)) throw DomainError("log of a non-positive value");
      return std::log(v);
    }
    case ExprKind::Sin: return std::sin(arg(0));
    case ExprKind::Cos: return std::cos(arg(0));
    case ExprKind::Sinh: return std::sinh(arg(0));
    case ExprKind::Cosh: return std::cosh(arg(0));
    case ExprKind::Sqrt: {
      const double v = arg(0);
      if (v < 0.0) throw DomainError("sqrt of a negative value");
      return std::sqrt(v);
    }
  }
  return 0.0;
}

std::string Expr::str() const {
  std::string out;
  print(*this, out);
  return out;
}

Expr parse(std::string_view text, int n) {
  if (n < 1 || n > kMaxJetVars) throw std::invalid_argument("parse: dimension must be in 1..10");
  return Parser(text, n).run();
}

namespace {

Jet jet_rec(const Expr& e, std::span<const double> p, int order) {
  const ExprNode& n = e.node();
  const int dim = static_cast<int>(p.size());
  auto arg = [&](int i) { return jet_rec(n.args[static_cast<std::size_t>(i)], p, order); };
  switch (n.kind) {
    case ExprKind::Constant: return Jet(n.value);
    case ExprKind::Variable:
      if (n.var >= dim) throw std::invalid_argument("jet_eval: point too short");
      return Jet::variable(dim, order, n.var, p[static_cast<std::size_t>(n.var)]);
    case ExprKind::Add: return arg(0) + arg(1);
    case ExprKind::Sub: return arg(0) - arg(1);
    case ExprKind::Mul: return arg(0) * arg(1);
    case ExprKind::Div: return arg(0) / arg(1);
    case ExprKind::Neg: return -arg(0);
    case ExprKind::Pow: {
      double q;
      if (constant_exponent(n.args[1], q)) return pow(arg(0), q);
      return exp(arg(1) * log(arg(0)));
    }
    case ExprKind::Exp: return exp(arg(0));
    case ExprKind::Log: return log(arg(0));
    case ExprKind::Sin: return sin(arg(0));
    case ExprKind::Cos: return cos(arg(0));
    case ExprKind::Sinh: return sinh(arg(0));
    case ExprKind::Cosh: return cosh(arg(0));
    case ExprKind::Sqrt: {
      Jet a = arg(0);
      if (a.value() < 0.0) throw DomainError("sqrt of a negative value");
      if (a.value() == 0.0 && !a.is_constant()) throw DomainError("sqrt is not smooth at zero");
      return sqrt(a);
    }
  }
  return Jet(0.0);
}

}  // namespace

Jet jet_eval(const Expr& e, std::span<const double> p, int order) {
  if (p.empty()) throw std::invalid_argument("jet_eval: empty point");
  return jet_rec(e, p, order).shaped(static_cast<int>(p.size()), order);
}

double fd_default_step(int total_order) { return total_order <= 2 ? 1e-4 : 1e-3; }

double fd_oracle(const Expr& e, std::span<const double> p, std::span<const int> alpha, double h) {
  if (alpha.size() != p.size()) throw std::invalid_argument("fd_oracle: multi-index length mismatch");
  int total = 0;
  for (int a : alpha) {
    if (a < 0 || a > 4) throw std::invalid_argument("fd_oracle: order per axis must be 0..4");
    total += a;
  }
  if (total > 4) throw std::invalid_argument("fd_oracle: total order must be <= 4");
  // 1-D central stencils: offsets (in units of h) and weights, divided by h^m.
  struct Stencil {
    std::vector<int> off;
    std::vector<double> w;
    double denom;
  };
  static const Stencil stencils[5] = {
      {{0}, {1.0}, 1.0},
      {{-1, 1}, {-0.5, 0.5}, 1.0},
      {{-1, 0, 1}, {1.0, -2.0, 1.0}, 1.0},
      {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}, 1.0},
      {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}, 1.0},
  };
  std::vector<double> x(p.begin(), p.end());
  std::function<double(std::size_t)> rec = [&](std::size_t axis) -> double {
    if (axis == alpha.size()) return e.eval(x);
    const Stencil& s = stencils[alpha[axis]];
    if (alpha[axis] == 0) return rec(axis + 1);
    double acc = 0.0;
    const double base = x[axis];
    for (std::size_t i = 0; i < s.off.size(); ++i) {
      x[axis] = base + s.off[i] * h;
      acc += s.w[i] * rec(axis + 1);
    }
    x[axis] = base;
    return acc / std::pow(h, alpha[axis]);
  };
  return rec(0);
}

double fd_extrapolated(const Expr& e, std::span<const double> p, std::span<const int> alpha, double h) {
  // Neville tableau over steps h, h/c, h/c^2, ... (Ridders); stops once the
  // diagonal starts to grow against the best error estimate.
  constexpr int kTab = 10;
  constexpr double kCon = 1.4, kCon2 = kCon * kCon, kSafe = 2.0;
  double a[kTab][kTab];
  a[0][0] = fd_oracle(e, p, alpha, h);
  double best = a[0][0], err = std::numeric_limits<double>::infinity();
  for (int i = 1; i < kTab; ++i) {
    h /= kCon;
    a[0][i] = fd_oracle(e, p, alpha, h);
    double fac = kCon2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= kCon2;
      const double errt = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (errt <= err) {
        err = errt;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= kSafe * err) break;
  }
  return best;
}

constexpr double kExtrapolationStep = 0.05;

CheckReport jet_fd_check(const Expr& e, const Point& p, int max_order) {
  const int n = static_cast<int>(p.size());
  const Jet j = jet_eval(e, p, max_order);
  const JetLayout& L = jet_layout(n, max_order);
  CheckReport rep;
  rep.suite = "jet-oracle";
  double worst = 0.0;
  std::vector<int> alpha(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < L.size(); ++i) {
    const auto a = L.alpha(i);
    for (int k = 0; k < n; ++k) alpha[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)];
    const double jet = j.derivative(alpha);
    const double fd = fd_extrapolated(e, p, alpha, kExtrapolationStep);
    worst = std::max(worst, std::abs(jet - fd) / std::max(std::abs(jet), 1e-2));
  }
  rep.add("derivatives", worst, 1e-6);
  return rep;
}

}  // namespace detour
