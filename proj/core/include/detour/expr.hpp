#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "detour/jet.hpp"
#include "detour/report.hpp"

namespace detour {

// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'x' digit | func '(' expr ')' | '(' expr ')'
//   func    := exp | log | sin | cos | sinh | cosh | sqrt
//   number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
enum class ExprKind { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt };

class Expr;

struct ExprNode {
  ExprKind kind;
  double value = 0.0;
  int var = -1;
  std::vector<Expr> args;
};

class Expr {
 public:
  Expr();
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  static Expr constant(double v);
  static Expr variable(int k);
  static Expr unary(ExprKind kind, Expr a);
  static Expr binary(ExprKind kind, Expr a, Expr b);

  const ExprNode& node() const { return *node_; }
  ExprKind kind() const { return node_->kind; }
  // 1 + highest variable index used, 0 for constants.
  int arity() const;
  bool is_constant() const { return node_->kind == ExprKind::Constant; }

  double eval(std::span<const double> x) const;
  std::string str() const;

 private:
  std::shared_ptr<const ExprNode> node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t pos);
  std::size_t position;
};

// Variables x0..x(n-1) are accepted.
Expr parse(std::string_view text, int n);

using Point = std::vector<double>;

// Coefficient alpha of the result is d^alpha e(p) / alpha!.
Jet jet_eval(const Expr& e, std::span<const double> p, int order);

// Central-difference estimate of d^alpha e(p), |alpha| <= 4, O(h^2) per axis.
double fd_oracle(const Expr& e, std::span<const double> p, std::span<const int> alpha, double h);
double fd_default_step(int total_order);
// Extrapolates fd_oracle to h -> 0 from a geometric sequence of steps
// starting at h, keeping the estimate whose neighbours agree best.
double fd_extrapolated(const Expr& e, std::span<const double> p, std::span<const int> alpha, double h);

// Compares d^alpha of the jet with the extrapolated difference quotient for
// every |alpha| <= max_order.  An item passes when the difference is below
// max(1e-6 |value|, 1e-8).
CheckReport jet_fd_check(const Expr& e, const Point& p, int max_order = 3);

}  // namespace detour
