#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "detour/expr.hpp"
#include "detour/geometry.hpp"
#include "detour/report.hpp"

namespace detour {

// Dense row-major complex matrix.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<cplx> a;

  static Matrix zero(int r, int c) { return {r, c, std::vector<cplx>(static_cast<std::size_t>(r * c))}; }
  cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
  cplx operator()(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }
  double max_abs() const;
};

Matrix operator*(const Matrix& x, const Matrix& y);

// Rank by full-pivot row reduction with a relative pivot threshold.
int numeric_rank(const Matrix& m, double rel_tol = 1e-8);

// Frozen pointwise data the symbols depend on: the metric, and for spinor
// operators the Clifford symbols and the spin-tractor connection matrices.
struct SymbolPoint {
  int n = 0;
  int p = 0, q = 0;
  std::vector<double> g, ginv;  // n*n
  int spinor_dim = 0;           // 0 when n < 3
  std::vector<std::vector<cplx>> beta, beta_low;  // [a] -> d*d
  std::vector<std::vector<cplx>> tractor;         // [a] -> (2d)^2
};

SymbolPoint symbol_point(const MetricSpec& g, const Point& x);

// Leading symbol with d_a replaced by xi_a (no factor of i).  `ambient` acts
// on the unconstrained component layout (forms: a * fiber + i; symmetric
// 2-tensors: a * n + b; twistor fields: a * d + f); `reduced` is the same map
// in orthonormal bases of the constrained source and target fibers.
struct SymbolMap {
  std::string op;
  int order = 0;
  int source_dim = 0, target_dim = 0;
  Matrix ambient;
  Matrix reduced;
};

// Operators: "d", "M", "delta" (forms twisted by a rank-`rank` bundle),
// "P", "M-T", "P-star", "T", "M-Sigma", "T-star".
SymbolMap symbol_of(const std::string& op, const SymbolPoint& sp, const std::vector<double>& xi, int rank = 1);
const std::vector<std::string>& symbol_operators();

// Sequences: "maxwell" (d, M, delta), "einstein" (P, M-T, P-star),
// "twistor" (T, M-Sigma, T-star).  Riemannian only; xi is normalised.
std::vector<std::string> sequence_operators(const std::string& sequence);
CheckReport exactness_check(const std::string& sequence, const SymbolPoint& sp, std::vector<double> xi, int rank = 1);

// sigma_{2 xi} = 2^k sigma_xi.
CheckReport homogeneity_check(const std::string& op, const SymbolPoint& sp, const std::vector<double>& xi, int rank = 1);

// Applies the implemented operator to e^{i lambda <xi, x - x0>} u0 at several
// lambda and compares the lambda^k coefficient with i^k sigma_xi u0.  For
// rank > 1 the forms are twisted by the given connection.
CheckReport symbol_oracle(const std::string& op, const MetricSpec& g, const Point& x, const std::vector<double>& xi,
                          std::uint64_t seed, int rank = 1);

}  // namespace detour
