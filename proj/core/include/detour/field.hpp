#pragma once

#include <vector>

#include "detour/expr.hpp"
#include "detour/sample.hpp"
#include "detour/tensor.hpp"

namespace detour {

// Tensor field given by expressions over the chart, one per component in
// the flat layout of BasicTensor.  Imaginary parts are optional.
struct FieldSpec {
  int n = 0;
  std::vector<Variance> indices;
  int fiber = 1;
  double weight = 0.0;
  std::vector<Expr> re;
  std::vector<Expr> im;

  std::size_t size() const;
  void validate() const;
  CTensor jets(const Point& x, int order) const;
  Tensor real_jets(const Point& x, int order) const;
};

// Sum of c_alpha x^alpha over |alpha| <= degree with c_alpha uniform in [-amp, amp].
Expr random_polynomial(Rng& rng, int n, int degree, double amp = 1.0);

// Field with independent random polynomial components.
FieldSpec random_field(Rng& rng, int n, std::vector<Variance> indices, int fiber, int degree, double amp = 1.0,
                       bool complex = false);

// Multiplies every component by the same scalar expression.
FieldSpec scaled(FieldSpec f, const Expr& s);

}  // namespace detour
