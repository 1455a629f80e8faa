#include "detour/field.hpp"

#include <stdexcept>

namespace detour {

std::size_t FieldSpec::size() const {
  std::size_t s = static_cast<std::size_t>(fiber);
  for (std::size_t i = 0; i < indices.size(); ++i) s *= static_cast<std::size_t>(n);
  return s;
}

void FieldSpec::validate() const {
  if (re.size() != size()) throw std::invalid_argument("field: wrong number of components");
  if (!im.empty() && im.size() != size()) throw std::invalid_argument("field: wrong number of imaginary components");
  for (const Expr& e : re)
    if (e.arity() > n) throw std::invalid_argument("field: component uses a variable beyond the dimension");
  for (const Expr& e : im)
    if (e.arity() > n) throw std::invalid_argument("field: component uses a variable beyond the dimension");
}

CTensor FieldSpec::jets(const Point& x, int order) const {
  validate();
  CTensor t(n, indices, weight, fiber);
  for (std::size_t k = 0; k < size(); ++k) {
    CJet v = complexify(jet_eval(re[k], x, order));
    if (!im.empty() && !(im[k].is_constant() && im[k].node().value == 0.0))
      mac(v, jet_eval(im[k], x, order), CJet(cplx(0.0, 1.0)));
    t.flat_at(k) = std::move(v);
  }
  return t;
}

Tensor FieldSpec::real_jets(const Point& x, int order) const {
  validate();
  Tensor t(n, indices, weight, fiber);
  for (std::size_t k = 0; k < size(); ++k) t.flat_at(k) = jet_eval(re[k], x, order);
  return t;
}

Expr random_polynomial(Rng& rng, int n, int degree, double amp) {
  const JetLayout& L = jet_layout(n, degree);
  Expr sum = Expr::constant(rng.uniform(-amp, amp));
  for (std::size_t i = 1; i < L.size(); ++i) {
    Expr term = Expr::constant(rng.uniform(-amp, amp));
    const auto& alpha = L.alpha(i);
    for (int k = 0; k < n; ++k) {
      const int e = alpha[static_cast<std::size_t>(k)];
      if (e == 0) continue;
      Expr v = Expr::variable(k);
      term = term * (e == 1 ? v : Expr::binary(ExprKind::Pow, v, Expr::constant(e)));
    }
    sum = sum + term;
  }
  return sum;
}

FieldSpec random_field(Rng& rng, int n, std::vector<Variance> indices, int fiber, int degree, double amp,
                       bool complex) {
  FieldSpec f;
  f.n = n;
  f.indices = std::move(indices);
  f.fiber = fiber;
  for (std::size_t k = 0; k < f.size(); ++k) f.re.push_back(random_polynomial(rng, n, degree, amp));
  if (complex)
    for (std::size_t k = 0; k < f.size(); ++k) f.im.push_back(random_polynomial(rng, n, degree, amp));
  return f;
}

FieldSpec scaled(FieldSpec f, const Expr& s) {
  for (auto& e : f.re) e = s * e;
  for (auto& e : f.im) e = s * e;
  return f;
}

}  // namespace detour
