#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace detour {

using cplx = std::complex<double>;

inline constexpr int kMaxJetVars = 10;
inline constexpr int kMaxJetOrder = 12;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Multi-indices of |alpha| <= order in n variables, graded lexicographic:
// by total degree, then descending exponent of x0, x1, ...  The order-r
// table is a prefix of the order-(r+1) table, so truncation is a resize.
class JetLayout {
 public:
  struct Term {
    std::uint32_t i, j, k;
  };

  JetLayout(int n, int order);

  int vars() const { return n_; }
  int order() const { return order_; }
  std::size_t size() const { return degree_.size(); }
  std::size_t size_at(int r) const { return prefix_[static_cast<std::size_t>(r)]; }

  std::span<const std::uint8_t> alpha(std::size_t i) const {
    return {alphas_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  int degree(std::size_t i) const { return degree_[i]; }
  double alpha_factorial(std::size_t i) const { return fact_[i]; }

  // -1 when |alpha| > order.
  std::ptrdiff_t index_of(std::span<const int> alpha) const;

  // Product terms c[k] += a[i] * b[j], sorted by k.  The terms producing
  // degree <= r are the first product_end(r) entries.
  const std::vector<Term>& products() const { return products_; }
  std::size_t product_end(int r) const { return product_end_[static_cast<std::size_t>(r)]; }

  // Index of alpha + e_k for i in the order-(order-1) prefix.
  std::uint32_t raise(std::size_t i, int k) const {
    return raise_[i * static_cast<std::size_t>(n_) + static_cast<std::size_t>(k)];
  }

 private:
  int n_;
  int order_;
  std::vector<std::uint8_t> alphas_;
  std::vector<int> degree_;
  std::vector<double> fact_;
  std::vector<std::size_t> prefix_;
  std::vector<Term> products_;
  std::vector<std::size_t> product_end_;
  std::vector<std::uint32_t> raise_;
  std::vector<std::uint64_t> keys_;  // sorted encodings for index_of
  std::vector<std::uint32_t> key_index_;
};

// Shared, lazily built, thread-safe.
const JetLayout& jet_layout(int n, int order);

// Truncated Taylor jet of a scalar field at an implicit base point; the
// coefficient at alpha is d^alpha f / alpha!.  A jet with vars() == 0 is a
// plain constant that adopts the shape of whatever it is combined with.
template <class S>
class BasicJet {
 public:
  using scalar_type = S;

  BasicJet() : c_(1, S{}) {}
  BasicJet(S constant) : c_(1, constant) {}  // NOLINT(google-explicit-constructor)
  BasicJet(int n, int order, S value = S{});

  static BasicJet variable(int n, int order, int k, double at);
  static BasicJet from_coeffs(int n, int order, std::vector<S> coeffs);

  bool is_constant() const { return n_ == 0; }
  int vars() const { return n_; }
  // Constants report an unbounded order.
  int order() const { return n_ == 0 ? kMaxJetOrder : order_; }
  std::size_t size() const { return c_.size(); }
  const JetLayout& layout() const { return jet_layout(n_, order_); }

  S value() const { return c_[0]; }
  const S& operator[](std::size_t i) const { return c_[i]; }
  S& operator[](std::size_t i) { return c_[i]; }
  const std::vector<S>& coeffs() const { return c_; }

  S coeff(std::span<const int> alpha) const;
  // d^alpha f at the base point.
  S derivative(std::span<const int> alpha) const;
  double max_abs() const;

  BasicJet truncated(int r) const;
  BasicJet partial(int k) const;
  // Same jet on an explicit (n, order) shape; constants are expanded.
  BasicJet shaped(int n, int order) const;

  BasicJet& operator+=(const BasicJet& o);
  BasicJet& operator-=(const BasicJet& o);
  BasicJet& operator*=(const BasicJet& o);
  BasicJet& operator*=(S s);
  BasicJet& operator/=(const BasicJet& o);
  BasicJet operator-() const;

  // this += scale * a * b without temporaries.
  void add_product(const BasicJet& a, const BasicJet& b, S scale = S{1});

 private:
  template <class T>
  friend class BasicJet;
  int n_ = 0;
  int order_ = 0;
  std::vector<S> c_;
};

using Jet = BasicJet<double>;
using CJet = BasicJet<cplx>;

template <class S>
BasicJet<S> operator+(BasicJet<S> a, const BasicJet<S>& b) { return a += b; }
template <class S>
BasicJet<S> operator-(BasicJet<S> a, const BasicJet<S>& b) { return a -= b; }
template <class S>
BasicJet<S> operator*(const BasicJet<S>& a, const BasicJet<S>& b) {
  BasicJet<S> out = a;
  out *= b;
  return out;
}
template <class S>
BasicJet<S> operator/(BasicJet<S> a, const BasicJet<S>& b) { return a /= b; }
template <class S>
BasicJet<S> operator*(BasicJet<S> a, S s) { return a *= s; }
template <class S>
BasicJet<S> operator*(S s, BasicJet<S> a) { return a *= s; }
inline CJet operator*(CJet a, double s) { return a *= cplx(s); }
inline CJet operator*(double s, CJet a) { return a *= cplx(s); }

CJet complexify(const Jet& j);
Jet real_part(const CJet& j);
Jet imag_part(const CJet& j);
CJet operator*(const CJet& a, const Jet& b);
CJet operator*(const Jet& a, const CJet& b);
void add_product(CJet& acc, const CJet& a, const Jet& b, cplx scale = 1.0);

// acc += s * a * b over any mix of real and complex jets.
inline void mac(Jet& acc, const Jet& a, const Jet& b, double s = 1.0) { acc.add_product(a, b, s); }
inline void mac(CJet& acc, const CJet& a, const CJet& b, cplx s = 1.0) { acc.add_product(a, b, s); }
inline void mac(CJet& acc, const CJet& a, const Jet& b, cplx s = 1.0) { add_product(acc, a, b, s); }
inline void mac(CJet& acc, const Jet& a, const CJet& b, cplx s = 1.0) { add_product(acc, b, a, s); }

template <class S>
BasicJet<S> reciprocal(const BasicJet<S>& j);
template <class S>
BasicJet<S> exp(const BasicJet<S>& j);
template <class S>
BasicJet<S> sin(const BasicJet<S>& j);
template <class S>
BasicJet<S> cos(const BasicJet<S>& j);
template <class S>
BasicJet<S> sinh(const BasicJet<S>& j);
template <class S>
BasicJet<S> cosh(const BasicJet<S>& j);
Jet log(const Jet& j);
Jet sqrt(const Jet& j);
// Integer exponents work for any base; other exponents need a positive base.
Jet pow(const Jet& j, double p);
template <class S>
BasicJet<S> ipow(const BasicJet<S>& j, int p);

extern template class BasicJet<double>;
extern template class BasicJet<cplx>;

}  // namespace detour
