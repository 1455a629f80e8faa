#include "detour/jet.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

namespace detour {

namespace {

std::uint64_t encode(const std::uint8_t* a, int n) {
  std::uint64_t key = 0;
  for (int k = 0; k < n; ++k) key = (key << 4) | a[k];
  return key;
}

void enumerate_degree(int n, int d, int pos, std::vector<std::uint8_t>& cur,
                      std::vector<std::uint8_t>& out) {
  if (pos == n - 1) {
    cur[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(d);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(e);
    enumerate_degree(n, d - e, pos + 1, cur, out);
  }
}

}  // namespace

JetLayout::JetLayout(int n, int order) : n_(n), order_(order) {
  if (n < 1 || n > kMaxJetVars) throw std::invalid_argument("jet: unsupported variable count");
  if (order < 0 || order > kMaxJetOrder) throw std::invalid_argument("jet: unsupported order");
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(n), 0);
  prefix_.assign(static_cast<std::size_t>(order) + 1, 0);
  for (int d = 0; d <= order; ++d) {
    enumerate_degree(n, d, 0, cur, alphas_);
    prefix_[static_cast<std::size_t>(d)] = alphas_.size() / static_cast<std::size_t>(n);
  }
  const std::size_t count = alphas_.size() / static_cast<std::size_t>(n);
  degree_.resize(count);
  fact_.resize(count);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* a = alphas_.data() + i * static_cast<std::size_t>(n);
    int deg = 0;
    double f = 1.0;
    for (int k = 0; k < n; ++k) {
      deg += a[k];
      for (int m = 2; m <= a[k]; ++m) f *= m;
    }
    degree_[i] = deg;
    fact_[i] = f;
    keyed[i] = {encode(a, n), static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  keys_.resize(count);
  key_index_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    keys_[i] = keyed[i].first;
    key_index_[i] = keyed[i].second;
  }

  std::vector<int> sum(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (degree_[i] + degree_[j] > order) continue;
      for (int k = 0; k < n; ++k)
        sum[static_cast<std::size_t>(k)] = alpha(i)[static_cast<std::size_t>(k)] + alpha(j)[static_cast<std::size_t>(k)];
      const auto kk = index_of(sum);
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           static_cast<std::uint32_t>(kk)});
    }
  }
  std::stable_sort(products_.begin(), products_.end(),
                   [](const Term& a, const Term& b) { return a.k < b.k; });
  product_end_.assign(static_cast<std::size_t>(order) + 1, 0);
  for (int r = 0; r <= order; ++r) {
    const std::size_t lim = prefix_[static_cast<std::size_t>(r)];
    product_end_[static_cast<std::size_t>(r)] = static_cast<std::size_t>(
        std::partition_point(products_.begin(), products_.end(),
                             [lim](const Term& t) { return t.k < lim; }) -
        products_.begin());
  }

  if (order >= 1) {
    const std::size_t lower = prefix_[static_cast<std::size_t>(order) - 1];
    raise_.resize(lower * static_cast<std::size_t>(n));
    std::vector<int> a(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < lower; ++i) {
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m) a[static_cast<std::size_t>(m)] = alpha(i)[static_cast<std::size_t>(m)];
        a[static_cast<std::size_t>(k)] += 1;
        raise_[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] =
            static_cast<std::uint32_t>(index_of(a));
      }
    }
  }
}

std::ptrdiff_t JetLayout::index_of(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != n_) return -1;
  int deg = 0;
  std::uint64_t key = 0;
  for (int a : alpha) {
    if (a < 0) return -1;
    deg += a;
    if (deg > order_) return -1;
    key = (key << 4) | static_cast<std::uint64_t>(a);
  }
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return -1;
  return key_index_[static_cast<std::size_t>(it - keys_.begin())];
}

const JetLayout& jet_layout(int n, int order) {
  static std::array<std::array<std::atomic<const JetLayout*>, kMaxJetOrder + 1>, kMaxJetVars + 1> fast{};
  static std::mutex mu;
  static std::vector<std::unique_ptr<JetLayout>> owned;
  if (n < 1 || n > kMaxJetVars || order < 0 || order > kMaxJetOrder)
    throw std::invalid_argument("jet: layout out of range");
  auto& slot = fast[static_cast<std::size_t>(n)][static_cast<std::size_t>(order)];
  if (const JetLayout* p = slot.load(std::memory_order_acquire)) return *p;
  std::lock_guard<std::mutex> lock(mu);
  if (const JetLayout* p = slot.load(std::memory_order_relaxed)) return *p;
  owned.push_back(std::make_unique<JetLayout>(n, order));
  slot.store(owned.back().get(), std::memory_order_release);
  return *owned.back();
}

template <class S>
BasicJet<S>::BasicJet(int n, int order, S value) : n_(n), order_(order) {
  c_.assign(jet_layout(n, order).size(), S{});
  c_[0] = value;
}

template <class S>
BasicJet<S> BasicJet<S>::variable(int n, int order, int k, double at) {
  if (k < 0 || k >= n) throw std::invalid_argument("jet: variable index out of range");
  BasicJet j(n, order, S(at));
  if (order >= 1) j.c_[1 + static_cast<std::size_t>(k)] = S(1);
  return j;
}

template <class S>
BasicJet<S> BasicJet<S>::from_coeffs(int n, int order, std::vector<S> coeffs) {
  BasicJet j(n, order);
  if (coeffs.size() != j.c_.size()) throw std::invalid_argument("jet: coefficient count mismatch");
  j.c_ = std::move(coeffs);
  return j;
}

template <class S>
S BasicJet<S>::coeff(std::span<const int> alpha) const {
  if (is_constant()) {
    for (int a : alpha)
      if (a != 0) return S{};
    return c_[0];
  }
  const auto i = layout().index_of(alpha);
  if (i < 0) throw std::out_of_range("jet: multi-index beyond jet order");
  return c_[static_cast<std::size_t>(i)];
}

template <class S>
S BasicJet<S>::derivative(std::span<const int> alpha) const {
  double f = 1.0;
  for (int a : alpha)
    for (int m = 2; m <= a; ++m) f *= m;
  return coeff(alpha) * f;
}

template <class S>
double BasicJet<S>::max_abs() const {
  double m = 0.0;
  for (const S& v : c_) m = std::max(m, std::abs(v));
  return m;
}

template <class S>
BasicJet<S> BasicJet<S>::truncated(int r) const {
  if (is_constant() || r >= order_) return *this;
  if (r < 0) throw std::invalid_argument("jet: negative truncation order");
  BasicJet out;
  out.n_ = n_;
  out.order_ = r;
  out.c_.assign(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(layout().size_at(r)));
  return out;
}

template <class S>
BasicJet<S> BasicJet<S>::partial(int k) const {
  if (is_constant()) return BasicJet(S{});
  if (k < 0 || k >= n_) throw std::invalid_argument("jet: partial index out of range");
  if (order_ == 0) throw std::invalid_argument("jet: cannot differentiate an order-0 jet");
  const JetLayout& L = layout();
  BasicJet out(n_, order_ - 1);
  for (std::size_t i = 0; i < out.c_.size(); ++i) {
    const double factor = L.alpha(i)[static_cast<std::size_t>(k)] + 1.0;
    out.c_[i] = c_[L.raise(i, k)] * factor;
  }
  return out;
}

template <class S>
BasicJet<S> BasicJet<S>::shaped(int n, int order) const {
  if (is_constant()) return BasicJet(n, order, c_[0]);
  if (n != n_) throw std::invalid_argument("jet: variable count mismatch");
  if (order > order_) throw std::invalid_argument("jet: cannot raise jet order");
  return truncated(order);
}

namespace {

template <class S>
void align_to(BasicJet<S>& self, const BasicJet<S>& o) {
  if (self.vars() != o.vars()) throw std::invalid_argument("jet: variable count mismatch");
}

}  // namespace

template <class S>
BasicJet<S>& BasicJet<S>::operator+=(const BasicJet& o) {
  if (o.is_constant()) {
    c_[0] += o.c_[0];
    return *this;
  }
  if (is_constant()) {
    const S v = c_[0];
    *this = o;
    c_[0] += v;
    return *this;
  }
  align_to(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

template <class S>
BasicJet<S>& BasicJet<S>::operator-=(const BasicJet& o) {
  if (o.is_constant()) {
    c_[0] -= o.c_[0];
    return *this;
  }
  if (is_constant()) {
    const S v = c_[0];
    *this = -o;
    c_[0] += v;
    return *this;
  }
  align_to(*this, o);
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

template <class S>
BasicJet<S>& BasicJet<S>::operator*=(S s) {
  for (S& v : c_) v *= s;
  return *this;
}

template <class S>
BasicJet<S>& BasicJet<S>::operator*=(const BasicJet& o) {
  if (o.is_constant()) return *this *= o.c_[0];
  if (is_constant()) {
    const S v = c_[0];
    *this = o;
    return *this *= v;
  }
  align_to(*this, o);
  const int r = std::min(order_, o.order_);
  BasicJet out(n_, r);
  out.add_product(*this, o);
  *this = std::move(out);
  return *this;
}

template <class S>
void BasicJet<S>::add_product(const BasicJet& a, const BasicJet& b, S scale) {
  if (a.is_constant() || b.is_constant()) {
    BasicJet t = a.is_constant() ? b : a;
    t *= (a.is_constant() ? a.c_[0] : b.c_[0]) * scale;
    *this += t;
    return;
  }
  if (is_constant()) {
    const S v = c_[0];
    *this = BasicJet(a.n_, std::min(a.order_, b.order_), v);
  }
  if (a.n_ != n_ || b.n_ != n_) throw std::invalid_argument("jet: variable count mismatch");
  const int r = std::min({order_, a.order_, b.order_});
  if (r < order_) *this = truncated(r);
  const JetLayout& L = jet_layout(n_, r);
  const auto& terms = L.products();
  const std::size_t end = L.product_end(r);
  const S* pa = a.c_.data();
  const S* pb = b.c_.data();
  S* pc = c_.data();
  if (scale == S{1}) {
    for (std::size_t t = 0; t < end; ++t) pc[terms[t].k] += pa[terms[t].i] * pb[terms[t].j];
  } else {
    for (std::size_t t = 0; t < end; ++t) pc[terms[t].k] += scale * (pa[terms[t].i] * pb[terms[t].j]);
  }
}

template <class S>
BasicJet<S>& BasicJet<S>::operator/=(const BasicJet& o) {
  if (o.is_constant()) {
    if (o.c_[0] == S{}) throw DomainError("division by zero");
    return *this *= (S{1} / o.c_[0]);
  }
  return *this *= reciprocal(o);
}

template <class S>
BasicJet<S> BasicJet<S>::operator-() const {
  BasicJet out = *this;
  for (S& v : out.c_) v = -v;
  return out;
}

namespace {

// f(a0 + h) = sum_m t[m] h^m with h the non-constant part, by Horner.
template <class S>
BasicJet<S> compose(const BasicJet<S>& j, const std::vector<S>& t) {
  if (j.is_constant()) return BasicJet<S>(t[0]);
  BasicJet<S> h = j;
  h[0] = S{};
  const int r = j.order();
  BasicJet<S> acc(j.vars(), r, t[static_cast<std::size_t>(r)]);
  for (int m = r - 1; m >= 0; --m) {
    acc *= h;
    acc[0] += t[static_cast<std::size_t>(m)];
  }
  return acc;
}

template <class S>
std::vector<S> cyclic_series(const std::array<S, 4>& d, int r) {
  std::vector<S> t(static_cast<std::size_t>(r) + 1);
  double f = 1.0;
  for (int m = 0; m <= r; ++m) {
    if (m > 1) f *= m;
    t[static_cast<std::size_t>(m)] = d[static_cast<std::size_t>(m % 4)] / f;
  }
  return t;
}

}  // namespace

template <class S>
BasicJet<S> reciprocal(const BasicJet<S>& j) {
  const S a0 = j.value();
  if (a0 == S{}) throw DomainError("reciprocal of a jet with zero constant term");
  const int r = j.is_constant() ? 0 : j.order();
  std::vector<S> t(static_cast<std::size_t>(r) + 1);
  S p = S{1} / a0;
  for (int m = 0; m <= r; ++m) {
    t[static_cast<std::size_t>(m)] = (m % 2 == 0) ? p : -p;
    p /= a0;
  }
  return compose(j, t);
}

template <class S>
BasicJet<S> exp(const BasicJet<S>& j) {
  const S e = std::exp(j.value());
  return compose(j, cyclic_series<S>({e, e, e, e}, j.is_constant() ? 0 : j.order()));
}

template <class S>
BasicJet<S> sin(const BasicJet<S>& j) {
  const S s = std::sin(j.value()), c = std::cos(j.value());
  return compose(j, cyclic_series<S>({s, c, -s, -c}, j.is_constant() ? 0 : j.order()));
}

template <class S>
BasicJet<S> cos(const BasicJet<S>& j) {
  const S s = std::sin(j.value()), c = std::cos(j.value());
  return compose(j, cyclic_series<S>({c, -s, -c, s}, j.is_constant() ? 0 : j.order()));
}

template <class S>
BasicJet<S> sinh(const BasicJet<S>& j) {
  const S s = std::sinh(j.value()), c = std::cosh(j.value());
  return compose(j, cyclic_series<S>({s, c, s, c}, j.is_constant() ? 0 : j.order()));
}

template <class S>
BasicJet<S> cosh(const BasicJet<S>& j) {
  const S s = std::sinh(j.value()), c = std::cosh(j.value());
  return compose(j, cyclic_series<S>({c, s, c, s}, j.is_constant() ? 0 : j.order()));
}

Jet log(const Jet& j) {
  const double a0 = j.value();
  if (!(a0 > 0.0)) throw DomainError("log of a non-positive value");
  const int r = j.is_constant() ? 0 : j.order();
  std::vector<double> t(static_cast<std::size_t>(r) + 1);
  t[0] = std::log(a0);
  double p = 1.0;
  for (int m = 1; m <= r; ++m) {
    p /= a0;
    t[static_cast<std::size_t>(m)] = ((m % 2 == 1) ? 1.0 : -1.0) * p / m;
  }
  return compose(j, t);
}

Jet sqrt(const Jet& j) { return pow(j, 0.5); }

Jet pow(const Jet& j, double p) {
  if (p == std::round(p) && std::abs(p) <= 64.0) return ipow(j, static_cast<int>(p));
  const double a0 = j.value();
  if (!(a0 > 0.0)) throw DomainError("non-integer power of a non-positive value");
  const int r = j.is_constant() ? 0 : j.order();
  std::vector<double> t(static_cast<std::size_t>(r) + 1);
  double binom = 1.0;
  for (int m = 0; m <= r; ++m) {
    t[static_cast<std::size_t>(m)] = binom * std::pow(a0, p - m);
    binom *= (p - m) / (m + 1.0);
  }
  return compose(j, t);
}

template <class S>
BasicJet<S> ipow(const BasicJet<S>& j, int p) {
  if (p < 0) return reciprocal(ipow(j, -p));
  BasicJet<S> result(S{1});
  BasicJet<S> base = j;
  while (p > 0) {
    if (p & 1) result *= base;
    p >>= 1;
    if (p > 0) base *= base;
  }
  return result;
}

CJet complexify(const Jet& j) {
  if (j.is_constant()) return CJet(cplx(j.value()));
  std::vector<cplx> c(j.coeffs().begin(), j.coeffs().end());
  return CJet::from_coeffs(j.vars(), j.order(), std::move(c));
}

Jet real_part(const CJet& j) {
  if (j.is_constant()) return Jet(j.value().real());
  std::vector<double> c(j.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = j[i].real();
  return Jet::from_coeffs(j.vars(), j.order(), std::move(c));
}

Jet imag_part(const CJet& j) {
  if (j.is_constant()) return Jet(j.value().imag());
  std::vector<double> c(j.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = j[i].imag();
  return Jet::from_coeffs(j.vars(), j.order(), std::move(c));
}

void add_product(CJet& acc, const CJet& a, const Jet& b, cplx scale) {
  if (b.is_constant()) {
    CJet t = a;
    t *= scale * b.value();
    acc += t;
    return;
  }
  if (a.is_constant()) {
    CJet t = complexify(b);
    t *= scale * a.value();
    acc += t;
    return;
  }
  if (acc.is_constant()) acc = CJet(a.vars(), std::min(a.order(), b.order()), acc.value());
  const int r = std::min({acc.order(), a.order(), b.order()});
  if (r < acc.order()) acc = acc.truncated(r);
  const JetLayout& L = jet_layout(acc.vars(), r);
  const auto& terms = L.products();
  const std::size_t end = L.product_end(r);
  for (std::size_t t = 0; t < end; ++t)
    acc[terms[t].k] += scale * (a[terms[t].i] * b[terms[t].j]);
}

CJet operator*(const CJet& a, const Jet& b) {
  if (b.is_constant()) return a * cplx(b.value());
  if (a.is_constant()) return complexify(b) * a.value();
  CJet out(a.vars(), std::min(a.order(), b.order()));
  add_product(out, a, b);
  return out;
}

CJet operator*(const Jet& a, const CJet& b) { return b * a; }

template class BasicJet<double>;
template class BasicJet<cplx>;
template BasicJet<double> reciprocal(const BasicJet<double>&);
template BasicJet<cplx> reciprocal(const BasicJet<cplx>&);
template BasicJet<double> exp(const BasicJet<double>&);
template BasicJet<cplx> exp(const BasicJet<cplx>&);
template BasicJet<double> sin(const BasicJet<double>&);
template BasicJet<cplx> sin(const BasicJet<cplx>&);
template BasicJet<double> cos(const BasicJet<double>&);
template BasicJet<cplx> cos(const BasicJet<cplx>&);
template BasicJet<double> sinh(const BasicJet<double>&);
template BasicJet<cplx> sinh(const BasicJet<cplx>&);
template BasicJet<double> cosh(const BasicJet<double>&);
template BasicJet<cplx> cosh(const BasicJet<cplx>&);
template BasicJet<double> ipow(const BasicJet<double>&, int);
template BasicJet<cplx> ipow(const BasicJet<cplx>&, int);

}  // namespace detour
