#include "detour/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace detour {

void for_each_index(int n, int rank, const std::function<void(std::vector<int>&)>& f) {
  std::vector<int> idx(static_cast<std::size_t>(rank), 0);
  for (;;) {
    f(idx);
    int k = rank - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) return;
  }
}

namespace {

int permutation_sign(const std::vector<int>& perm) {
  int sign = 1;
  std::vector<int> p = perm;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[static_cast<std::size_t>(p[i])]);
      sign = -sign;
    }
  }
  return sign;
}

template <class S>
BasicTensor<S> project(const BasicTensor<S>& t, std::span<const int> positions, bool alternating) {
  const int r = t.rank();
  for (int pos : positions)
    if (pos < 0 || pos >= r) throw std::invalid_argument("sym/asym: index position out of range");
  for (int pos : positions)
    if (t.variance(pos) != t.variance(positions[0]))
      throw std::invalid_argument("sym/asym: mixed variance in projected indices");
  BasicTensor<S> out(t.dim(), t.indices(), t.weight(), t.fiber());
  std::vector<int> perm(positions.size());
  std::iota(perm.begin(), perm.end(), 0);
  double count = 0;
  std::vector<int> src(static_cast<std::size_t>(r));
  do {
    const double sign = alternating ? permutation_sign(perm) : 1.0;
    count += 1;
    for_each_index(t.dim(), r, [&](std::vector<int>& idx) {
      src = idx;
      for (std::size_t k = 0; k < positions.size(); ++k)
        src[static_cast<std::size_t>(positions[k])] = idx[static_cast<std::size_t>(positions[static_cast<std::size_t>(perm[k])])];
      for (int f = 0; f < t.fiber(); ++f) {
        BasicJet<S> term = t.at(src, f);
        term *= S(sign);
        out.at(idx, f) += term;
      }
    });
  } while (std::next_permutation(perm.begin(), perm.end()));
  out *= S(1.0 / count);
  return out;
}

}  // namespace

template <class S>
BasicTensor<S>::BasicTensor(int n, std::vector<Variance> indices, double weight, int fiber)
    : n_(n), idx_(std::move(indices)), weight_(weight), fiber_(fiber) {
  if (n < 1) throw std::invalid_argument("tensor: dimension must be positive");
  if (fiber < 1) throw std::invalid_argument("tensor: fiber must be positive");
  std::size_t count = static_cast<std::size_t>(fiber);
  for (std::size_t k = 0; k < idx_.size(); ++k) count *= static_cast<std::size_t>(n);
  comp_.assign(count, jet_type(S{}));
}

template <class S>
int BasicTensor<S>::order() const {
  int r = kMaxJetOrder;
  for (const auto& c : comp_)
    if (!c.is_constant()) r = std::min(r, c.order());
  return r;
}

template <class S>
BasicTensor<S> BasicTensor<S>::truncated(int r) const {
  BasicTensor out = *this;
  for (auto& c : out.comp_) c = c.truncated(r);
  return out;
}

template <class S>
double BasicTensor<S>::max_value() const {
  double m = 0.0;
  for (const auto& c : comp_) m = std::max(m, std::abs(c.value()));
  return m;
}

template <class S>
BasicTensor<S>& BasicTensor<S>::operator+=(const BasicTensor& o) {
  if (o.comp_.size() != comp_.size()) throw std::invalid_argument("tensor: shape mismatch");
  for (std::size_t k = 0; k < comp_.size(); ++k) comp_[k] += o.comp_[k];
  return *this;
}

template <class S>
BasicTensor<S>& BasicTensor<S>::operator-=(const BasicTensor& o) {
  if (o.comp_.size() != comp_.size()) throw std::invalid_argument("tensor: shape mismatch");
  for (std::size_t k = 0; k < comp_.size(); ++k) comp_[k] -= o.comp_[k];
  return *this;
}

template <class S>
BasicTensor<S>& BasicTensor<S>::operator*=(S s) {
  for (auto& c : comp_) c *= s;
  return *this;
}

CTensor complexify(const Tensor& t) {
  CTensor out(t.dim(), t.indices(), t.weight(), t.fiber());
  for (std::size_t k = 0; k < t.size(); ++k) out.flat_at(k) = complexify(t.flat_at(k));
  return out;
}

template <class S>
std::vector<BasicJet<S>> invert(const std::vector<BasicJet<S>>& a, int n, BasicJet<S>* det) {
  const std::size_t N = static_cast<std::size_t>(n);
  if (a.size() != N * N) throw std::invalid_argument("invert: not a square matrix");
  std::vector<BasicJet<S>> m = a;
  std::vector<BasicJet<S>> inv(N * N, BasicJet<S>(S{}));
  for (std::size_t i = 0; i < N; ++i) inv[i * N + i] = BasicJet<S>(S{1});
  BasicJet<S> d(S{1});
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < N; ++r)
      if (std::abs(m[r * N + c].value()) > std::abs(m[piv * N + c].value())) piv = r;
    if (m[piv * N + c].value() == S{}) throw DomainError("singular matrix");
    if (piv != c) {
      for (std::size_t k = 0; k < N; ++k) {
        std::swap(m[piv * N + k], m[c * N + k]);
        std::swap(inv[piv * N + k], inv[c * N + k]);
      }
      d = -d;
    }
    const BasicJet<S> pivot = m[c * N + c];
    d *= pivot;
    const BasicJet<S> rp = reciprocal(pivot);
    for (std::size_t k = 0; k < N; ++k) {
      m[c * N + k] *= rp;
      inv[c * N + k] *= rp;
    }
    for (std::size_t r = 0; r < N; ++r) {
      if (r == c) continue;
      const BasicJet<S> f = m[r * N + c];
      if (f.is_constant() && f.value() == S{}) continue;
      for (std::size_t k = 0; k < N; ++k) {
        m[r * N + k].add_product(f, m[c * N + k], S{-1});
        inv[r * N + k].add_product(f, inv[c * N + k], S{-1});
      }
    }
  }
  if (det) *det = d;
  return inv;
}

std::array<int, 2> signature_of(const std::vector<double>& sym, int n, double tol) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = sym[static_cast<std::size_t>(i * n + j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::array<int, 2> pq{0, 0};
  for (int i = 0; i < n; ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev > tol * scale) ++pq[0];
    if (ev < -tol * scale) ++pq[1];
  }
  return pq;
}

MetricAtPoint MetricAtPoint::from_components(int n, const std::vector<Jet>& gab) {
  MetricAtPoint m;
  m.n = n;
  m.g = Tensor::covariant(n, 2, 2.0);
  m.ginv = Tensor(n, {Variance::Contra, Variance::Contra}, -2.0);
  std::vector<double> vals(gab.size());
  for (std::size_t k = 0; k < gab.size(); ++k) {
    m.g.flat_at(k) = gab[k];
    vals[k] = gab[k].value();
  }
  const auto inv = invert(gab, n, &m.det);
  for (std::size_t k = 0; k < inv.size(); ++k) m.ginv.flat_at(k) = inv[k];
  const auto pq = signature_of(vals, n);
  m.p = pq[0];
  m.q = pq[1];
  return m;
}

double MetricAtPoint::scale() const { return g.max_value(); }

template <class S>
BasicTensor<S> sym(const BasicTensor<S>& t, std::span<const int> positions) {
  return project(t, positions, false);
}

template <class S>
BasicTensor<S> asym(const BasicTensor<S>& t, std::span<const int> positions) {
  return project(t, positions, true);
}

template <class S>
BasicTensor<S> contract(const BasicTensor<S>& t, int i, int j, const MetricAtPoint& m) {
  const int r = t.rank();
  if (i < 0 || j < 0 || i >= r || j >= r || i == j) throw std::out_of_range("contract: index out of range");
  if (i > j) std::swap(i, j);
  std::vector<Variance> rest;
  for (int k = 0; k < r; ++k)
    if (k != i && k != j) rest.push_back(t.variance(k));
  double w = t.weight();
  const Tensor* pairing = nullptr;
  if (t.variance(i) == Variance::Co && t.variance(j) == Variance::Co) {
    pairing = &m.ginv;
    w -= 2.0;
  } else if (t.variance(i) == Variance::Contra && t.variance(j) == Variance::Contra) {
    pairing = &m.g;
    w += 2.0;
  }
  BasicTensor<S> out(t.dim(), rest, w, t.fiber());
  const int n = t.dim();
  std::vector<int> src(static_cast<std::size_t>(r));
  for_each_index(n, r - 2, [&](std::vector<int>& idx) {
    for (int f = 0; f < t.fiber(); ++f) {
      auto& acc = out.at(idx, f);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          if (!pairing && a != b) continue;
          std::size_t s = 0;
          for (int k = 0; k < r; ++k) {
            if (k == i) {
              src[static_cast<std::size_t>(k)] = a;
            } else if (k == j) {
              src[static_cast<std::size_t>(k)] = b;
            } else {
              src[static_cast<std::size_t>(k)] = idx[s++];
            }
          }
          if (pairing) {
            mac(acc, t.at(src, f), (*pairing)(a, b));
          } else {
            acc += t.at(src, f);
          }
        }
      }
    }
  });
  return out;
}

template <class S>
BasicTensor<S> tfs(const BasicTensor<S>& t, const MetricAtPoint& m) {
  if (t.rank() != 2 || t.variance(0) != t.variance(1))
    throw std::invalid_argument("tfs: needs two indices of equal variance");
  const int pos[2] = {0, 1};
  BasicTensor<S> s = sym(t, std::span<const int>(pos, 2));
  const bool co = t.variance(0) == Variance::Co;
  const Tensor& pair = co ? m.ginv : m.g;
  const Tensor& back = co ? m.g : m.ginv;
  const int n = t.dim();
  for (int f = 0; f < t.fiber(); ++f) {
    BasicJet<S> tr(S{});
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) mac(tr, s(a, b, f), pair(a, b));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) mac(s(a, b, f), tr, back(a, b), S(-1.0 / n));
  }
  return s;
}

template <class S>
BasicTensor<S> raise_lower(const BasicTensor<S>& t, int i, const MetricAtPoint& m) {
  const int r = t.rank();
  if (i < 0 || i >= r) throw std::out_of_range("raise_lower: index out of range");
  std::vector<Variance> idx = t.indices();
  const bool raising = idx[static_cast<std::size_t>(i)] == Variance::Co;
  idx[static_cast<std::size_t>(i)] = raising ? Variance::Contra : Variance::Co;
  BasicTensor<S> out(t.dim(), idx, t.weight() + (raising ? -2.0 : 2.0), t.fiber());
  const Tensor& mm = raising ? m.ginv : m.g;
  const int n = t.dim();
  std::vector<int> src(static_cast<std::size_t>(r));
  for_each_index(n, r, [&](std::vector<int>& id) {
    src = id;
    for (int f = 0; f < t.fiber(); ++f) {
      auto& acc = out.at(id, f);
      for (int b = 0; b < n; ++b) {
        src[static_cast<std::size_t>(i)] = b;
        mac(acc, t.at(src, f), mm(id[static_cast<std::size_t>(i)], b));
      }
    }
  });
  return out;
}

template class BasicTensor<double>;
template class BasicTensor<cplx>;
template std::vector<Jet> invert(const std::vector<Jet>&, int, Jet*);
template std::vector<CJet> invert(const std::vector<CJet>&, int, CJet*);
template Tensor sym(const Tensor&, std::span<const int>);
template CTensor sym(const CTensor&, std::span<const int>);
template Tensor asym(const Tensor&, std::span<const int>);
template CTensor asym(const CTensor&, std::span<const int>);
template Tensor contract(const Tensor&, int, int, const MetricAtPoint&);
template CTensor contract(const CTensor&, int, int, const MetricAtPoint&);
template Tensor tfs(const Tensor&, const MetricAtPoint&);
template CTensor tfs(const CTensor&, const MetricAtPoint&);
template Tensor raise_lower(const Tensor&, int, const MetricAtPoint&);
template CTensor raise_lower(const CTensor&, int, const MetricAtPoint&);

}  // namespace detour
