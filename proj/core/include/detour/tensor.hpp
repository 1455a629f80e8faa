#pragma once

#include <array>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "detour/jet.hpp"

namespace detour {

enum class Variance : std::uint8_t { Co, Contra };

// Dense components at a point.  Manifold indices are positional and
// row-major; an optional trailing fiber axis carries bundle components.
// The conformal weight is declared metadata and only changes where an
// operation documents it.
template <class S>
class BasicTensor {
 public:
  using jet_type = BasicJet<S>;

  BasicTensor() = default;
  BasicTensor(int n, std::vector<Variance> indices, double weight = 0.0, int fiber = 1);
  static BasicTensor covariant(int n, int rank, double weight = 0.0, int fiber = 1) {
    return BasicTensor(n, std::vector<Variance>(static_cast<std::size_t>(rank), Variance::Co), weight, fiber);
  }

  int dim() const { return n_; }
  int rank() const { return static_cast<int>(idx_.size()); }
  int fiber() const { return fiber_; }
  double weight() const { return weight_; }
  void set_weight(double w) { weight_ = w; }
  Variance variance(int i) const { return idx_[static_cast<std::size_t>(i)]; }
  const std::vector<Variance>& indices() const { return idx_; }
  std::size_t size() const { return comp_.size(); }

  std::size_t offset(std::span<const int> idx, int f = 0) const {
    std::size_t o = 0;
    for (int i : idx) o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    return o * static_cast<std::size_t>(fiber_) + static_cast<std::size_t>(f);
  }
  jet_type& at(std::span<const int> idx, int f = 0) { return comp_[offset(idx, f)]; }
  const jet_type& at(std::span<const int> idx, int f = 0) const { return comp_[offset(idx, f)]; }

  // Manifold indices, then the fiber index when the tensor has a fiber.
  template <class... I>
  jet_type& operator()(I... i) {
    const std::array<int, sizeof...(I)> a{static_cast<int>(i)...};
    return comp_[flat(a)];
  }
  template <class... I>
  const jet_type& operator()(I... i) const {
    const std::array<int, sizeof...(I)> a{static_cast<int>(i)...};
    return comp_[flat(a)];
  }

  jet_type& flat_at(std::size_t k) { return comp_[k]; }
  const jet_type& flat_at(std::size_t k) const { return comp_[k]; }
  std::vector<jet_type>& data() { return comp_; }
  const std::vector<jet_type>& data() const { return comp_; }

  // Smallest jet order over the components (constants excluded).
  int order() const;
  BasicTensor truncated(int r) const;
  // Largest |value| over components.
  double max_value() const;

  BasicTensor& operator+=(const BasicTensor& o);
  BasicTensor& operator-=(const BasicTensor& o);
  BasicTensor& operator*=(S s);

 private:
  template <std::size_t K>
  std::size_t flat(const std::array<int, K>& a) const {
    const std::size_t r = idx_.size();
    std::size_t o = 0;
    for (std::size_t k = 0; k < r; ++k) o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a[k]);
    o *= static_cast<std::size_t>(fiber_);
    if (K > r) o += static_cast<std::size_t>(a[r]);
    return o;
  }

  int n_ = 0;
  std::vector<Variance> idx_;
  double weight_ = 0.0;
  int fiber_ = 1;
  std::vector<jet_type> comp_;
};

using Tensor = BasicTensor<double>;
using CTensor = BasicTensor<cplx>;

template <class S>
BasicTensor<S> operator+(BasicTensor<S> a, const BasicTensor<S>& b) { return a += b; }
template <class S>
BasicTensor<S> operator-(BasicTensor<S> a, const BasicTensor<S>& b) { return a -= b; }
template <class S>
BasicTensor<S> operator*(S s, BasicTensor<S> a) { return a *= s; }

CTensor complexify(const Tensor& t);

// Metric, inverse and determinant as jets at a point.
struct MetricAtPoint {
  int n = 0;
  int p = 0, q = 0;  // signature: p positive, q negative
  Tensor g;          // (Co, Co), weight 2
  Tensor ginv;       // (Contra, Contra), weight -2
  Jet det;

  // Throws DomainError when the value matrix is singular.
  static MetricAtPoint from_components(int n, const std::vector<Jet>& gab);
  double scale() const;  // largest |g_ab(p)|
};

// Calls f(idx) for every multi-index in [0,n)^rank, row-major.
void for_each_index(int n, int rank, const std::function<void(std::vector<int>&)>& f);

// Inverse and determinant of a square jet matrix by Gauss-Jordan with
// partial pivoting on constant terms.
template <class S>
std::vector<BasicJet<S>> invert(const std::vector<BasicJet<S>>& a, int n, BasicJet<S>* det = nullptr);

// Counts (positive, negative) eigenvalues of a symmetric matrix.
std::array<int, 2> signature_of(const std::vector<double>& sym, int n, double tol = 1e-12);

// Projection over the listed index positions with 1/|S|! normalisation.
template <class S>
BasicTensor<S> sym(const BasicTensor<S>& t, std::span<const int> positions);
template <class S>
BasicTensor<S> asym(const BasicTensor<S>& t, std::span<const int> positions);
// Trace over positions i, j.  Pairing two covariant indices through the
// inverse metric lowers the weight by 2; two contravariant indices through
// the metric raise it by 2; mixed pairs leave it unchanged.
template <class S>
BasicTensor<S> contract(const BasicTensor<S>& t, int i, int j, const MetricAtPoint& m);
// Trace-free symmetric part of a rank-2 tensor with equal variances.
template <class S>
BasicTensor<S> tfs(const BasicTensor<S>& t, const MetricAtPoint& m);
// Lowering adds 2 to the weight, raising subtracts 2.
template <class S>
BasicTensor<S> raise_lower(const BasicTensor<S>& t, int i, const MetricAtPoint& m);

extern template class BasicTensor<double>;
extern template class BasicTensor<cplx>;

}  // namespace detour
