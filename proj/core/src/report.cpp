#include "detour/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace detour {

CheckItem& CheckReport::add(const std::string& name, double res, double tol) {
  items.push_back({name, res, tol, std::isfinite(res) && res < tol});
  return items.back();
}

CheckItem& CheckReport::expect(const std::string& name, bool ok) {
  items.push_back({name, ok ? 0.0 : 1.0, 0.5, ok, true});
  return items.back();
}

void CheckReport::merge(const CheckReport& other, const std::string& prefix) {
  for (CheckItem it : other.items) {
    it.name = prefix + it.name;
    items.push_back(std::move(it));
  }
  for (const auto& [k, v] : other.measured) measured[prefix + k] = v;
  for (const auto& n : other.notes) notes.push_back(n);
}

bool CheckReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass; });
}

double CheckReport::max_residual() const {
  double m = 0.0;
  for (const auto& i : items) m = std::max(m, i.residual);
  return m;
}

template <class S>
double residual(const BasicTensor<S>& a, const BasicTensor<S>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("residual: shape mismatch");
  double diff = 0.0, scale = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const S x = a.flat_at(k).value(), y = b.flat_at(k).value();
    diff = std::max(diff, std::abs(x - y));
    scale = std::max({scale, std::abs(x), std::abs(y)});
  }
  return diff / scale;
}

template <class S>
double residual(const BasicJet<S>& a, const BasicJet<S>& b) {
  const S x = a.value(), y = b.value();
  return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

template double residual(const Tensor&, const Tensor&);
template double residual(const CTensor&, const CTensor&);
template double residual(const Jet&, const Jet&);
template double residual(const CJet&, const CJet&);

}  // namespace detour
