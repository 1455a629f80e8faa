#pragma once

#include <map>
#include <string>
#include <vector>

#include "detour/tensor.hpp"

namespace detour {

struct CheckItem {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool verdict = false;  // boolean expectation; the tolerance is nominal
};

// Outcome of one identity check at one point.
struct CheckReport {
  std::string suite;
  std::string fixture;
  int point_index = -1;
  std::vector<CheckItem> items;
  std::map<std::string, double> measured;
  std::vector<std::string> notes;

  // Records residual < tolerance; NaN always fails.
  CheckItem& add(const std::string& name, double residual, double tolerance);
  // Records a boolean verdict as residual 0 (true) or 1 (false).
  CheckItem& expect(const std::string& name, bool ok);
  void merge(const CheckReport& other, const std::string& prefix = "");
  bool pass() const;
  double max_residual() const;
};

// max |a - b| over component values, divided by max(1, max |a|, max |b|).
template <class S>
double residual(const BasicTensor<S>& a, const BasicTensor<S>& b);
template <class S>
double residual(const BasicJet<S>& a, const BasicJet<S>& b);
// max |a| over component values.
template <class S>
double magnitude(const BasicTensor<S>& a) {
  return a.max_value();
}

}  // namespace detour
