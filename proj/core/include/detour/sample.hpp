#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "detour/expr.hpp"

namespace detour {

// mt19937_64 words mapped to [0,1) by their top 53 bits.  The engine's output
// is fixed by the standard; the library distributions are not, so they are
// avoided to keep sequences identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

struct SamplePlan {
  std::uint64_t seed = 1;
  int count = 5;
  std::vector<std::pair<double, double>> box;
  // A candidate is dropped when any predicate returns true.
  std::vector<std::function<bool(const Point&)>> exclusions;

  std::vector<Point> points() const;
};

}  // namespace detour
