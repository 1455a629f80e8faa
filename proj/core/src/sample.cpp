#include "detour/sample.hpp"

#include <stdexcept>

namespace detour {

std::vector<Point> SamplePlan::points() const {
  if (box.empty()) throw std::invalid_argument("sample plan: empty box");
  if (count < 0) throw std::invalid_argument("sample plan: negative count");
  Rng rng(seed);
  std::vector<Point> out;
  const int max_attempts = 1000 * (count + 1);
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count; ++attempt) {
    Point p(box.size());
    for (std::size_t k = 0; k < box.size(); ++k) p[k] = rng.uniform(box[k].first, box[k].second);
    bool keep = true;
    for (const auto& ex : exclusions) {
      if (ex(p)) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(std::move(p));
  }
  if (static_cast<int>(out.size()) < count)
    throw std::runtime_error("sample plan: exclusions reject too many candidates");
  return out;
}

}  // namespace detour
