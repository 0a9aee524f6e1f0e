#include "asyncrev/training/metrics.hpp"

#include <algorithm>
#include <vector>

namespace asyncrev {

std::size_t edit_distance(std::span<const int> ref, std::span<const int> hyp) {
  std::vector<std::size_t> prev(hyp.size() + 1), cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

double cer(std::span<const int> ref, std::span<const int> hyp) {
  const double d = static_cast<double>(edit_distance(ref, hyp));
  return ref.empty() ? d : d / static_cast<double>(ref.size());
}

}  // namespace asyncrev
