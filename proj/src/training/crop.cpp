#include "asyncrev/training/crop.hpp"

#include <algorithm>
#include <vector>

#include "asyncrev/core/errors.hpp"

namespace asyncrev {

CropMask sample_crop(int num_frames, int k, SeededRng& rng, int min_segment) {
  if (k < 1) throw ConfigError("sample_crop: k must be at least 1");
  if (min_segment < 1) throw ConfigError("sample_crop: min_segment must be at least 1");
  k = std::min(k, std::max(1, num_frames / min_segment));
  CropMask mask;
  if (k == 1) return mask;

  // Stars and bars: segment lengths are min_segment + e_i with sum(e) = slack.
  // Sorted distinct picks v from [0, slack + k - 2] map one-to-one onto the
  // non-decreasing prefix sums w_i = v_i - i, so every split is equally likely.
  const int slack = num_frames - k * min_segment;
  const auto pool = static_cast<std::uint64_t>(slack + k - 1);
  std::vector<int> picks;
  while (picks.size() < static_cast<std::size_t>(k - 1)) {
    const int v = static_cast<int>(rng.below(pool));
    if (std::find(picks.begin(), picks.end(), v) == picks.end()) picks.push_back(v);
  }
  std::sort(picks.begin(), picks.end());
  for (int i = 0; i < k - 1; ++i)
    mask.boundaries.push_back(picks[i] - i + (i + 1) * min_segment);
  return mask;
}

}  // namespace asyncrev
