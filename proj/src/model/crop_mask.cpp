#include "asyncrev/model/crop_mask.hpp"

#include <algorithm>
#include <string>

#include "asyncrev/core/errors.hpp"

namespace asyncrev {

std::size_t CropMask::segment_of(long frame) const {
  return static_cast<std::size_t>(
      std::upper_bound(boundaries.begin(), boundaries.end(), frame) -
      boundaries.begin());
}

void CropMask::validate(int num_frames) const {
  int prev = 0;
  for (int b : boundaries) {
    if (b <= prev || b >= num_frames) {
      throw ConfigError("crop mask boundary " + std::to_string(b) +
                        " not strictly increasing within (0, " +
                        std::to_string(num_frames) + ")");
    }
    prev = b;
  }
}

TapGate crop_gate(const CropMask& mask, int in_stride) {
  if (mask.boundaries.empty()) return {};
  return [&mask, in_stride](long anchor, long tap) {
    return mask.segment_of(anchor * in_stride) == mask.segment_of(tap * in_stride);
  };
}

}  // namespace asyncrev
