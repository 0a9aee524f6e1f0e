#pragma once

#include "asyncrev/core/rng.hpp"
#include "asyncrev/model/crop_mask.hpp"

namespace asyncrev {

inline constexpr int kDefaultMinSegment = 8;

// Splits [0, num_frames) into k segments of at least min_segment frames,
// uniformly over all such splits. k = 1 gives an empty mask. When the
// utterance is too short for k segments, the largest feasible k is used.
// Throws ConfigError for k < 1 or min_segment < 1.
CropMask sample_crop(int num_frames, int k, SeededRng& rng,
                     int min_segment = kDefaultMinSegment);

}  // namespace asyncrev
