#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace asyncrev {

// Segment boundaries over input frames [0, T). Segment k is
// [boundaries[k-1], boundaries[k]). Right taps may not cross a boundary;
// left taps (forward connections) always may.
struct CropMask {
  std::vector<int> boundaries;

  // Number of boundaries <= frame.
  std::size_t segment_of(long frame) const;

  // Throws ConfigError unless boundaries are strictly increasing in (0, T).
  void validate(int num_frames) const;

  bool operator==(const CropMask&) const = default;
};

// Right-tap gate at one layer: (anchor, tap) positions at that layer's input
// rate, tap > anchor. An empty gate keeps every tap.
using TapGate = std::function<bool(long anchor, long tap)>;

// Gate for a layer whose input position q corresponds to input frame
// q * in_stride. The mask must outlive the gate.
TapGate crop_gate(const CropMask& mask, int in_stride);

}  // namespace asyncrev
