#pragma once

#include <vector>

#include "asyncrev/model/encoder.hpp"
#include "asyncrev/model/model.hpp"

namespace asyncrev::testutil {

// Independent reference for a cropped forward: process the segments one after
// another, layer by layer. Each segment sees every earlier segment's frozen
// activations as history and nothing past its own last frame, using only the
// ungated range forwards.
inline Tensor frozen_history_oracle(const Tensor& features, const Model& m,
                                    const CropMask& mask) {
  const auto plan = layer_plan(m.config.encoder);
  const long t = static_cast<long>(features.rows());
  std::vector<long> edges{0};
  for (int b : mask.boundaries) edges.push_back(b);
  edges.push_back(t);

  std::vector<std::vector<Tensor>> pieces(plan.size());
  auto stacked = [&](std::size_t l) {
    return concat_rows<float>(pieces[l], static_cast<std::size_t>(plan[l].out_dim));
  };
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    std::size_t sub_i = 0, mem_i = 0;
    for (std::size_t l = 0; l < plan.size(); ++l) {
      const auto& layer = plan[l];
      const long avail = strided_length(edges[k + 1], layer.in_stride);
      const Tensor history = l == 0 ? features : stacked(l - 1);
      const Tensor input = history.slice_rows(0, static_cast<std::size_t>(avail));
      const long ob = strided_length(edges[k], layer.out_stride);
      const long oe = strided_length(edges[k + 1], layer.out_stride);
      if (layer.kind == LayerKind::kSubsample) {
        pieces[l].push_back(subsample_range(input, 0, ob, oe, layer.context,
                                            m.params.encoder.subsamplers[sub_i++], TapGate{}));
      } else {
        pieces[l].push_back(memory_range(input, 0, ob, oe, layer.context,
                                         m.params.encoder.memory_layers[mem_i++], TapGate{}));
      }
    }
  }
  return stacked(plan.size() - 1);
}

inline CropMask random_mask(SeededRng& rng, int t) {
  CropMask mask;
  for (int f = 1; f < t; ++f)
    if (rng.below(6) == 0) mask.boundaries.push_back(f);
  return mask;
}

inline bool bit_equal(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

}  // namespace asyncrev::testutil
