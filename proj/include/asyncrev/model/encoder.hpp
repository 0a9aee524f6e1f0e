#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "asyncrev/core/parameter.hpp"
#include "asyncrev/model/config.hpp"
#include "asyncrev/model/crop_mask.hpp"

namespace asyncrev {

// out_s = ReLU(bias + sum_{o=-left..right} x_{stride*s + o} W_o); the taps are
// stacked into one [(left + 1 + right) * in_dim x out_dim] weight.
template <typename T>
struct SubsamplerParams {
  Parameter<T> weight;
  Parameter<T> bias;  // [1 x out_dim]
};

// h_t = ReLU(x_t W_h + b_h)
// p_t = h_t W_p
// y_t = x_t + p_t + sum_i a_i * p_{t-i} + sum_j gate(t, j) c_j * p_{t+j}
// Absent p (sequence edge, unavailable frame, gated tap) contributes nothing.
template <typename T>
struct MemoryLayerParams {
  Parameter<T> w_hidden;    // [d x hidden]
  Parameter<T> b_hidden;    // [1 x hidden]
  Parameter<T> w_proj;      // [hidden x d]
  Parameter<T> left_coef;   // [left_taps x d], row i-1 holds a_i
  Parameter<T> right_coef;  // [right_taps x d], row j-1 holds c_j
};

template <typename T>
struct EncoderParams {
  std::vector<SubsamplerParams<T>> subsamplers;
  std::vector<MemoryLayerParams<T>> memory_layers;
};

// Backward caches, filled by the full-sequence forward.
template <typename T>
struct SubsampleCache {
  BasicTensor<T> window;          // [n_out x K*in_dim]
  BasicTensor<T> out;             // post-ReLU
  std::vector<long> source;       // [n_out * K], input row or -1
  std::size_t in_rows = 0;
};

template <typename T>
struct MemoryCache {
  BasicTensor<T> x;
  BasicTensor<T> h;               // post-ReLU
  BasicTensor<T> p;
  std::vector<std::uint8_t> right_used;  // [n * right_taps]
};

template <typename T>
struct EncoderCache {
  std::vector<SubsampleCache<T>> subsamplers;
  std::vector<MemoryCache<T>> memory_layers;
};

// Range forwards. `input` rows hold layer-input positions
// [in_lo, in_lo + input.rows()); any other position is absent. Outputs are
// produced for positions [out_begin, out_end). in_lo must not cut off real
// left context (in_lo <= max(0, first position any output reads)).
template <typename T>
BasicTensor<T> subsample_range(const BasicTensor<T>& input, long in_lo,
                               long out_begin, long out_end,
                               const LayerContext& ctx,
                               const SubsamplerParams<T>& params,
                               const TapGate& gate,
                               SubsampleCache<T>* cache = nullptr);

template <typename T>
BasicTensor<T> memory_range(const BasicTensor<T>& input, long in_lo,
                            long out_begin, long out_end,
                            const LayerContext& ctx,
                            const MemoryLayerParams<T>& params,
                            const TapGate& gate,
                            MemoryCache<T>* cache = nullptr);

// Whole-sequence forms. subsample_forward returns ceil(T / stride) rows.
template <typename T>
BasicTensor<T> subsample_forward(const BasicTensor<T>& frames,
                                 const LayerContext& ctx,
                                 const SubsamplerParams<T>& params,
                                 const TapGate& gate = {});

template <typename T>
BasicTensor<T> memory_layer_forward(const BasicTensor<T>& x,
                                    const LayerContext& ctx,
                                    const MemoryLayerParams<T>& params,
                                    const TapGate& gate = {});

// Subsamplers then memory layers. With a crop mask, right taps that cross a
// segment boundary are dropped at every layer.
template <typename T>
BasicTensor<T> encoder_forward(const BasicTensor<T>& features,
                               const EncoderConfig& cfg,
                               const EncoderParams<T>& params,
                               const CropMask* crop = nullptr,
                               EncoderCache<T>* cache = nullptr);

// Accumulates parameter gradients given d(loss)/d(encoder output).
template <typename T>
void encoder_backward(const EncoderConfig& cfg, EncoderParams<T>& params,
                      const EncoderCache<T>& cache, const BasicTensor<T>& d_out);

// Output rows of a layer with `stride` given `n_in` input rows.
inline long strided_length(long n_in, int stride) {
  return (n_in + stride - 1) / stride;
}

}  // namespace asyncrev
