#include "asyncrev/model/encoder.hpp"

#include <algorithm>
#include <string>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/core/ops.hpp"
#include "asyncrev/kernels/reference.hpp"

namespace asyncrev {
namespace {

template <typename T>
void check_cols(const BasicTensor<T>& t, std::size_t cols, const char* what) {
  if (t.rank() != 2 || t.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " +
                         std::to_string(cols) + " columns, got shape " +
                         shape_string(t.shape()));
  }
}

template <typename T>
void check_left_reach(long in_lo, long first_read, const char* what) {
  if (in_lo > std::max(0L, first_read)) {
    throw DimensionError(std::string(what) +
                         ": input window starts after required left context");
  }
}

}  // namespace

template <typename T>
BasicTensor<T> subsample_range(const BasicTensor<T>& input, long in_lo,
                               long out_begin, long out_end,
                               const LayerContext& ctx,
                               const SubsamplerParams<T>& params,
                               const TapGate& gate, SubsampleCache<T>* cache) {
  const std::size_t taps = static_cast<std::size_t>(ctx.left_taps + 1 + ctx.right_taps);
  const std::size_t out_dim = params.bias.value.cols();
  if (params.weight.value.rank() != 2 || params.weight.value.rows() % taps != 0)
    throw DimensionError("subsampler: weight rows not a multiple of window size");
  const std::size_t in_dim = params.weight.value.rows() / taps;
  check_cols(input, in_dim, "subsampler input");
  if (out_end < out_begin) throw DimensionError("subsampler: negative output range");
  check_left_reach<T>(in_lo, out_begin * ctx.stride - ctx.left_taps, "subsampler");

  const long in_hi = in_lo + static_cast<long>(input.rows());
  const std::size_t n = static_cast<std::size_t>(out_end - out_begin);
  auto window = BasicTensor<T>::matrix(n, taps * in_dim);
  std::vector<long> source(n * taps, -1);
  for (std::size_t r = 0; r < n; ++r) {
    const long anchor = (out_begin + static_cast<long>(r)) * ctx.stride;
    for (std::size_t k = 0; k < taps; ++k) {
      const long offset = static_cast<long>(k) - ctx.left_taps;
      const long q = anchor + offset;
      if (q < in_lo || q >= in_hi || q < 0) continue;
      if (offset > 0 && gate && !gate(anchor, q)) continue;
      const auto src = input.row(static_cast<std::size_t>(q - in_lo));
      std::copy(src.begin(), src.end(), window.data() + r * taps * in_dim + k * in_dim);
      source[r * taps + k] = q - in_lo;
    }
  }

  auto out = BasicTensor<T>::matrix(n, out_dim);
  for (std::size_t r = 0; r < n; ++r) {
    const auto b = params.bias.value.row(0);
    std::copy(b.begin(), b.end(), out.row(r).begin());
  }
  matmul_acc(window, params.weight.value, out);
  for (auto& v : out.values()) v = v > T{0} ? v : T{0};

  if (cache) {
    cache->window = std::move(window);
    cache->out = out;
    cache->source = std::move(source);
    cache->in_rows = input.rows();
  }
  return out;
}

template <typename T>
BasicTensor<T> memory_range(const BasicTensor<T>& input, long in_lo,
                            long out_begin, long out_end,
                            const LayerContext& ctx,
                            const MemoryLayerParams<T>& params,
                            const TapGate& gate, MemoryCache<T>* cache) {
  const std::size_t d = params.w_hidden.value.rows();
  const std::size_t hidden = params.w_hidden.value.cols();
  check_cols(input, d, "memory layer input");
  if (params.left_coef.value.rows() != static_cast<std::size_t>(ctx.left_taps) ||
      params.right_coef.value.rows() != static_cast<std::size_t>(ctx.right_taps)) {
    throw DimensionError("memory layer: tap coefficient count does not match context");
  }
  const long in_hi = in_lo + static_cast<long>(input.rows());
  if (out_begin < in_lo || out_end > in_hi || out_end < out_begin)
    throw DimensionError("memory layer: output range outside input range");
  check_left_reach<T>(in_lo, out_begin - ctx.left_taps, "memory layer");

  const long p_lo = std::max(in_lo, out_begin - ctx.left_taps);
  const long p_hi = std::min(in_hi, out_end + ctx.right_taps);
  const auto x_rows = input.slice_rows(static_cast<std::size_t>(p_lo - in_lo),
                                       static_cast<std::size_t>(p_hi - in_lo));
  auto h = BasicTensor<T>::matrix(x_rows.rows(), hidden);
  for (std::size_t r = 0; r < h.rows(); ++r) {
    const auto b = params.b_hidden.value.row(0);
    std::copy(b.begin(), b.end(), h.row(r).begin());
  }
  matmul_acc(x_rows, params.w_hidden.value, h);
  for (auto& v : h.values()) v = v > T{0} ? v : T{0};
  const auto p = matmul(h, params.w_proj.value);

  const std::size_t n = static_cast<std::size_t>(out_end - out_begin);
  auto y = BasicTensor<T>::matrix(n, d);
  std::vector<std::uint8_t> right_used(n * static_cast<std::size_t>(ctx.right_taps), 0);
  auto p_row = [&](long pos) { return p.data() + (pos - p_lo) * static_cast<long>(d); };
  for (std::size_t r = 0; r < n; ++r) {
    const long t = out_begin + static_cast<long>(r);
    T* yr = y.data() + r * d;
    const auto xr = input.row(static_cast<std::size_t>(t - in_lo));
    std::copy(xr.begin(), xr.end(), yr);
    kernels::add(d, p_row(t), yr);
    for (int i = 1; i <= ctx.left_taps; ++i) {
      if (t - i < p_lo) break;
      kernels::mul_acc(d, params.left_coef.value.data() + (i - 1) * d, p_row(t - i), yr);
    }
    for (int j = 1; j <= ctx.right_taps; ++j) {
      if (t + j >= p_hi) break;
      if (gate && !gate(t, t + j)) continue;
      kernels::mul_acc(d, params.right_coef.value.data() + (j - 1) * d, p_row(t + j), yr);
      right_used[r * ctx.right_taps + (j - 1)] = 1;
    }
  }

  if (cache) {
    cache->x = x_rows;
    cache->h = std::move(h);
    cache->p = p;
    cache->right_used = std::move(right_used);
  }
  return y;
}

template <typename T>
BasicTensor<T> subsample_forward(const BasicTensor<T>& frames,
                                 const LayerContext& ctx,
                                 const SubsamplerParams<T>& params,
                                 const TapGate& gate) {
  if (frames.rows() == 0) throw DimensionError("subsample_forward: empty input");
  const long n_out = strided_length(static_cast<long>(frames.rows()), ctx.stride);
  return subsample_range(frames, 0, 0, n_out, ctx, params, gate);
}

template <typename T>
BasicTensor<T> memory_layer_forward(const BasicTensor<T>& x,
                                    const LayerContext& ctx,
                                    const MemoryLayerParams<T>& params,
                                    const TapGate& gate) {
  return memory_range(x, 0, 0, static_cast<long>(x.rows()), ctx, params, gate);
}

template <typename T>
BasicTensor<T> encoder_forward(const BasicTensor<T>& features,
                               const EncoderConfig& cfg,
                               const EncoderParams<T>& params,
                               const CropMask* crop, EncoderCache<T>* cache) {
  if (features.rows() == 0) throw DimensionError("encoder_forward: empty input");
  check_cols(features, static_cast<std::size_t>(cfg.feature_dim), "encoder features");
  if (crop) crop->validate(static_cast<int>(features.rows()));
  if (params.subsamplers.size() != cfg.subsamplers.size() ||
      params.memory_layers.size() != cfg.memory_layers.size())
    throw DimensionError("encoder_forward: parameter/config layer count mismatch");
  if (cache) {
    cache->subsamplers.assign(cfg.subsamplers.size(), {});
    cache->memory_layers.assign(cfg.memory_layers.size(), {});
  }

  BasicTensor<T> x = features;
  std::size_t sub_i = 0, mem_i = 0;
  for (const auto& layer : layer_plan(cfg)) {
    const TapGate gate = crop ? crop_gate(*crop, layer.in_stride) : TapGate{};
    const long n_in = static_cast<long>(x.rows());
    if (layer.kind == LayerKind::kSubsample) {
      const long n_out = strided_length(n_in, layer.context.stride);
      x = subsample_range(x, 0, 0, n_out, layer.context, params.subsamplers[sub_i], gate,
                          cache ? &cache->subsamplers[sub_i] : nullptr);
      ++sub_i;
    } else {
      x = memory_range(x, 0, 0, n_in, layer.context, params.memory_layers[mem_i], gate,
                       cache ? &cache->memory_layers[mem_i] : nullptr);
      ++mem_i;
    }
  }
  return x;
}

namespace {

template <typename T>
BasicTensor<T> memory_backward(const LayerContext& ctx, MemoryLayerParams<T>& params,
                               const MemoryCache<T>& cache, const BasicTensor<T>& dy) {
  const std::size_t n = dy.rows();
  const std::size_t d = dy.cols();
  BasicTensor<T> dx = dy;
  BasicTensor<T> dp = dy;
  for (std::size_t t = 0; t < n; ++t) {
    const T* dyt = dy.data() + t * d;
    for (int i = 1; i <= ctx.left_taps; ++i) {
      if (static_cast<long>(t) - i < 0) break;
      const std::size_t s = t - static_cast<std::size_t>(i);
      kernels::mul_acc(d, params.left_coef.value.data() + (i - 1) * d, dyt, dp.data() + s * d);
      kernels::mul_acc(d, dyt, cache.p.data() + s * d, params.left_coef.grad.data() + (i - 1) * d);
    }
    for (int j = 1; j <= ctx.right_taps; ++j) {
      if (!cache.right_used[t * ctx.right_taps + (j - 1)]) continue;
      const std::size_t s = t + static_cast<std::size_t>(j);
      kernels::mul_acc(d, params.right_coef.value.data() + (j - 1) * d, dyt, dp.data() + s * d);
      kernels::mul_acc(d, dyt, cache.p.data() + s * d, params.right_coef.grad.data() + (j - 1) * d);
    }
  }
  matmul_at_acc(cache.h, dp, params.w_proj.grad);
  auto dh = matmul(dp, transpose(params.w_proj.value));
  auto dpre = relu_backward(cache.h, dh);
  matmul_at_acc(cache.x, dpre, params.w_hidden.grad);
  for (std::size_t t = 0; t < n; ++t)
    kernels::add(dpre.cols(), dpre.data() + t * dpre.cols(), params.b_hidden.grad.data());
  matmul_acc(dpre, transpose(params.w_hidden.value), dx);
  return dx;
}

template <typename T>
BasicTensor<T> subsample_backward(SubsamplerParams<T>& params,
                                  const SubsampleCache<T>& cache,
                                  const BasicTensor<T>& dout) {
  auto dpre = relu_backward(cache.out, dout);
  matmul_at_acc(cache.window, dpre, params.weight.grad);
  for (std::size_t r = 0; r < dpre.rows(); ++r)
    kernels::add(dpre.cols(), dpre.data() + r * dpre.cols(), params.bias.grad.data());
  const auto dwindow = matmul(dpre, transpose(params.weight.value));
  const std::size_t taps = cache.source.size() / std::max<std::size_t>(dpre.rows(), 1);
  const std::size_t in_dim = taps ? dwindow.cols() / taps : 0;
  auto dx = BasicTensor<T>::matrix(cache.in_rows, in_dim);
  for (std::size_t r = 0; r < dpre.rows(); ++r) {
    for (std::size_t k = 0; k < taps; ++k) {
      const long src = cache.source[r * taps + k];
      if (src < 0) continue;
      kernels::add(in_dim, dwindow.data() + r * dwindow.cols() + k * in_dim,
                   dx.data() + static_cast<std::size_t>(src) * in_dim);
    }
  }
  return dx;
}

}  // namespace

template <typename T>
void encoder_backward(const EncoderConfig& cfg, EncoderParams<T>& params,
                      const EncoderCache<T>& cache, const BasicTensor<T>& d_out) {
  BasicTensor<T> grad = d_out;
  for (std::size_t i = cfg.memory_layers.size(); i-- > 0;)
    grad = memory_backward(cfg.memory_layers[i], params.memory_layers[i],
                           cache.memory_layers[i], grad);
  for (std::size_t i = cfg.subsamplers.size(); i-- > 0;)
    grad = subsample_backward(params.subsamplers[i], cache.subsamplers[i], grad);
}

#define ASYNCREV_INSTANTIATE_ENCODER(T)                                          \
  template BasicTensor<T> subsample_range(const BasicTensor<T>&, long, long, long, \
                                          const LayerContext&,                   \
                                          const SubsamplerParams<T>&,            \
                                          const TapGate&, SubsampleCache<T>*);   \
  template BasicTensor<T> memory_range(const BasicTensor<T>&, long, long, long,  \
                                       const LayerContext&,                      \
                                       const MemoryLayerParams<T>&,              \
                                       const TapGate&, MemoryCache<T>*);         \
  template BasicTensor<T> subsample_forward(const BasicTensor<T>&,               \
                                            const LayerContext&,                 \
                                            const SubsamplerParams<T>&,          \
                                            const TapGate&);                     \
  template BasicTensor<T> memory_layer_forward(const BasicTensor<T>&,            \
                                               const LayerContext&,              \
                                               const MemoryLayerParams<T>&,      \
                                               const TapGate&);                  \
  template BasicTensor<T> encoder_forward(const BasicTensor<T>&,                 \
                                          const EncoderConfig&,                  \
                                          const EncoderParams<T>&,               \
                                          const CropMask*, EncoderCache<T>*);    \
  template void encoder_backward(const EncoderConfig&, EncoderParams<T>&,        \
                                 const EncoderCache<T>&, const BasicTensor<T>&);

ASYNCREV_INSTANTIATE_ENCODER(float)
ASYNCREV_INSTANTIATE_ENCODER(double)

}  // namespace asyncrev
