#include "asyncrev/model/joint.hpp"

#include <cmath>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/core/ops.hpp"
#include "asyncrev/kernels/reference.hpp"

namespace asyncrev {

template <typename T>
BasicTensor<T> joint(const BasicTensor<T>& enc_t, const BasicTensor<T>& pred_u,
                     const JointParams<T>& params) {
  if (enc_t.size() != params.w_enc.value.rows() || pred_u.size() != params.w_pred.value.rows())
    throw DimensionError("joint: input dimension mismatch");
  const std::size_t hidden_dim = params.bias.value.cols();
  auto hidden = BasicTensor<T>::matrix(1, hidden_dim);
  auto pred_part = BasicTensor<T>::matrix(1, hidden_dim);
  kernels::gemm_acc(1, enc_t.size(), hidden_dim, enc_t.data(), enc_t.size(),
                    params.w_enc.value.data(), hidden_dim, hidden.data(), hidden_dim);
  kernels::gemm_acc(1, pred_u.size(), hidden_dim, pred_u.data(), pred_u.size(),
                    params.w_pred.value.data(), hidden_dim, pred_part.data(), hidden_dim);
  kernels::add(hidden_dim, pred_part.data(), hidden.data());
  kernels::add(hidden_dim, params.bias.value.data(), hidden.data());
  for (auto& v : hidden.values()) v = std::tanh(v);
  const std::size_t out_dim = params.b_out.value.cols();
  auto logits = BasicTensor<T>::matrix(1, out_dim);
  matmul_acc(hidden, params.w_out.value, logits);
  kernels::add(out_dim, params.b_out.value.data(), logits.data());
  return logits;
}

template <typename T>
BasicTensor<T> joint_lattice(const BasicTensor<T>& enc, const BasicTensor<T>& pred,
                             const JointParams<T>& params, JointLatticeCache<T>* cache) {
  const std::size_t frames = enc.rows(), steps = pred.rows();
  const std::size_t hidden_dim = params.bias.value.cols();
  const std::size_t out_dim = params.b_out.value.cols();
  const auto enc_part = matmul(enc, params.w_enc.value);
  const auto pred_part = matmul(pred, params.w_pred.value);
  auto hidden = BasicTensor<T>::matrix(frames * steps, hidden_dim);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t u = 0; u < steps; ++u) {
      T* h = hidden.data() + (t * steps + u) * hidden_dim;
      const auto e = enc_part.row(t);
      std::copy(e.begin(), e.end(), h);
      kernels::add(hidden_dim, pred_part.data() + u * hidden_dim, h);
      kernels::add(hidden_dim, params.bias.value.data(), h);
    }
  }
  for (auto& v : hidden.values()) v = std::tanh(v);
  auto flat = BasicTensor<T>::matrix(frames * steps, out_dim);
  matmul_acc(hidden, params.w_out.value, flat);
  for (std::size_t r = 0; r < flat.rows(); ++r)
    kernels::add(out_dim, params.b_out.value.data(), flat.data() + r * out_dim);
  if (cache) {
    cache->enc = enc;
    cache->pred = pred;
    cache->hidden = std::move(hidden);
  }
  return BasicTensor<T>({frames, steps, out_dim},
                        std::vector<T>(flat.values().begin(), flat.values().end()));
}

template <typename T>
void joint_lattice_backward(JointParams<T>& params, const JointLatticeCache<T>& cache,
                            const BasicTensor<T>& d_logits, BasicTensor<T>& d_enc,
                            BasicTensor<T>& d_pred) {
  const std::size_t frames = cache.enc.rows(), steps = cache.pred.rows();
  const std::size_t hidden_dim = params.bias.value.cols();
  const std::size_t out_dim = params.b_out.value.cols();
  if (d_logits.size() != frames * steps * out_dim)
    throw DimensionError("joint_lattice_backward: gradient shape mismatch");
  const BasicTensor<T> dflat({frames * steps, out_dim},
                             std::vector<T>(d_logits.values().begin(), d_logits.values().end()));
  matmul_at_acc(cache.hidden, dflat, params.w_out.grad);
  for (std::size_t r = 0; r < dflat.rows(); ++r)
    kernels::add(out_dim, dflat.data() + r * out_dim, params.b_out.grad.data());
  auto dhidden = matmul(dflat, transpose(params.w_out.value));
  auto dpre = tanh_backward(cache.hidden, dhidden);

  auto d_enc_part = BasicTensor<T>::matrix(frames, hidden_dim);
  auto d_pred_part = BasicTensor<T>::matrix(steps, hidden_dim);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t u = 0; u < steps; ++u) {
      const T* g = dpre.data() + (t * steps + u) * hidden_dim;
      kernels::add(hidden_dim, g, d_enc_part.data() + t * hidden_dim);
      kernels::add(hidden_dim, g, d_pred_part.data() + u * hidden_dim);
      kernels::add(hidden_dim, g, params.bias.grad.data());
    }
  }
  matmul_at_acc(cache.enc, d_enc_part, params.w_enc.grad);
  matmul_at_acc(cache.pred, d_pred_part, params.w_pred.grad);
  d_enc = matmul(d_enc_part, transpose(params.w_enc.value));
  d_pred = matmul(d_pred_part, transpose(params.w_pred.value));
}

#define ASYNCREV_INSTANTIATE_JOINT(T)                                                 \
  template BasicTensor<T> joint(const BasicTensor<T>&, const BasicTensor<T>&,         \
                                const JointParams<T>&);                               \
  template BasicTensor<T> joint_lattice(const BasicTensor<T>&, const BasicTensor<T>&, \
                                        const JointParams<T>&, JointLatticeCache<T>*); \
  template void joint_lattice_backward(JointParams<T>&, const JointLatticeCache<T>&,  \
                                       const BasicTensor<T>&, BasicTensor<T>&,        \
                                       BasicTensor<T>&);

ASYNCREV_INSTANTIATE_JOINT(float)
ASYNCREV_INSTANTIATE_JOINT(double)

}  // namespace asyncrev
