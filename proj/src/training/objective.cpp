#include "asyncrev/training/objective.hpp"

#include "asyncrev/transducer/rnnt_loss.hpp"

namespace asyncrev {

template <typename T>
double utterance_objective(BasicModel<T>& model, const BasicTensor<T>& features,
                           std::span<const int> labels, const CropMask* crop,
                           bool accumulate_grad) {
  const auto& cfg = model.config;
  auto& params = model.params;
  EncoderCache<T> enc_cache;
  PredSequenceCache<T> pred_cache;
  JointLatticeCache<T> joint_cache;
  auto* ec = accumulate_grad ? &enc_cache : nullptr;
  auto* pc = accumulate_grad ? &pred_cache : nullptr;
  auto* jc = accumulate_grad ? &joint_cache : nullptr;

  const auto enc = encoder_forward(features, cfg.encoder, params.encoder, crop, ec);
  const auto pred = prediction_forward(labels, cfg.prediction, params.prediction, pc);
  const auto lattice = joint_lattice(enc, pred, params.joint, jc);
  auto loss = rnnt_loss(lattice, labels);
  if (!accumulate_grad) return loss.nll;

  BasicTensor<T> d_enc, d_pred;
  joint_lattice_backward(params.joint, joint_cache, loss.grad, d_enc, d_pred);
  encoder_backward(cfg.encoder, params.encoder, enc_cache, d_enc);
  prediction_backward(cfg.prediction, params.prediction, pred_cache, d_pred);
  return loss.nll;
}

template double utterance_objective(BasicModel<float>&, const BasicTensor<float>&,
                                    std::span<const int>, const CropMask*, bool);
template double utterance_objective(BasicModel<double>&, const BasicTensor<double>&,
                                    std::span<const int>, const CropMask*, bool);

}  // namespace asyncrev
