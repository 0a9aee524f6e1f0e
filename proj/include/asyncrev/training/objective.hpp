#pragma once

#include <span>

#include "asyncrev/model/crop_mask.hpp"
#include "asyncrev/model/model.hpp"

namespace asyncrev {

// RNN-T negative log-likelihood of one utterance under the full model, with
// the encoder optionally cropped. With accumulate_grad, d nll / d params is
// added to every parameter's grad.
template <typename T>
double utterance_objective(BasicModel<T>& model, const BasicTensor<T>& features,
                           std::span<const int> labels, const CropMask* crop,
                           bool accumulate_grad);

}  // namespace asyncrev
