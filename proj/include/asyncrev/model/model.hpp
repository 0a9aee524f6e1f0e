#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asyncrev/core/parameter.hpp"
#include "asyncrev/core/rng.hpp"
#include "asyncrev/model/config.hpp"
#include "asyncrev/model/encoder.hpp"
#include "asyncrev/model/joint.hpp"
#include "asyncrev/model/prediction.hpp"

namespace asyncrev {

template <typename T>
struct ModelParams {
  EncoderParams<T> encoder;
  PredictionParams<T> prediction;
  JointParams<T> joint;
};

// Calls f(name, param) for every parameter in checkpoint order. Works on
// const and mutable params alike.
template <typename Params, typename F>
void for_each_parameter(Params& params, F&& f);

template <typename T>
struct BasicModel {
  ModelConfig config;
  ModelParams<T> params;

  // Shapes every parameter from the config and draws values uniformly from
  // [-1/sqrt(fan_in), 1/sqrt(fan_in)]. Validates the config.
  static BasicModel initialize(const ModelConfig& config, SeededRng& rng);
  // All-zero parameters of the right shapes.
  static BasicModel zeros(const ModelConfig& config);

  // Stable order and names; used by checkpoints, optimizers, grad checks.
  std::vector<NamedParameter<T>> named_parameters();

  void zero_grad();

  template <typename U>
  BasicModel<U> cast() const;

  std::size_t parameter_count() const;
};

using Model = BasicModel<float>;

template <typename Params, typename F>
void for_each_parameter(Params& params, F&& f) {
  auto& enc = params.encoder;
  for (std::size_t i = 0; i < enc.subsamplers.size(); ++i) {
    const std::string pre = "enc.sub" + std::to_string(i) + ".";
    f(pre + "weight", enc.subsamplers[i].weight);
    f(pre + "bias", enc.subsamplers[i].bias);
  }
  for (std::size_t i = 0; i < enc.memory_layers.size(); ++i) {
    const std::string pre = "enc.mem" + std::to_string(i) + ".";
    auto& m = enc.memory_layers[i];
    f(pre + "w_hidden", m.w_hidden);
    f(pre + "b_hidden", m.b_hidden);
    f(pre + "w_proj", m.w_proj);
    f(pre + "left_coef", m.left_coef);
    f(pre + "right_coef", m.right_coef);
  }
  f(std::string("pred.embedding"), params.prediction.embedding);
  for (std::size_t i = 0; i < params.prediction.layers.size(); ++i) {
    const std::string pre = "pred.lstm" + std::to_string(i) + ".";
    auto& l = params.prediction.layers[i];
    f(pre + "w_input", l.w_input);
    f(pre + "w_recurrent", l.w_recurrent);
    f(pre + "bias", l.bias);
  }
  auto& j = params.joint;
  f(std::string("joint.w_enc"), j.w_enc);
  f(std::string("joint.w_pred"), j.w_pred);
  f(std::string("joint.bias"), j.bias);
  f(std::string("joint.w_out"), j.w_out);
  f(std::string("joint.b_out"), j.b_out);
}

}  // namespace asyncrev
