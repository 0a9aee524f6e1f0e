#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace asyncrev {

// Context of one encoder layer, in frames at the layer's input rate.
struct LayerContext {
  int left_taps = 0;
  int right_taps = 0;
  int stride = 1;  // 2 for subsamplers, 1 for memory layers

  bool operator==(const LayerContext&) const = default;
};

struct EncoderConfig {
  int feature_dim = 8;
  std::vector<LayerContext> subsamplers;    // each stride 2
  std::vector<LayerContext> memory_layers;  // each stride 1
  int hidden_dim = 32;
  int projection_dim = 32;

  bool operator==(const EncoderConfig&) const = default;
};

struct PredictionNetConfig {
  int vocab_size = 16;  // excluding blank
  int embed_dim = 32;
  int layers = 1;
  int units = 32;

  bool operator==(const PredictionNetConfig&) const = default;
};

struct ModelConfig {
  EncoderConfig encoder;
  PredictionNetConfig prediction;
  int joint_dim = 32;

  bool operator==(const ModelConfig&) const = default;
};

enum class LayerKind { kSubsample, kMemory };

// One encoder layer with its position in the stack resolved.
struct LayerPlan {
  LayerKind kind;
  LayerContext context;
  int in_stride;   // product of strides of all layers below
  int out_stride;  // in_stride * context.stride
  int in_dim;
  int out_dim;
};

// Subsamplers first, then memory layers, bottom to top.
std::vector<LayerPlan> layer_plan(const EncoderConfig& cfg);

// Product of all layer strides.
int total_stride(const EncoderConfig& cfg);

// Lookahead of the whole encoder in input frames:
// sum over layers of right_taps times the stride product of the layers below.
int right_context_frames(const EncoderConfig& cfg);
int left_context_frames(const EncoderConfig& cfg);

// Throws ConfigError.
void validate(const EncoderConfig& cfg);
void validate(const PredictionNetConfig& cfg);
void validate(const ModelConfig& cfg);

// feature 8, one stride-2 subsampler with 2 left taps, 3 memory layers [4, 2],
// hidden/projection 32, one 32-unit recurrent layer, vocab 16.
ModelConfig desk_default_config();

// Named configurations:
//   desk      desk_default_config()
//   trend     desk front end with [4,3] x 4 memory layers (24 frames lookahead)
//   lat40     two stride-2 subsamplers, [20,1] x 10 then [20,0] x 20
//   lat120    two stride-2 subsamplers, [20,1] x 30
//   lat240    two stride-2 subsamplers, [20,2] x 30
//   full2400  two stride-2 subsamplers, [20,20] x 30
// The lat*/full* stacks are narrow (8 wide) so they can be instantiated, but
// they exist mainly for latency arithmetic. Throws ConfigError on unknown names.
ModelConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

void to_json(nlohmann::json& j, const LayerContext& c);
void from_json(const nlohmann::json& j, LayerContext& c);
void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);
void to_json(nlohmann::json& j, const PredictionNetConfig& c);
void from_json(const nlohmann::json& j, PredictionNetConfig& c);
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace asyncrev
