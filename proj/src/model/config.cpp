#include "asyncrev/model/config.hpp"

#include <string>

#include "asyncrev/core/errors.hpp"

namespace asyncrev {

std::vector<LayerPlan> layer_plan(const EncoderConfig& cfg) {
  std::vector<LayerPlan> plan;
  int stride = 1;
  int dim = cfg.feature_dim;
  for (const auto& c : cfg.subsamplers) {
    plan.push_back({LayerKind::kSubsample, c, stride, stride * c.stride, dim,
                    cfg.projection_dim});
    stride *= c.stride;
    dim = cfg.projection_dim;
  }
  for (const auto& c : cfg.memory_layers) {
    plan.push_back({LayerKind::kMemory, c, stride, stride * c.stride, dim, dim});
    stride *= c.stride;
  }
  return plan;
}

int total_stride(const EncoderConfig& cfg) {
  int s = 1;
  for (const auto& c : cfg.subsamplers) s *= c.stride;
  for (const auto& c : cfg.memory_layers) s *= c.stride;
  return s;
}

int right_context_frames(const EncoderConfig& cfg) {
  int frames = 0;
  for (const auto& layer : layer_plan(cfg))
    frames += layer.context.right_taps * layer.in_stride;
  return frames;
}

int left_context_frames(const EncoderConfig& cfg) {
  int frames = 0;
  for (const auto& layer : layer_plan(cfg))
    frames += layer.context.left_taps * layer.in_stride;
  return frames;
}

namespace {
void check_context(const LayerContext& c, const std::string& where) {
  if (c.left_taps < 0 || c.right_taps < 0)
    throw ConfigError(where + ": tap counts must be non-negative");
  if (c.stride < 1) throw ConfigError(where + ": stride must be >= 1");
}
}  // namespace

void validate(const EncoderConfig& cfg) {
  if (cfg.feature_dim < 1) throw ConfigError("encoder: feature_dim must be >= 1");
  if (cfg.hidden_dim < 1 || cfg.projection_dim < 1)
    throw ConfigError("encoder: hidden_dim and projection_dim must be >= 1");
  if (cfg.memory_layers.empty())
    throw ConfigError("encoder: at least one memory layer is required");
  for (std::size_t i = 0; i < cfg.subsamplers.size(); ++i) {
    const auto where = "subsampler " + std::to_string(i);
    check_context(cfg.subsamplers[i], where);
    if (cfg.subsamplers[i].stride != 2)
      throw ConfigError(where + ": subsampler stride must be 2");
  }
  for (std::size_t i = 0; i < cfg.memory_layers.size(); ++i) {
    const auto where = "memory layer " + std::to_string(i);
    check_context(cfg.memory_layers[i], where);
    if (cfg.memory_layers[i].stride != 1)
      throw ConfigError(where + ": memory layer stride must be 1");
  }
}

void validate(const PredictionNetConfig& cfg) {
  if (cfg.vocab_size < 1) throw ConfigError("prediction: vocab_size must be >= 1");
  if (cfg.layers < 1) throw ConfigError("prediction: layers must be >= 1");
  if (cfg.embed_dim < 1 || cfg.units < 1)
    throw ConfigError("prediction: embed_dim and units must be >= 1");
}

void validate(const ModelConfig& cfg) {
  validate(cfg.encoder);
  validate(cfg.prediction);
  if (cfg.joint_dim < 1) throw ConfigError("joint_dim must be >= 1");
}

ModelConfig desk_default_config() {
  ModelConfig cfg;
  cfg.encoder.feature_dim = 8;
  cfg.encoder.subsamplers = {{2, 0, 2}};
  cfg.encoder.memory_layers = {{4, 2, 1}, {4, 2, 1}, {4, 2, 1}};
  cfg.encoder.hidden_dim = 32;
  cfg.encoder.projection_dim = 32;
  cfg.prediction = {16, 32, 1, 32};
  cfg.joint_dim = 32;
  return cfg;
}

namespace {

ModelConfig large_layout(std::vector<LayerContext> memory) {
  ModelConfig cfg = desk_default_config();
  cfg.encoder.subsamplers = {{2, 0, 2}, {2, 0, 2}};
  cfg.encoder.memory_layers = std::move(memory);
  cfg.encoder.hidden_dim = 8;
  cfg.encoder.projection_dim = 8;
  return cfg;
}

std::vector<LayerContext> repeat(LayerContext c, int n) {
  return std::vector<LayerContext>(static_cast<std::size_t>(n), c);
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"desk", "trend", "lat40", "lat120", "lat240", "full2400"};
}

ModelConfig preset_config(const std::string& name) {
  if (name == "desk") return desk_default_config();
  if (name == "trend") {
    ModelConfig cfg = desk_default_config();
    cfg.encoder.memory_layers = repeat({4, 3, 1}, 4);
    return cfg;
  }
  if (name == "lat40") {
    auto mem = repeat({20, 1, 1}, 10);
    const auto tail = repeat({20, 0, 1}, 20);
    mem.insert(mem.end(), tail.begin(), tail.end());
    return large_layout(std::move(mem));
  }
  if (name == "lat120") return large_layout(repeat({20, 1, 1}, 30));
  if (name == "lat240") return large_layout(repeat({20, 2, 1}, 30));
  if (name == "full2400") return large_layout(repeat({20, 20, 1}, 30));
  throw ConfigError("unknown model preset '" + name + "'");
}

void to_json(nlohmann::json& j, const LayerContext& c) {
  j = {{"left", c.left_taps}, {"right", c.right_taps}, {"stride", c.stride}};
}

void from_json(const nlohmann::json& j, LayerContext& c) {
  c.left_taps = j.at("left").get<int>();
  c.right_taps = j.at("right").get<int>();
  c.stride = j.value("stride", 1);
}

namespace {
// Layer lists accept {"left": l, "right": r, "repeat": n} to write configs
// like [20, 1] x 10 + [20, 0] x 20 compactly.
std::vector<LayerContext> layers_from_json(const nlohmann::json& j,
                                           int default_stride) {
  std::vector<LayerContext> out;
  for (const auto& item : j) {
    LayerContext c;
    c.left_taps = item.at("left").get<int>();
    c.right_taps = item.at("right").get<int>();
    c.stride = item.value("stride", default_stride);
    const int repeat = item.value("repeat", 1);
    if (repeat < 1) throw ConfigError("layer repeat must be >= 1");
    out.insert(out.end(), static_cast<std::size_t>(repeat), c);
  }
  return out;
}
}  // namespace

void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = {{"feature_dim", c.feature_dim},
       {"subsamplers", c.subsamplers},
       {"memory_layers", c.memory_layers},
       {"hidden_dim", c.hidden_dim},
       {"projection_dim", c.projection_dim}};
}

void from_json(const nlohmann::json& j, EncoderConfig& c) {
  c.feature_dim = j.at("feature_dim").get<int>();
  c.subsamplers = layers_from_json(j.value("subsamplers", nlohmann::json::array()), 2);
  c.memory_layers = layers_from_json(j.at("memory_layers"), 1);
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.projection_dim = j.at("projection_dim").get<int>();
}

void to_json(nlohmann::json& j, const PredictionNetConfig& c) {
  j = {{"vocab_size", c.vocab_size},
       {"embed_dim", c.embed_dim},
       {"layers", c.layers},
       {"units", c.units}};
}

void from_json(const nlohmann::json& j, PredictionNetConfig& c) {
  c.vocab_size = j.at("vocab_size").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.layers = j.at("layers").get<int>();
  c.units = j.at("units").get<int>();
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"encoder", c.encoder}, {"prediction", c.prediction}, {"joint_dim", c.joint_dim}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.encoder = j.at("encoder").get<EncoderConfig>();
  c.prediction = j.at("prediction").get<PredictionNetConfig>();
  c.joint_dim = j.at("joint_dim").get<int>();
}

}  // namespace asyncrev
