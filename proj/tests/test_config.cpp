#include <gtest/gtest.h>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/model/config.hpp"
#include "asyncrev/stream/session.hpp"

using namespace asyncrev;

namespace {

EncoderConfig causal_front_end(std::vector<LayerContext> memory) {
  EncoderConfig e;
  e.subsamplers = {{0, 0, 2}, {0, 0, 2}};
  e.memory_layers = std::move(memory);
  return e;
}

}  // namespace

TEST(Latency, RightContextOfTheFourReferenceEncoders) {
  EXPECT_EQ(right_context_frames(preset_config("lat40").encoder), 40);
  EXPECT_EQ(right_context_frames(preset_config("lat120").encoder), 120);
  EXPECT_EQ(right_context_frames(preset_config("lat240").encoder), 240);
  EXPECT_EQ(right_context_frames(preset_config("full2400").encoder), 2400);
}

TEST(Latency, FramesToSeconds) {
  for (auto [name, ms] : std::vector<std::pair<std::string, int>>{
           {"lat40", 400}, {"lat120", 1200}, {"lat240", 2400}, {"full2400", 24000}})
    EXPECT_EQ(right_context_frames(preset_config(name).encoder) * kFrameShiftMs, ms) << name;
}

TEST(Latency, FullyCausalHasNoLookahead) {
  EXPECT_EQ(right_context_frames(causal_front_end({{20, 0, 1}, {3, 0, 1}})), 0);
}

TEST(Latency, LeftContext) {
  std::vector<LayerContext> mem(30, LayerContext{20, 20, 1});
  EXPECT_EQ(left_context_frames(causal_front_end(mem)), 2400);
  EncoderConfig single;
  single.memory_layers = {{4, 2, 1}};
  EXPECT_EQ(left_context_frames(single), 4);
  EXPECT_EQ(left_context_frames(causal_front_end({{0, 5, 1}})), 0);
}

TEST(Latency, SubsamplerRightTapsScaleByStridesBelow) {
  EncoderConfig e;
  e.subsamplers = {{0, 1, 2}, {0, 1, 2}};
  e.memory_layers = {{0, 1, 1}};
  // 1 * 1 + 1 * 2 + 1 * 4
  EXPECT_EQ(right_context_frames(e), 7);
}

TEST(Latency, AlgorithmicLatencyPerRevisedChunk) {
  EXPECT_EQ(algorithmic_latency_ms({40, 1, 1}), 400);
  EXPECT_EQ(algorithmic_latency_ms({40, 3, 3}), 1200);
  EXPECT_EQ(algorithmic_latency_ms({40, 6, 6}), 2400);
  EXPECT_EQ(algorithmic_latency_ms({40, 5, 0}), 0);
}

TEST(Latency, ExactRevisionDepth) {
  EXPECT_EQ(exact_revision_depth(preset_config("lat40").encoder, 40), 1);
  EXPECT_EQ(exact_revision_depth(preset_config("lat120").encoder, 40), 3);
  EXPECT_EQ(exact_revision_depth(preset_config("lat240").encoder, 40), 6);
  EXPECT_EQ(exact_revision_depth(desk_default_config().encoder, 4), 3);
  EXPECT_EQ(exact_revision_depth(causal_front_end({{1, 0, 1}}), 8), 0);
}

TEST(Config, LayerPlanStrides) {
  const auto plan = layer_plan(preset_config("lat120").encoder);
  ASSERT_EQ(plan.size(), 32u);
  EXPECT_EQ(plan[0].in_stride, 1);
  EXPECT_EQ(plan[1].in_stride, 2);
  EXPECT_EQ(plan[2].in_stride, 4);
  EXPECT_EQ(plan.back().out_stride, 4);
  EXPECT_EQ(total_stride(preset_config("lat120").encoder), 4);
}

TEST(Config, ValidationRejectsBadShapes) {
  auto cfg = desk_default_config();
  cfg.encoder.memory_layers.clear();
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = desk_default_config();
  cfg.encoder.subsamplers[0].stride = 3;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = desk_default_config();
  cfg.encoder.memory_layers[0].left_taps = -1;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = desk_default_config();
  cfg.prediction.vocab_size = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  EXPECT_NO_THROW(validate(desk_default_config()));
  for (const auto& name : preset_names()) EXPECT_NO_THROW(validate(preset_config(name)));
  EXPECT_THROW(preset_config("nope"), ConfigError);
}

TEST(Config, PolicyValidation) {
  const auto enc = desk_default_config().encoder;
  EXPECT_NO_THROW(validate(RevisionPolicy{4, 0, 0}, enc));
  EXPECT_THROW(validate(RevisionPolicy{3, 1, 1}, enc), ConfigError);  // not a stride multiple
  EXPECT_THROW(validate(RevisionPolicy{0, 1, 1}, enc), ConfigError);
  EXPECT_THROW(validate(RevisionPolicy{4, -1, 1}, enc), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  for (const auto& name : preset_names()) {
    const auto cfg = preset_config(name);
    const nlohmann::json j = cfg;
    EXPECT_EQ(j.get<ModelConfig>(), cfg) << name;
  }
}

TEST(Config, JsonRepeatShorthand) {
  const auto j = nlohmann::json::parse(R"({
    "encoder": {"feature_dim": 8, "subsamplers": [{"left": 2, "right": 0, "stride": 2}],
                "memory_layers": [{"left": 20, "right": 1, "repeat": 30}],
                "hidden_dim": 8, "projection_dim": 8},
    "prediction": {"vocab_size": 16, "embed_dim": 8, "layers": 1, "units": 8},
    "joint_dim": 8})");
  const auto cfg = j.get<ModelConfig>();
  EXPECT_EQ(cfg.encoder.memory_layers.size(), 30u);
  EXPECT_EQ(right_context_frames(cfg.encoder), 60);
}
