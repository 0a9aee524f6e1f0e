#include <gtest/gtest.h>

#include "asyncrev/core/gradient_check.hpp"
#include "asyncrev/training/objective.hpp"

using namespace asyncrev;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.encoder.feature_dim = 3;
  cfg.encoder.subsamplers = {{1, 1, 2}};
  cfg.encoder.memory_layers = {{2, 2, 1}, {1, 1, 1}};
  cfg.encoder.hidden_dim = 5;
  cfg.encoder.projection_dim = 4;
  cfg.prediction = {3, 4, 2, 4};
  cfg.joint_dim = 5;
  return cfg;
}

struct Problem {
  BasicModel<double> model;
  BasicTensor<double> features;
  std::vector<int> labels;
};

Problem make_problem(std::uint64_t seed, std::size_t frames) {
  SeededRng rng(seed);
  Problem p{BasicModel<double>::initialize(tiny_config(), rng), {}, {}};
  p.features = BasicTensor<double>::matrix(frames, 3);
  for (auto& v : p.features.values()) v = rng.normal();
  p.labels = {0, 2, 1};
  return p;
}

GradientCheckResult check(Problem& p, const CropMask* crop, std::uint64_t seed) {
  p.model.zero_grad();
  utterance_objective(p.model, p.features, p.labels, crop, true);
  SeededRng rng(seed);
  auto loss = [&] { return utterance_objective(p.model, p.features, p.labels, crop, false); };
  return gradient_check(loss, p.model.named_parameters(), rng);
}

}  // namespace

TEST(FullModelGradient, MatchesFiniteDifferences) {
  auto p = make_problem(11, 14);
  const auto r = check(p, nullptr, 5);
  EXPECT_EQ(r.samples, 200u);
  EXPECT_LE(r.max_rel_error, 1e-4) << "worst " << r.worst;
}

TEST(FullModelGradient, MatchesFiniteDifferencesUnderCropMask) {
  auto p = make_problem(12, 17);
  CropMask crop{{5, 11}};
  const auto r = check(p, &crop, 6);
  EXPECT_LE(r.max_rel_error, 1e-4) << "worst " << r.worst;
}

TEST(FullModelGradient, EveryParameterGroupIsChecked) {
  auto p = make_problem(13, 12);
  p.model.zero_grad();
  utterance_objective(p.model, p.features, p.labels, nullptr, true);
  auto loss = [&] { return utterance_objective(p.model, p.features, p.labels, nullptr, false); };
  for (const auto& np : p.model.named_parameters()) {
    SeededRng rng(99);
    const auto r = gradient_check(loss, {np}, rng, {.samples = 20});
    EXPECT_LE(r.max_rel_error, 1e-4) << np.name << " worst " << r.worst;
  }
}
