#include "asyncrev/training/trainer.hpp"

#include <cmath>
#include <string>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/core/ops.hpp"
#include "asyncrev/training/objective.hpp"

namespace asyncrev {

void validate(const TrainConfig& c) {
  if (c.steps < 0) throw ConfigError("steps must be non-negative");
  if (c.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (c.num_segments < 0) throw ConfigError("num_segments must be non-negative");
  if (c.min_segment < 1) throw ConfigError("min_segment must be positive");
  if (!(c.adam.learning_rate >= 0.0)) throw ConfigError("learning_rate must be non-negative");
  if (!(c.adam.beta1 >= 0.0 && c.adam.beta1 < 1.0 && c.adam.beta2 >= 0.0 && c.adam.beta2 < 1.0))
    throw ConfigError("Adam decay rates must lie in [0, 1)");
  if (!(c.adam.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (!(c.adam.clip_norm >= 0.0)) throw ConfigError("clip_norm must be non-negative");
}

double Adam::step(const std::vector<NamedParameter<float>>& params) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.param->value.size(), 0.0);
      v_.emplace_back(p.param->value.size(), 0.0);
    }
  }
  double sq = 0.0;
  for (const auto& p : params)
    for (float g : p.param->grad.values()) sq += static_cast<double>(g) * g;
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  const double scale = cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;

  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].param->value;
    const auto& grad = params[i].param->grad;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double g = static_cast<double>(grad[k]) * scale;
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g;
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g * g;
      const double update = cfg_.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + cfg_.epsilon);
      value[k] = static_cast<float>(static_cast<double>(value[k]) - update);
    }
  }
  return norm;
}

SeededRng init_rng_for(std::uint64_t seed) { return SeededRng(seed * 7919); }

TrainResult train(Model& model, const Dataset& data, const TrainConfig& cfg,
                  const TrainProgress& progress) {
  validate(cfg);
  if (data.empty()) throw ConfigError("train: empty dataset");
  SeededRng rng(cfg.seed);
  Adam adam(cfg.adam);
  auto params = model.named_parameters();
  TrainResult result;
  result.loss_curve.reserve(static_cast<std::size_t>(cfg.steps));
  const float inv_batch = 1.0f / static_cast<float>(cfg.batch_size);

  for (int step = 0; step < cfg.steps; ++step) {
    model.zero_grad();
    double total = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const auto& utt = data[rng.below(data.size())];
      CropMask mask;
      if (cfg.num_segments > 0)
        mask = sample_crop(static_cast<int>(utt.features.rows()), cfg.num_segments, rng,
                           cfg.min_segment);
      const double nll = utterance_objective(model, utt.features, utt.labels,
                                             cfg.num_segments > 0 ? &mask : nullptr, true);
      if (!std::isfinite(nll))
        throw NumericError("training diverged at step " + std::to_string(step) +
                           " on " + utt.id + ": loss " + std::to_string(nll));
      total += nll;
    }
    for (auto& p : params)
      for (auto& g : p.param->grad.values()) g *= inv_batch;
    adam.step(params);
    const double mean = total / cfg.batch_size;
    result.loss_curve.push_back(mean);
    if (progress) progress(step, mean);
  }
  return result;
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"steps", c.steps},
       {"batch_size", c.batch_size},
       {"learning_rate", c.adam.learning_rate},
       {"beta1", c.adam.beta1},
       {"beta2", c.adam.beta2},
       {"epsilon", c.adam.epsilon},
       {"clip_norm", c.adam.clip_norm},
       {"num_segments", c.num_segments},
       {"min_segment", c.min_segment},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.steps = j.value("steps", d.steps);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.adam.learning_rate = j.value("learning_rate", d.adam.learning_rate);
  c.adam.beta1 = j.value("beta1", d.adam.beta1);
  c.adam.beta2 = j.value("beta2", d.adam.beta2);
  c.adam.epsilon = j.value("epsilon", d.adam.epsilon);
  c.adam.clip_norm = j.value("clip_norm", d.adam.clip_norm);
  c.num_segments = j.value("num_segments", d.num_segments);
  c.min_segment = j.value("min_segment", d.min_segment);
  c.seed = j.value("seed", d.seed);
}

}  // namespace asyncrev
