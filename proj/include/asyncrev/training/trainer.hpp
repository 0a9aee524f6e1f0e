#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"

#include "asyncrev/model/model.hpp"
#include "asyncrev/training/crop.hpp"
#include "asyncrev/training/synthetic.hpp"

namespace asyncrev {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // global gradient norm clip; 0 disables

  bool operator==(const AdamConfig&) const = default;
};

struct TrainConfig {
  int steps = 1000;
  int batch_size = 8;
  AdamConfig adam;
  int num_segments = 0;  // k; 0 trains without cropping
  int min_segment = kDefaultMinSegment;
  std::uint64_t seed = 1;

  bool operator==(const TrainConfig&) const = default;
};

void validate(const TrainConfig& cfg);

class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}
  // One update from the grads currently in params; returns the pre-clip
  // global gradient norm.
  double step(const std::vector<NamedParameter<float>>& params);
  long steps_taken() const { return t_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// Parameter-initialization stream for a training seed. Kept apart from the
// batch/crop stream that train() draws from TrainConfig::seed.
SeededRng init_rng_for(std::uint64_t seed);

struct TrainResult {
  std::vector<double> loss_curve;  // mean per-utterance nll at each step
};

using TrainProgress = std::function<void(int step, double loss)>;

// Sequential minibatch training. Each step draws batch_size utterances with
// replacement, crops each with a fresh mask when num_segments > 0, and takes
// one Adam step on the mean nll. Deterministic given cfg.seed.
// Throws NumericError on a non-finite loss or gradient.
TrainResult train(Model& model, const Dataset& data, const TrainConfig& cfg,
                  const TrainProgress& progress = {});

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace asyncrev
