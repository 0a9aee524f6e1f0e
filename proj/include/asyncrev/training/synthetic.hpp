#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "asyncrev/core/tensor.hpp"

namespace asyncrev {

// Toy recognition task: every token has a fixed random embedding (drawn from
// prototype_seed), repeated frames_per_token times, plus Gaussian noise.
struct SyntheticTaskSpec {
  int vocab_size = 16;
  int frames_per_token = 6;  // >= 2
  int feature_dim = 8;
  double noise_sigma = 0.0;
  int min_label_length = 3;
  int max_label_length = 8;
  // Adjacent equal tokens would render as one long run with no visible
  // boundary, so they are excluded unless asked for.
  bool allow_repeats = false;
  std::uint64_t prototype_seed = 0x5eed;

  bool operator==(const SyntheticTaskSpec&) const = default;
};

void validate(const SyntheticTaskSpec& spec);

struct Utterance {
  std::string id;
  std::vector<int> labels;
  Tensor features;  // [labels.size() * frames_per_token x feature_dim]

  bool operator==(const Utterance&) const = default;
};

using Dataset = std::vector<Utterance>;

// [vocab_size x feature_dim], standard normal entries.
Tensor token_prototypes(const SyntheticTaskSpec& spec);

// n >= 1 utterances with ids "utt000000", ... Bit-identical for equal inputs.
Dataset gen_synthetic(const SyntheticTaskSpec& spec, std::size_t n, std::uint64_t seed);

void to_json(nlohmann::json& j, const SyntheticTaskSpec& s);
void from_json(const nlohmann::json& j, SyntheticTaskSpec& s);

}  // namespace asyncrev
