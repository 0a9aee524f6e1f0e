#include "asyncrev/training/synthetic.hpp"

#include <cstdio>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/core/rng.hpp"

namespace asyncrev {

void validate(const SyntheticTaskSpec& s) {
  if (s.vocab_size < 1) throw ConfigError("vocab_size must be positive");
  if (!s.allow_repeats && s.vocab_size < 2 && s.max_label_length > 1)
    throw ConfigError("a single-token vocabulary needs allow_repeats");
  if (s.frames_per_token < 2) throw ConfigError("frames_per_token must be at least 2");
  if (s.feature_dim < 1) throw ConfigError("feature_dim must be positive");
  if (!(s.noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
  if (s.min_label_length < 1 || s.max_label_length < s.min_label_length)
    throw ConfigError("label length range must satisfy 1 <= min <= max");
}

Tensor token_prototypes(const SyntheticTaskSpec& spec) {
  validate(spec);
  SeededRng rng(spec.prototype_seed);
  Tensor p = Tensor::matrix(static_cast<std::size_t>(spec.vocab_size),
                            static_cast<std::size_t>(spec.feature_dim));
  for (auto& v : p.values()) v = static_cast<float>(rng.normal());
  return p;
}

Dataset gen_synthetic(const SyntheticTaskSpec& spec, std::size_t n, std::uint64_t seed) {
  validate(spec);
  if (n == 0) throw ConfigError("gen_synthetic: need at least one utterance");
  const Tensor proto = token_prototypes(spec);
  const auto dim = static_cast<std::size_t>(spec.feature_dim);
  const auto fpt = static_cast<std::size_t>(spec.frames_per_token);
  SeededRng rng(seed);
  Dataset out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Utterance u;
    char id[32];
    std::snprintf(id, sizeof id, "utt%06zu", i);
    u.id = id;
    const auto span = static_cast<std::uint64_t>(spec.max_label_length - spec.min_label_length + 1);
    const auto len = static_cast<std::size_t>(spec.min_label_length) + rng.below(span);
    for (std::size_t k = 0; k < len; ++k) {
      int tok;
      if (spec.allow_repeats || k == 0) {
        tok = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.vocab_size)));
      } else {
        // Uniform over the other vocab_size - 1 tokens.
        tok = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.vocab_size - 1)));
        if (tok >= u.labels.back()) ++tok;
      }
      u.labels.push_back(tok);
    }
    u.features = Tensor::matrix(len * fpt, dim);
    for (std::size_t k = 0; k < len; ++k) {
      const auto row = proto.row(static_cast<std::size_t>(u.labels[k]));
      for (std::size_t f = 0; f < fpt; ++f) {
        auto dst = u.features.row(k * fpt + f);
        for (std::size_t d = 0; d < dim; ++d)
          dst[d] = row[d] + static_cast<float>(spec.noise_sigma * rng.normal());
      }
    }
    out.push_back(std::move(u));
  }
  return out;
}

void to_json(nlohmann::json& j, const SyntheticTaskSpec& s) {
  j = {{"vocab_size", s.vocab_size},
       {"frames_per_token", s.frames_per_token},
       {"feature_dim", s.feature_dim},
       {"noise_sigma", s.noise_sigma},
       {"min_label_length", s.min_label_length},
       {"max_label_length", s.max_label_length},
       {"allow_repeats", s.allow_repeats},
       {"prototype_seed", s.prototype_seed}};
}

void from_json(const nlohmann::json& j, SyntheticTaskSpec& s) {
  SyntheticTaskSpec d;
  s.vocab_size = j.value("vocab_size", d.vocab_size);
  s.frames_per_token = j.value("frames_per_token", d.frames_per_token);
  s.feature_dim = j.value("feature_dim", d.feature_dim);
  s.noise_sigma = j.value("noise_sigma", d.noise_sigma);
  s.min_label_length = j.value("min_label_length", d.min_label_length);
  s.max_label_length = j.value("max_label_length", d.max_label_length);
  s.allow_repeats = j.value("allow_repeats", d.allow_repeats);
  s.prototype_seed = j.value("prototype_seed", d.prototype_seed);
}

}  // namespace asyncrev
