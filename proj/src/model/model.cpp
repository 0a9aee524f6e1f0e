#include "asyncrev/model/model.hpp"

#include <cmath>

namespace asyncrev {
namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <typename T>
Parameter<T> shaped(std::size_t rows, std::size_t cols) {
  return Parameter<T>(BasicTensor<T>::matrix(rows, cols));
}

}  // namespace

template <typename T>
BasicModel<T> BasicModel<T>::zeros(const ModelConfig& config) {
  validate(config);
  BasicModel m;
  m.config = config;
  const auto& ec = config.encoder;
  for (const auto& layer : layer_plan(ec)) {
    const auto& c = layer.context;
    const auto in_dim = static_cast<std::size_t>(layer.in_dim);
    const auto out_dim = static_cast<std::size_t>(layer.out_dim);
    if (layer.kind == LayerKind::kSubsample) {
      const auto taps = static_cast<std::size_t>(c.left_taps + 1 + c.right_taps);
      m.params.encoder.subsamplers.push_back(
          {shaped<T>(taps * in_dim, out_dim), shaped<T>(1, out_dim)});
    } else {
      const auto hidden = static_cast<std::size_t>(ec.hidden_dim);
      m.params.encoder.memory_layers.push_back(
          {shaped<T>(in_dim, hidden), shaped<T>(1, hidden), shaped<T>(hidden, in_dim),
           shaped<T>(static_cast<std::size_t>(c.left_taps), in_dim),
           shaped<T>(static_cast<std::size_t>(c.right_taps), in_dim)});
    }
  }
  const auto& pc = config.prediction;
  const auto units = static_cast<std::size_t>(pc.units);
  m.params.prediction.embedding =
      shaped<T>(static_cast<std::size_t>(pc.vocab_size), static_cast<std::size_t>(pc.embed_dim));
  for (int l = 0; l < pc.layers; ++l) {
    const auto in = l == 0 ? static_cast<std::size_t>(pc.embed_dim) : units;
    m.params.prediction.layers.push_back(
        {shaped<T>(in, 4 * units), shaped<T>(units, 4 * units), shaped<T>(1, 4 * units)});
  }
  const auto joint_dim = static_cast<std::size_t>(config.joint_dim);
  const auto out = static_cast<std::size_t>(pc.vocab_size + 1);
  const auto enc_dim = static_cast<std::size_t>(layer_plan(ec).back().out_dim);
  m.params.joint = {shaped<T>(enc_dim, joint_dim),
                    shaped<T>(units, joint_dim), shaped<T>(1, joint_dim),
                    shaped<T>(joint_dim, out), shaped<T>(1, out)};
  return m;
}

template <typename T>
BasicModel<T> BasicModel<T>::initialize(const ModelConfig& config, SeededRng& rng) {
  BasicModel m = zeros(config);
  std::size_t prev_rows = 1;
  for_each_parameter(m.params, [&](const std::string& name, Parameter<T>& p) {
    std::size_t fan_in;
    if (ends_with(name, "left_coef") || ends_with(name, "right_coef")) {
      // Taps of one layer share a fan-in: the window they sum over.
      const auto mem = name.substr(0, name.rfind('.'));
      std::size_t taps = 1;
      for_each_parameter(m.params, [&](const std::string& other, Parameter<T>& q) {
        if (other == mem + ".left_coef" || other == mem + ".right_coef") taps += q.value.rows();
      });
      fan_in = taps;
    } else if (name == "pred.embedding") {
      fan_in = 1;
    } else if (ends_with(name, "bias") || ends_with(name, "b_hidden") || ends_with(name, "b_out")) {
      fan_in = prev_rows;
    } else {
      fan_in = p.value.rows();
      prev_rows = fan_in;
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    for (auto& v : p.value.values()) v = static_cast<T>(rng.uniform(-bound, bound));
  });
  return m;
}

template <typename T>
std::vector<NamedParameter<T>> BasicModel<T>::named_parameters() {
  std::vector<NamedParameter<T>> out;
  for_each_parameter(params, [&](const std::string& name, Parameter<T>& p) {
    out.push_back({name, &p});
  });
  return out;
}

template <typename T>
void BasicModel<T>::zero_grad() {
  for_each_parameter(params, [](const std::string&, Parameter<T>& p) { p.zero_grad(); });
}

template <typename T>
template <typename U>
BasicModel<U> BasicModel<T>::cast() const {
  BasicModel<U> out = BasicModel<U>::zeros(config);
  std::vector<const Parameter<T>*> src;
  for_each_parameter(params, [&](const std::string&, const Parameter<T>& p) { src.push_back(&p); });
  std::size_t i = 0;
  for_each_parameter(out.params, [&](const std::string&, Parameter<U>& p) {
    p = src[i++]->template cast<U>();
  });
  return out;
}

template <typename T>
std::size_t BasicModel<T>::parameter_count() const {
  std::size_t n = 0;
  for_each_parameter(params, [&](const std::string&, const Parameter<T>& p) { n += p.value.size(); });
  return n;
}

template struct BasicModel<float>;
template struct BasicModel<double>;
template BasicModel<double> BasicModel<float>::cast<double>() const;
template BasicModel<float> BasicModel<double>::cast<float>() const;
template BasicModel<float> BasicModel<float>::cast<float>() const;

}  // namespace asyncrev
