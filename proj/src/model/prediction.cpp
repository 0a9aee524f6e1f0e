#include "asyncrev/model/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/core/ops.hpp"
#include "asyncrev/kernels/reference.hpp"

namespace asyncrev {

template <typename T>
PredState<T> PredState<T>::zeros(const PredictionNetConfig& cfg) {
  PredState s;
  const auto units = static_cast<std::size_t>(cfg.units);
  for (int l = 0; l < cfg.layers; ++l) {
    s.hidden.push_back(BasicTensor<T>::matrix(1, units));
    s.cell.push_back(BasicTensor<T>::matrix(1, units));
  }
  return s;
}

template <typename T>
std::vector<T> PredState<T>::pack() const {
  std::vector<T> flat;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    flat.insert(flat.end(), hidden[l].values().begin(), hidden[l].values().end());
    flat.insert(flat.end(), cell[l].values().begin(), cell[l].values().end());
  }
  return flat;
}

template <typename T>
PredState<T> PredState<T>::unpack(std::span<const T> flat, const PredictionNetConfig& cfg) {
  const auto units = static_cast<std::size_t>(cfg.units);
  if (flat.size() != 2 * units * static_cast<std::size_t>(cfg.layers))
    throw DimensionError("PredState::unpack: wrong length");
  PredState s;
  auto it = flat.begin();
  for (int l = 0; l < cfg.layers; ++l) {
    s.hidden.emplace_back(std::vector<std::size_t>{1, units}, std::vector<T>(it, it + units));
    it += units;
    s.cell.emplace_back(std::vector<std::size_t>{1, units}, std::vector<T>(it, it + units));
    it += units;
  }
  return s;
}

namespace {

template <typename T>
BasicTensor<T> embed(int token, const PredictionNetConfig& cfg,
                     const PredictionParams<T>& params) {
  const auto dim = static_cast<std::size_t>(cfg.embed_dim);
  auto x = BasicTensor<T>::matrix(1, dim);
  if (token == kStartToken) return x;
  if (token < 0 || token >= cfg.vocab_size) {
    throw VocabError("token " + std::to_string(token) + " outside vocabulary of size " +
                     std::to_string(cfg.vocab_size));
  }
  const auto row = params.embedding.value.row(static_cast<std::size_t>(token));
  std::copy(row.begin(), row.end(), x.data());
  return x;
}

// One cell update. Writes activated gates, new cell and tanh(cell) if asked.
template <typename T>
void lstm_cell(const BasicTensor<T>& x, const BasicTensor<T>& h, const BasicTensor<T>& c,
               const LstmParams<T>& p, std::size_t units, BasicTensor<T>& h_out,
               BasicTensor<T>& c_out, BasicTensor<T>* gates_out, BasicTensor<T>* tanh_out) {
  BasicTensor<T> gates = p.bias.value;
  matmul_acc(x, p.w_input.value, gates);
  matmul_acc(h, p.w_recurrent.value, gates);
  T* g = gates.data();
  for (std::size_t k = 0; k < units; ++k) {
    g[k] = sigmoid(g[k]);
    g[units + k] = sigmoid(g[units + k]);
    g[2 * units + k] = std::tanh(g[2 * units + k]);
    g[3 * units + k] = sigmoid(g[3 * units + k]);
  }
  h_out = BasicTensor<T>::matrix(1, units);
  c_out = BasicTensor<T>::matrix(1, units);
  BasicTensor<T> tc = BasicTensor<T>::matrix(1, units);
  for (std::size_t k = 0; k < units; ++k) {
    c_out[k] = g[units + k] * c[k] + g[k] * g[2 * units + k];
    tc[k] = std::tanh(c_out[k]);
    h_out[k] = g[3 * units + k] * tc[k];
  }
  if (gates_out) *gates_out = std::move(gates);
  if (tanh_out) *tanh_out = std::move(tc);
}

}  // namespace

template <typename T>
PredStepResult<T> pred_step(int token, const PredState<T>& state,
                            const PredictionNetConfig& cfg,
                            const PredictionParams<T>& params) {
  if (state.hidden.size() != static_cast<std::size_t>(cfg.layers))
    throw DimensionError("pred_step: state layer count mismatch");
  const auto units = static_cast<std::size_t>(cfg.units);
  PredStepResult<T> result;
  result.state.hidden.resize(state.hidden.size());
  result.state.cell.resize(state.cell.size());
  BasicTensor<T> x = embed(token, cfg, params);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    lstm_cell(x, state.hidden[l], state.cell[l], params.layers[l], units,
              result.state.hidden[l], result.state.cell[l], static_cast<BasicTensor<T>*>(nullptr),
              static_cast<BasicTensor<T>*>(nullptr));
    x = result.state.hidden[l];
  }
  result.out = std::move(x);
  return result;
}

template <typename T>
PredState<T> initial_pred_state(const PredictionNetConfig& cfg,
                                const PredictionParams<T>& params) {
  return pred_step(kStartToken, PredState<T>::zeros(cfg), cfg, params).state;
}

template <typename T>
BasicTensor<T> prediction_forward(std::span<const int> labels,
                                  const PredictionNetConfig& cfg,
                                  const PredictionParams<T>& params,
                                  PredSequenceCache<T>* cache) {
  const auto units = static_cast<std::size_t>(cfg.units);
  const std::size_t steps = labels.size() + 1;
  auto out = BasicTensor<T>::matrix(steps, units);
  auto state = PredState<T>::zeros(cfg);
  if (cache) {
    cache->tokens.assign(1, kStartToken);
    cache->tokens.insert(cache->tokens.end(), labels.begin(), labels.end());
    cache->steps.assign(steps, {});
  }
  for (std::size_t u = 0; u < steps; ++u) {
    const int token = u == 0 ? kStartToken : labels[u - 1];
    BasicTensor<T> x = embed(token, cfg, params);
    PredState<T> next;
    next.hidden.resize(state.hidden.size());
    next.cell.resize(state.cell.size());
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      BasicTensor<T> gates, tc;
      lstm_cell(x, state.hidden[l], state.cell[l], params.layers[l], units,
                next.hidden[l], next.cell[l], &gates, &tc);
      if (cache) {
        auto& st = cache->steps[u];
        st.input.push_back(x);
        st.h_prev.push_back(state.hidden[l]);
        st.c_prev.push_back(state.cell[l]);
        st.gates.push_back(std::move(gates));
        st.c_new.push_back(next.cell[l]);
        st.tanh_c.push_back(std::move(tc));
      }
      x = next.hidden[l];
    }
    std::copy(x.values().begin(), x.values().end(), out.row(u).begin());
    state = std::move(next);
  }
  return out;
}

template <typename T>
void prediction_backward(const PredictionNetConfig& cfg, PredictionParams<T>& params,
                         const PredSequenceCache<T>& cache, const BasicTensor<T>& d_out) {
  const auto units = static_cast<std::size_t>(cfg.units);
  const std::size_t layers = params.layers.size();
  const std::size_t steps = cache.steps.size();
  std::vector<BasicTensor<T>> dh_next(layers, BasicTensor<T>::matrix(1, units));
  std::vector<BasicTensor<T>> dc_next(layers, BasicTensor<T>::matrix(1, units));
  std::vector<BasicTensor<T>> w_input_t, w_recurrent_t;
  for (const auto& lp : params.layers) {
    w_input_t.push_back(transpose(lp.w_input.value));
    w_recurrent_t.push_back(transpose(lp.w_recurrent.value));
  }

  for (std::size_t u = steps; u-- > 0;) {
    const auto& st = cache.steps[u];
    // Gradient reaching the top layer's hidden output at this step.
    auto dx = BasicTensor<T>::matrix(1, units);
    std::copy(d_out.row(u).begin(), d_out.row(u).end(), dx.data());
    for (std::size_t l = layers; l-- > 0;) {
      auto& lp = params.layers[l];
      BasicTensor<T> dh = dx;
      kernels::add(units, dh_next[l].data(), dh.data());
      const T* g = st.gates[l].data();
      const T* tc = st.tanh_c[l].data();
      const T* c_prev = st.c_prev[l].data();
      auto dgates = BasicTensor<T>::matrix(1, 4 * units);
      auto dc_prev = BasicTensor<T>::matrix(1, units);
      for (std::size_t k = 0; k < units; ++k) {
        const T i = g[k], f = g[units + k], gg = g[2 * units + k], o = g[3 * units + k];
        const T dc = dc_next[l][k] + dh[k] * o * (T{1} - tc[k] * tc[k]);
        dgates[k] = dc * gg * i * (T{1} - i);
        dgates[units + k] = dc * c_prev[k] * f * (T{1} - f);
        dgates[2 * units + k] = dc * i * (T{1} - gg * gg);
        dgates[3 * units + k] = dh[k] * tc[k] * o * (T{1} - o);
        dc_prev[k] = dc * f;
      }
      matmul_at_acc(st.input[l], dgates, lp.w_input.grad);
      matmul_at_acc(st.h_prev[l], dgates, lp.w_recurrent.grad);
      kernels::add(4 * units, dgates.data(), lp.bias.grad.data());
      dh_next[l] = matmul(dgates, w_recurrent_t[l]);
      dc_next[l] = std::move(dc_prev);
      dx = matmul(dgates, w_input_t[l]);
    }
    const int token = cache.tokens[u];
    if (token != kStartToken) {
      kernels::add(static_cast<std::size_t>(cfg.embed_dim), dx.data(),
                   params.embedding.grad.data() +
                       static_cast<std::size_t>(token) * static_cast<std::size_t>(cfg.embed_dim));
    }
  }
}

template struct PredState<float>;
template struct PredState<double>;

#define ASYNCREV_INSTANTIATE_PRED(T)                                               \
  template PredStepResult<T> pred_step(int, const PredState<T>&,                   \
                                       const PredictionNetConfig&,                 \
                                       const PredictionParams<T>&);                \
  template PredState<T> initial_pred_state(const PredictionNetConfig&,             \
                                           const PredictionParams<T>&);            \
  template BasicTensor<T> prediction_forward(std::span<const int>,                 \
                                             const PredictionNetConfig&,           \
                                             const PredictionParams<T>&,           \
                                             PredSequenceCache<T>*);               \
  template void prediction_backward(const PredictionNetConfig&, PredictionParams<T>&, \
                                    const PredSequenceCache<T>&, const BasicTensor<T>&);

ASYNCREV_INSTANTIATE_PRED(float)
ASYNCREV_INSTANTIATE_PRED(double)

}  // namespace asyncrev
