#pragma once

#include <span>
#include <vector>

#include "asyncrev/core/parameter.hpp"
#include "asyncrev/model/config.hpp"

namespace asyncrev {

// Feeding kStartToken uses a zero embedding.
inline constexpr int kStartToken = -1;

// One LSTM layer; gate blocks are ordered [input, forget, cell, output].
template <typename T>
struct LstmParams {
  Parameter<T> w_input;      // [in x 4*units]
  Parameter<T> w_recurrent;  // [units x 4*units]
  Parameter<T> bias;         // [1 x 4*units]
};

template <typename T>
struct PredictionParams {
  Parameter<T> embedding;  // [vocab x embed]
  std::vector<LstmParams<T>> layers;
};

// Per-layer hidden and cell rows, each [1 x units]. The network output is the
// top layer's hidden row.
template <typename T>
struct PredState {
  std::vector<BasicTensor<T>> hidden;
  std::vector<BasicTensor<T>> cell;

  static PredState zeros(const PredictionNetConfig& cfg);
  const BasicTensor<T>& output() const { return hidden.back(); }

  // Flat [h_0, c_0, h_1, c_1, ...] for checkpoint transport.
  std::vector<T> pack() const;
  static PredState unpack(std::span<const T> flat, const PredictionNetConfig& cfg);

  bool operator==(const PredState&) const = default;
};

template <typename T>
struct PredStepResult {
  BasicTensor<T> out;  // [1 x units]
  PredState<T> state;
};

// Throws VocabError for tokens outside [0, vocab) other than kStartToken.
template <typename T>
PredStepResult<T> pred_step(int token, const PredState<T>& state,
                            const PredictionNetConfig& cfg,
                            const PredictionParams<T>& params);

// State after consuming START from zeros: where every decode begins.
template <typename T>
PredState<T> initial_pred_state(const PredictionNetConfig& cfg,
                                const PredictionParams<T>& params);

// Teacher-forced pass over [START, labels...] used for training.
template <typename T>
struct PredSequenceCache {
  struct Step {
    std::vector<BasicTensor<T>> input;     // per layer
    std::vector<BasicTensor<T>> h_prev, c_prev;
    std::vector<BasicTensor<T>> gates;     // activated [i f g o]
    std::vector<BasicTensor<T>> c_new, tanh_c;
  };
  std::vector<int> tokens;
  std::vector<Step> steps;
};

// Returns [(U+1) x units]: row u is the output after consuming u labels.
template <typename T>
BasicTensor<T> prediction_forward(std::span<const int> labels,
                                  const PredictionNetConfig& cfg,
                                  const PredictionParams<T>& params,
                                  PredSequenceCache<T>* cache = nullptr);

template <typename T>
void prediction_backward(const PredictionNetConfig& cfg, PredictionParams<T>& params,
                         const PredSequenceCache<T>& cache, const BasicTensor<T>& d_out);

}  // namespace asyncrev
