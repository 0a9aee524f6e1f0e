#include "asyncrev/transducer/greedy.hpp"

#include <algorithm>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/transducer/rnnt_loss.hpp"

namespace asyncrev {

void Hypothesis::append(const Hypothesis& other) {
  tokens.insert(tokens.end(), other.tokens.begin(), other.tokens.end());
  emit_frame.insert(emit_frame.end(), other.emit_frame.begin(), other.emit_frame.end());
}

template <typename T>
GreedyResumeResult<T> greedy_decode_rows(const BasicTensor<T>& enc, std::size_t row_begin,
                                         std::size_t row_end, const BasicModel<T>& model,
                                         const PredState<T>& start, long frame_offset,
                                         const GreedyOptions& options) {
  if (row_end > enc.rows() || row_begin > row_end)
    throw DimensionError("greedy decode: row range outside encoder output");
  GreedyResumeResult<T> result{{}, start};
  const auto& pc = model.config.prediction;
  const std::size_t width = enc.cols();
  for (std::size_t r = row_begin; r < row_end; ++r) {
    const BasicTensor<T> frame({1, width}, std::vector<T>(enc.row(r).begin(), enc.row(r).end()));
    for (int emitted = 0; emitted < options.max_emit; ++emitted) {
      const auto logits = joint(frame, result.state.output(), model.params.joint);
      const auto vals = logits.values();
      // max_element returns the first maximum: lowest index wins ties.
      const auto best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
      if (best == kBlank) break;
      const int token = best - 1;
      result.delta.tokens.push_back(token);
      result.delta.emit_frame.push_back(frame_offset + static_cast<long>(r - row_begin));
      result.state = pred_step(token, result.state, pc, model.params.prediction).state;
    }
  }
  return result;
}

template <typename T>
GreedyResumeResult<T> greedy_decode_resume(const BasicTensor<T>& enc, const BasicModel<T>& model,
                                           const PredState<T>& start, long frame_offset,
                                           const GreedyOptions& options) {
  return greedy_decode_rows(enc, 0, enc.rows(), model, start, frame_offset, options);
}

template <typename T>
Hypothesis greedy_decode(const BasicTensor<T>& enc, const BasicModel<T>& model,
                         const GreedyOptions& options) {
  const auto start = initial_pred_state(model.config.prediction, model.params.prediction);
  return greedy_decode_rows(enc, 0, enc.rows(), model, start, 0, options).delta;
}

Hypothesis offline_decode(const Tensor& features, const Model& model, const GreedyOptions& options) {
  if (features.rows() == 0) return {};
  const auto enc = encoder_forward(features, model.config.encoder, model.params.encoder);
  return greedy_decode(enc, model, options);
}

template Hypothesis greedy_decode(const BasicTensor<float>&, const BasicModel<float>&,
                                  const GreedyOptions&);
template Hypothesis greedy_decode(const BasicTensor<double>&, const BasicModel<double>&,
                                  const GreedyOptions&);
template GreedyResumeResult<float> greedy_decode_resume(const BasicTensor<float>&,
                                                        const BasicModel<float>&,
                                                        const PredState<float>&, long,
                                                        const GreedyOptions&);
template GreedyResumeResult<double> greedy_decode_resume(const BasicTensor<double>&,
                                                         const BasicModel<double>&,
                                                         const PredState<double>&, long,
                                                         const GreedyOptions&);
template GreedyResumeResult<float> greedy_decode_rows(const BasicTensor<float>&, std::size_t,
                                                      std::size_t, const BasicModel<float>&,
                                                      const PredState<float>&, long,
                                                      const GreedyOptions&);
template GreedyResumeResult<double> greedy_decode_rows(const BasicTensor<double>&, std::size_t,
                                                       std::size_t, const BasicModel<double>&,
                                                       const PredState<double>&, long,
                                                       const GreedyOptions&);

}  // namespace asyncrev
