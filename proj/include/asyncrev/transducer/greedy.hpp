#pragma once

#include <vector>

#include "asyncrev/model/model.hpp"

namespace asyncrev {

struct Hypothesis {
  std::vector<int> tokens;      // vocabulary indices
  std::vector<long> emit_frame;  // encoder frame of each token, non-decreasing

  std::size_t size() const { return tokens.size(); }
  void append(const Hypothesis& other);
  bool operator==(const Hypothesis&) const = default;
};

struct GreedyOptions {
  int max_emit = 10;  // non-blank emissions per frame before a forced advance
};

template <typename T>
struct GreedyResumeResult {
  Hypothesis delta;
  PredState<T> state;
};

// Frame-synchronous greedy search from the START state. At each frame the
// joint is applied repeatedly: blank advances, anything else is emitted and
// fed to the prediction network. Ties go to the lowest index.
template <typename T>
Hypothesis greedy_decode(const BasicTensor<T>& enc, const BasicModel<T>& model,
                         const GreedyOptions& options = {});

// Continue decoding `enc` rows from `start`; rows are numbered from
// frame_offset in the returned emit frames.
template <typename T>
GreedyResumeResult<T> greedy_decode_resume(const BasicTensor<T>& enc, const BasicModel<T>& model,
                                           const PredState<T>& start, long frame_offset,
                                           const GreedyOptions& options = {});

// Same, over rows [row_begin, row_end) of enc without copying.
template <typename T>
GreedyResumeResult<T> greedy_decode_rows(const BasicTensor<T>& enc, std::size_t row_begin,
                                         std::size_t row_end, const BasicModel<T>& model,
                                         const PredState<T>& start, long frame_offset,
                                         const GreedyOptions& options = {});

// Full offline path: encoder over the whole utterance, then greedy search.
Hypothesis offline_decode(const Tensor& features, const Model& model,
                          const GreedyOptions& options = {});

}  // namespace asyncrev
