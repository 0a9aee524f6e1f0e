#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asyncrev/stream/session.hpp"
#include "asyncrev/training/synthetic.hpp"

namespace asyncrev {

struct UtteranceResult {
  std::string id;
  std::vector<int> reference;
  Hypothesis hypothesis;
  std::size_t edits = 0;
  double cer = 0.0;
};

struct EvalResult {
  // Corpus CER: total edits over total reference tokens.
  double cer = 0.0;
  // Unweighted mean of per-utterance CERs.
  double mean_utterance_cer = 0.0;
  std::size_t edits = 0;
  std::size_t reference_tokens = 0;
  std::vector<UtteranceResult> utterances;  // sorted by id
};

// Streaming decode under `policy`, or offline decode when it is empty.
// Utterances are spread over `threads` workers; results do not depend on the
// thread count or on dataset order.
EvalResult evaluate(const std::shared_ptr<const Model>& model, const Dataset& data,
                    const std::optional<RevisionPolicy>& policy, int threads = 1);

}  // namespace asyncrev
