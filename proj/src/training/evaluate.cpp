#include "asyncrev/training/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/training/metrics.hpp"

namespace asyncrev {

EvalResult evaluate(const std::shared_ptr<const Model>& model, const Dataset& data,
                    const std::optional<RevisionPolicy>& policy, int threads) {
  if (data.empty()) throw ConfigError("evaluate: empty dataset");
  if (!model) throw ConfigError("evaluate: no model");
  if (policy) validate(*policy, model->config.encoder);

  std::vector<UtteranceResult> results(data.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < data.size() && !failed; i = next++) {
      try {
        const auto& utt = data[i];
        auto& r = results[i];
        r.id = utt.id;
        r.reference = utt.labels;
        r.hypothesis = policy ? stream_decode(model, utt.features, *policy)
                              : offline_decode(utt.features, *model);
        r.edits = edit_distance(r.reference, r.hypothesis.tokens);
        r.cer = cer(r.reference, r.hypothesis.tokens);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(data.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(results.begin(), results.end(),
            [](const UtteranceResult& a, const UtteranceResult& b) { return a.id < b.id; });
  EvalResult out;
  double sum = 0.0;
  for (const auto& r : results) {
    out.edits += r.edits;
    out.reference_tokens += r.reference.size();
    sum += r.cer;
  }
  out.cer = out.reference_tokens ? static_cast<double>(out.edits) /
                                       static_cast<double>(out.reference_tokens)
                                 : static_cast<double>(out.edits);
  out.mean_utterance_cer = sum / static_cast<double>(results.size());
  out.utterances = std::move(results);
  return out;
}

}  // namespace asyncrev
