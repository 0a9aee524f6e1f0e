#include "asyncrev/core/gradient_check.hpp"

#include <algorithm>
#include <cmath>

#include "asyncrev/core/errors.hpp"

namespace asyncrev {

GradientCheckResult gradient_check(const std::function<double()>& loss,
                                   const std::vector<NamedParameter<double>>& params,
                                   SeededRng& rng,
                                   const GradientCheckOptions& options) {
  std::size_t total = 0;
  for (const auto& p : params) total += p.param->value.size();
  GradientCheckResult result;
  if (total == 0) return result;

  auto eval = [&]() {
    const double v = loss();
    if (!std::isfinite(v)) throw NumericError("gradient_check: non-finite loss");
    return v;
  };
  eval();

  for (std::size_t s = 0; s < options.samples; ++s) {
    std::size_t flat = rng.below(total);
    std::size_t which = 0;
    while (flat >= params[which].param->value.size()) {
      flat -= params[which].param->value.size();
      ++which;
    }
    auto& param = *params[which].param;
    double& slot = param.value[flat];
    const double saved = slot;
    slot = saved + options.eps;
    const double plus = eval();
    slot = saved - options.eps;
    const double minus = eval();
    slot = saved;

    const double numeric = (plus - minus) / (2.0 * options.eps);
    const double analytic = param.grad[flat];
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), options.floor});
    const double rel = std::abs(analytic - numeric) / denom;
    if (result.worst.empty() || rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst = params[which].name + "[" + std::to_string(flat) + "]";
    }
    ++result.samples;
  }
  return result;
}

}  // namespace asyncrev
