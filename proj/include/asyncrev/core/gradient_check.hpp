#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "asyncrev/core/parameter.hpp"
#include "asyncrev/core/rng.hpp"

namespace asyncrev {

struct GradientCheckOptions {
  std::size_t samples = 200;
  // In double, 1e-4 balances truncation error against the rounding noise that
  // swamps small gradients at smaller steps.
  double eps = 1e-4;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  // The floor keeps coordinates whose true gradient is ~0 from reporting
  // rounding noise as a relative error of order one.
  double floor = 1e-6;
};

struct GradientCheckResult {
  double max_rel_error = 0.0;
  std::size_t samples = 0;
  std::string worst;  // "<param>[<index>]"
};

// Compares the gradients currently stored in `params` against central finite
// differences of `loss` at `samples` coordinates drawn uniformly over all
// parameter entries. `loss` must be deterministic and must not touch grads.
// Throws NumericError when the loss is non-finite.
GradientCheckResult gradient_check(const std::function<double()>& loss,
                                   const std::vector<NamedParameter<double>>& params,
                                   SeededRng& rng,
                                   const GradientCheckOptions& options = {});

}  // namespace asyncrev
