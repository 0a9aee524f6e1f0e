#include "asyncrev/transducer/rnnt_loss.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/core/ops.hpp"

namespace asyncrev {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

struct LatticeShape {
  std::size_t frames, steps, classes;
};

template <typename T>
LatticeShape check_lattice(const BasicTensor<T>& lattice, std::span<const int> labels) {
  if (lattice.rank() != 3) throw DimensionError("rnnt: lattice must be rank 3");
  LatticeShape s{lattice.dim(0), lattice.dim(1), lattice.dim(2)};
  if (s.steps != labels.size() + 1)
    throw DimensionError("rnnt: lattice has " + std::to_string(s.steps) +
                         " label positions for " + std::to_string(labels.size()) + " labels");
  if (s.classes < 2) throw DimensionError("rnnt: need blank plus at least one label");
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) + 1 >= s.classes)
      throw DimensionError("rnnt: label " + std::to_string(y) + " outside vocabulary");
  }
  if (s.frames == 0) {
    if (!labels.empty()) throw InfeasibleError("rnnt: labels with zero encoder frames");
    throw DimensionError("rnnt: zero encoder frames");
  }
  return s;
}

}  // namespace

template <typename T>
RnntLossResult<T> rnnt_loss(const BasicTensor<T>& lattice, std::span<const int> labels) {
  const auto [frames, steps, classes] = check_lattice(lattice, labels);
  const std::size_t U = steps - 1;
  const auto logp = log_softmax(lattice);
  auto lp = [&](std::size_t t, std::size_t u, std::size_t k) -> double {
    return static_cast<double>(logp[(t * steps + u) * classes + k]);
  };
  auto blank = [&](std::size_t t, std::size_t u) { return lp(t, u, kBlank); };
  auto emit = [&](std::size_t t, std::size_t u) {
    return lp(t, u, static_cast<std::size_t>(labels[u]) + 1);
  };

  std::vector<double> alpha(frames * steps, kNegInf), beta(frames * steps, kNegInf);
  auto A = [&](std::size_t t, std::size_t u) -> double& { return alpha[t * steps + u]; };
  auto B = [&](std::size_t t, std::size_t u) -> double& { return beta[t * steps + u]; };

  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      if (t == 0 && u == 0) {
        A(0, 0) = 0.0;
        continue;
      }
      double v = kNegInf;
      if (t > 0) v = A(t - 1, u) + blank(t - 1, u);
      if (u > 0) v = log_add(v, A(t, u - 1) + emit(t, u - 1));
      A(t, u) = v;
    }
  }
  for (std::size_t t = frames; t-- > 0;) {
    for (std::size_t u = U + 1; u-- > 0;) {
      if (t == frames - 1 && u == U) {
        B(t, u) = blank(t, u);
        continue;
      }
      double v = kNegInf;
      if (t + 1 < frames) v = B(t + 1, u) + blank(t, u);
      if (u < U) v = log_add(v, B(t, u + 1) + emit(t, u));
      B(t, u) = v;
    }
  }
  const double log_prob = A(frames - 1, U) + blank(frames - 1, U);

  RnntLossResult<T> result;
  result.nll = -log_prob;
  // d nll / d logp at the used transitions, then through log-softmax.
  BasicTensor<T> dlogp(lattice.shape());
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      const double a = A(t, u);
      double next_blank = kNegInf;
      if (t + 1 < frames) next_blank = B(t + 1, u);
      else if (u == U) next_blank = 0.0;
      if (next_blank != kNegInf)
        dlogp[(t * steps + u) * classes + kBlank] =
            static_cast<T>(-std::exp(a + blank(t, u) + next_blank - log_prob));
      if (u < U)
        dlogp[(t * steps + u) * classes + static_cast<std::size_t>(labels[u]) + 1] =
            static_cast<T>(-std::exp(a + emit(t, u) + B(t, u + 1) - log_prob));
    }
  }
  result.grad = log_softmax_backward(logp, dlogp);
  return result;
}

template <typename T>
double rnnt_loss_bruteforce(const BasicTensor<T>& lattice, std::span<const int> labels) {
  const auto [frames, steps, classes] = check_lattice(lattice, labels);
  if (frames * steps > 20)
    throw SizeError("rnnt brute force limited to 20 lattice cells, got " +
                    std::to_string(frames * steps));
  const std::size_t U = steps - 1;
  const auto logp = log_softmax(lattice);
  auto lp = [&](std::size_t t, std::size_t u, std::size_t k) -> double {
    return static_cast<double>(logp[(t * steps + u) * classes + k]);
  };

  // Depth-first over symbol sequences; each complete path's log-probability
  // is collected and the total is summed once at the end.
  std::vector<double> paths;
  std::function<void(std::size_t, std::size_t, double)> walk =
      [&](std::size_t t, std::size_t u, double acc) {
        if (u < U) walk(t, u + 1, acc + lp(t, u, static_cast<std::size_t>(labels[u]) + 1));
        const double with_blank = acc + lp(t, u, kBlank);
        if (t + 1 < frames) walk(t + 1, u, with_blank);
        else if (u == U) paths.push_back(with_blank);
      };
  walk(0, 0, 0.0);
  return -logsumexp(std::span<const double>(paths));
}

std::uint64_t alignment_count(std::size_t frames, std::size_t labels) {
  if (frames == 0) return 0;
  // C(frames - 1 + labels, labels) computed incrementally, exact in integers.
  std::uint64_t c = 1;
  for (std::size_t i = 1; i <= labels; ++i) c = c * (frames - 1 + i) / i;
  return c;
}

template RnntLossResult<float> rnnt_loss(const BasicTensor<float>&, std::span<const int>);
template RnntLossResult<double> rnnt_loss(const BasicTensor<double>&, std::span<const int>);
template double rnnt_loss_bruteforce(const BasicTensor<float>&, std::span<const int>);
template double rnnt_loss_bruteforce(const BasicTensor<double>&, std::span<const int>);

}  // namespace asyncrev
