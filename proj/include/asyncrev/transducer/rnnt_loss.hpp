#pragma once

#include <cstdint>
#include <span>

#include "asyncrev/core/tensor.hpp"

namespace asyncrev {

inline constexpr int kBlank = 0;

// Lattice logits are [T' x (U+1) x (vocab+1)], blank at index 0; label token
// k (0-based vocabulary index) is output index k + 1.
template <typename T>
struct RnntLossResult {
  double nll = 0.0;
  BasicTensor<T> grad;  // d nll / d logits, same shape as the lattice
};

// Negative log-likelihood of `labels` by the log-space forward recursion
//   alpha(t,u) = logaddexp(alpha(t-1,u) + blank(t-1,u), alpha(t,u-1) + y(t,u-1))
// with gradients from the matching backward (beta) recursion. Log-softmax
// runs in T; the recursions accumulate in double.
// Throws InfeasibleError if U > 0 and T' = 0, DimensionError on shape errors.
template <typename T>
RnntLossResult<T> rnnt_loss(const BasicTensor<T>& lattice, std::span<const int> labels);

// Reference that enumerates every monotone alignment explicitly and sums the
// path probabilities. Only for T' * (U+1) <= 20; otherwise SizeError.
template <typename T>
double rnnt_loss_bruteforce(const BasicTensor<T>& lattice, std::span<const int> labels);

// Number of valid alignments for T' frames and U labels: the last symbol is
// always the final blank, so C(T' + U - 1, U).
std::uint64_t alignment_count(std::size_t frames, std::size_t labels);

}  // namespace asyncrev
