#pragma once

#include <span>

#include "asyncrev/core/tensor.hpp"

namespace asyncrev {

// a[m x k] * b[k x n]. Fixed i, p, j loop order through the active kernel.
template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b);

// c += a * b, shapes as for matmul.
template <typename T>
void matmul_acc(const BasicTensor<T>& a, const BasicTensor<T>& b,
                BasicTensor<T>& c);

// c += a^T * b, a[m x k], b[m x n], c[k x n].
template <typename T>
void matmul_at_acc(const BasicTensor<T>& a, const BasicTensor<T>& b,
                   BasicTensor<T>& c);

template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a);

// Max-shifted log(sum(exp(v))). Throws DimensionError on empty input.
template <typename T>
T logsumexp(std::span<const T> v);

template <typename T>
T sigmoid(T x);

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> tanh(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x);

// Backward passes take the forward *output* and the upstream gradient.
template <typename T>
BasicTensor<T> sigmoid_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy);
template <typename T>
BasicTensor<T> tanh_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy);
template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy);

// Row-wise over the last axis (rows = size / last dim).
template <typename T>
BasicTensor<T> log_softmax(const BasicTensor<T>& x);
template <typename T>
void log_softmax_inplace(std::span<T> row);
template <typename T>
BasicTensor<T> log_softmax_backward(const BasicTensor<T>& y,
                                    const BasicTensor<T>& dy);

template <typename T>
bool all_finite(std::span<const T> v);

}  // namespace asyncrev
