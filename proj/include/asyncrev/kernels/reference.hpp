#pragma once

// Scalar reference loops. These define the summation order that every
// vectorized variant must reproduce exactly.

#include <cstddef>
#include <type_traits>

#include "asyncrev/kernels/kernels.hpp"

namespace asyncrev::kernels {

namespace ref {

template <typename T>
void gemm_acc(std::size_t m, std::size_t k, std::size_t n, const T* a,
              std::size_t lda, const T* b, std::size_t ldb, T* c,
              std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = a[i * lda + p];
      const T* brow = b + p * ldb;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

template <typename T>
void gemm_at_acc(std::size_t m, std::size_t k, std::size_t n, const T* a,
                 std::size_t lda, const T* b, std::size_t ldb, T* c,
                 std::size_t ldc) {
  for (std::size_t t = 0; t < m; ++t) {
    const T* brow = b + t * ldb;
    for (std::size_t i = 0; i < k; ++i) {
      const T ati = a[t * lda + i];
      T* crow = c + i * ldc;
      for (std::size_t j = 0; j < n; ++j) crow[j] += ati * brow[j];
    }
  }
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void mul_acc(std::size_t n, const T* a, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * x[i];
}

template <typename T>
void add(std::size_t n, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

}  // namespace ref

// Typed front end: float goes through the active backend, anything else
// through the reference loops.

template <typename T>
void gemm_acc(std::size_t m, std::size_t k, std::size_t n, const T* a,
              std::size_t lda, const T* b, std::size_t ldb, T* c,
              std::size_t ldc) {
  if constexpr (std::is_same_v<T, float>) {
    active().gemm_acc(m, k, n, a, lda, b, ldb, c, ldc);
  } else {
    ref::gemm_acc(m, k, n, a, lda, b, ldb, c, ldc);
  }
}

template <typename T>
void gemm_at_acc(std::size_t m, std::size_t k, std::size_t n, const T* a,
                 std::size_t lda, const T* b, std::size_t ldb, T* c,
                 std::size_t ldc) {
  if constexpr (std::is_same_v<T, float>) {
    active().gemm_at_acc(m, k, n, a, lda, b, ldb, c, ldc);
  } else {
    ref::gemm_at_acc(m, k, n, a, lda, b, ldb, c, ldc);
  }
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  if constexpr (std::is_same_v<T, float>) {
    active().axpy(n, alpha, x, y);
  } else {
    ref::axpy(n, alpha, x, y);
  }
}

template <typename T>
void mul_acc(std::size_t n, const T* a, const T* x, T* y) {
  if constexpr (std::is_same_v<T, float>) {
    active().mul_acc(n, a, x, y);
  } else {
    ref::mul_acc(n, a, x, y);
  }
}

template <typename T>
void add(std::size_t n, const T* x, T* y) {
  if constexpr (std::is_same_v<T, float>) {
    active().add(n, x, y);
  } else {
    ref::add(n, x, y);
  }
}

}  // namespace asyncrev::kernels
