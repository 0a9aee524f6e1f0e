#include <immintrin.h>

#include "asyncrev/kernels/kernels.hpp"

namespace asyncrev::kernels::detail {
namespace {

// 8 lanes per register; tails fall back to the scalar expression. mul and add
// stay separate instructions (no FMA) to match the reference rounding.

void gemm_acc_avx2(std::size_t m, std::size_t k, std::size_t n,
                   const float* a, std::size_t lda, const float* b,
                   std::size_t ldb, float* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    float* crow = c + i * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const float aip = a[i * lda + p];
      const __m256 va = _mm256_set1_ps(aip);
      const float* brow = b + p * ldb;
      std::size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 vc = _mm256_loadu_ps(crow + j);
        vc = _mm256_add_ps(vc, _mm256_mul_ps(va, _mm256_loadu_ps(brow + j)));
        _mm256_storeu_ps(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_at_acc_avx2(std::size_t m, std::size_t k, std::size_t n,
                      const float* a, std::size_t lda, const float* b,
                      std::size_t ldb, float* c, std::size_t ldc) {
  for (std::size_t t = 0; t < m; ++t) {
    const float* brow = b + t * ldb;
    for (std::size_t i = 0; i < k; ++i) {
      const float ati = a[t * lda + i];
      const __m256 va = _mm256_set1_ps(ati);
      float* crow = c + i * ldc;
      std::size_t j = 0;
      for (; j + 8 <= n; j += 8) {
        __m256 vc = _mm256_loadu_ps(crow + j);
        vc = _mm256_add_ps(vc, _mm256_mul_ps(va, _mm256_loadu_ps(brow + j)));
        _mm256_storeu_ps(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += ati * brow[j];
    }
  }
}

void axpy_avx2(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_add_ps(vy, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_acc_avx2(std::size_t n, const float* a, const float* x, float* y) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_add_ps(
        vy, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(x + i)));
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a[i] * x[i];
}

void add_avx2(std::size_t n, const float* x, float* y) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(
        y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_loadu_ps(x + i)));
  }
  for (; i < n; ++i) y[i] += x[i];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      Backend::kAvx2, &gemm_acc_avx2, &gemm_at_acc_avx2,
      &axpy_avx2,     &mul_acc_avx2,  &add_avx2,
  };
  return table;
}

}  // namespace asyncrev::kernels::detail
