#include <arm_neon.h>

#include "asyncrev/kernels/kernels.hpp"

namespace asyncrev::kernels::detail {
namespace {

// vmlaq_f32 may fuse on some cores, so multiply and add are issued apart.

void gemm_acc_neon(std::size_t m, std::size_t k, std::size_t n,
                   const float* a, std::size_t lda, const float* b,
                   std::size_t ldb, float* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    float* crow = c + i * ldc;
    for (std::size_t p = 0; p < k; ++p) {
      const float aip = a[i * lda + p];
      const float32x4_t va = vdupq_n_f32(aip);
      const float* brow = b + p * ldb;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        float32x4_t vc = vld1q_f32(crow + j);
        vc = vaddq_f32(vc, vmulq_f32(va, vld1q_f32(brow + j)));
        vst1q_f32(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_at_acc_neon(std::size_t m, std::size_t k, std::size_t n,
                      const float* a, std::size_t lda, const float* b,
                      std::size_t ldb, float* c, std::size_t ldc) {
  for (std::size_t t = 0; t < m; ++t) {
    const float* brow = b + t * ldb;
    for (std::size_t i = 0; i < k; ++i) {
      const float ati = a[t * lda + i];
      const float32x4_t va = vdupq_n_f32(ati);
      float* crow = c + i * ldc;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        float32x4_t vc = vld1q_f32(crow + j);
        vc = vaddq_f32(vc, vmulq_f32(va, vld1q_f32(brow + j)));
        vst1q_f32(crow + j, vc);
      }
      for (; j < n; ++j) crow[j] += ati * brow[j];
    }
  }
}

void axpy_neon(std::size_t n, float alpha, const float* x, float* y) {
  const float32x4_t va = vdupq_n_f32(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f32(y + i, vaddq_f32(vld1q_f32(y + i), vmulq_f32(va, vld1q_f32(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_acc_neon(std::size_t n, const float* a, const float* x, float* y) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f32(y + i, vaddq_f32(vld1q_f32(y + i),
                               vmulq_f32(vld1q_f32(a + i), vld1q_f32(x + i))));
  }
  for (; i < n; ++i) y[i] += a[i] * x[i];
}

void add_neon(std::size_t n, const float* x, float* y) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f32(y + i, vaddq_f32(vld1q_f32(y + i), vld1q_f32(x + i)));
  }
  for (; i < n; ++i) y[i] += x[i];
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{
      Backend::kNeon, &gemm_acc_neon, &gemm_at_acc_neon,
      &axpy_neon,     &mul_acc_neon,  &add_neon,
  };
  return table;
}

}  // namespace asyncrev::kernels::detail
