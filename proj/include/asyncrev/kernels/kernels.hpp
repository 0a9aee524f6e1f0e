#pragma once

// Dense float kernels with a scalar reference and vector variants selected at
// runtime. Every variant vectorizes across output columns only and keeps the
// reduction index in the same sequential order as the scalar loop, with
// separate multiply and add, so all backends produce bit-identical results.

#include <cstddef>
#include <optional>
#include <string_view>

namespace asyncrev::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  Backend backend;
  // C[m x n] += A[m x k] * B[k x n]; loop order i, p, j.
  void (*gemm_acc)(std::size_t m, std::size_t k, std::size_t n, const float* a,
                   std::size_t lda, const float* b, std::size_t ldb, float* c,
                   std::size_t ldc);
  // C[k x n] += A[m x k]^T * B[m x n]; loop order t, i, j.
  void (*gemm_at_acc)(std::size_t m, std::size_t k, std::size_t n,
                      const float* a, std::size_t lda, const float* b,
                      std::size_t ldb, float* c, std::size_t ldc);
  // y += alpha * x
  void (*axpy)(std::size_t n, float alpha, const float* x, float* y);
  // y += a * x (elementwise)
  void (*mul_acc)(std::size_t n, const float* a, const float* x, float* y);
  // y += x
  void (*add)(std::size_t n, const float* x, float* y);
};

bool supported(Backend backend);

// Throws ConfigError when the backend is not compiled in or not supported by
// the running CPU.
const KernelTable& table(Backend backend);

// The process-wide table. Initialized to the best supported backend, or to
// the one named by the ASYNCREV_KERNELS environment variable.
const KernelTable& active();
Backend active_backend();
void set_backend(Backend backend);

std::string_view backend_name(Backend backend);
std::optional<Backend> parse_backend(std::string_view name);

namespace detail {
const KernelTable& scalar_table();
#if defined(ASYNCREV_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(ASYNCREV_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace asyncrev::kernels
