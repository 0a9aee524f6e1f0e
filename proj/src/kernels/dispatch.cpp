#include <atomic>
#include <cstdlib>
#include <string>

#include "asyncrev/core/errors.hpp"
#include "asyncrev/kernels/kernels.hpp"

namespace asyncrev::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(ASYNCREV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* best_table() {
  if (const char* env = std::getenv("ASYNCREV_KERNELS")) {
    auto requested = parse_backend(env);
    if (requested && supported(*requested)) return &table(*requested);
  }
#if defined(ASYNCREV_HAVE_AVX2)
  if (cpu_has_avx2()) return &detail::avx2_table();
#endif
#if defined(ASYNCREV_HAVE_NEON)
  return &detail::neon_table();
#endif
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{best_table()};
  return ptr;
}

}  // namespace

bool supported(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
      return cpu_has_avx2();
    case Backend::kNeon:
#if defined(ASYNCREV_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend backend) {
  if (!supported(backend)) {
    throw ConfigError("kernel backend '" + std::string(backend_name(backend)) +
                      "' is not available on this build/CPU");
  }
  switch (backend) {
#if defined(ASYNCREV_HAVE_AVX2)
    case Backend::kAvx2:
      return detail::avx2_table();
#endif
#if defined(ASYNCREV_HAVE_NEON)
    case Backend::kNeon:
      return detail::neon_table();
#endif
    default:
      return detail::scalar_table();
  }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Backend active_backend() { return active().backend; }

void set_backend(Backend backend) {
  current().store(&table(backend), std::memory_order_release);
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  return std::nullopt;
}

}  // namespace asyncrev::kernels
