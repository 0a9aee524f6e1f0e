#include "asyncrev/kernels/kernels.hpp"
#include "asyncrev/kernels/reference.hpp"

namespace asyncrev::kernels::detail {

const KernelTable& scalar_table() {
  static const KernelTable table{
      Backend::kScalar,     &ref::gemm_acc<float>, &ref::gemm_at_acc<float>,
      &ref::axpy<float>,    &ref::mul_acc<float>,  &ref::add<float>,
  };
  return table;
}

}  // namespace asyncrev::kernels::detail
