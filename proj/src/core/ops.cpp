#include "asyncrev/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asyncrev/kernels/reference.hpp"

namespace asyncrev {

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

namespace {

template <typename T>
void check_matrix(const BasicTensor<T>& t, const char* what) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(what) + ": expected rank-2 tensor, got " +
                         shape_string(t.shape()));
  }
}

std::size_t last_dim(const std::vector<std::size_t>& shape) {
  return shape.empty() ? 0 : shape.back();
}

}  // namespace

template <typename T>
BasicTensor<T> matmul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  check_matrix(a, "matmul");
  check_matrix(b, "matmul");
  auto c = BasicTensor<T>::matrix(a.rows(), b.dim(1));
  matmul_acc(a, b, c);
  return c;
}

template <typename T>
void matmul_acc(const BasicTensor<T>& a, const BasicTensor<T>& b,
                BasicTensor<T>& c) {
  check_matrix(a, "matmul");
  check_matrix(b, "matmul");
  check_matrix(c, "matmul");
  if (a.dim(1) != b.dim(0) || c.dim(0) != a.dim(0) || c.dim(1) != b.dim(1)) {
    throw DimensionError("matmul: " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()) + " -> " +
                         shape_string(c.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  kernels::gemm_acc(m, k, n, a.data(), k, b.data(), n, c.data(), n);
}

template <typename T>
void matmul_at_acc(const BasicTensor<T>& a, const BasicTensor<T>& b,
                   BasicTensor<T>& c) {
  check_matrix(a, "matmul_at");
  check_matrix(b, "matmul_at");
  check_matrix(c, "matmul_at");
  if (a.dim(0) != b.dim(0) || c.dim(0) != a.dim(1) || c.dim(1) != b.dim(1)) {
    throw DimensionError("matmul_at: " + shape_string(a.shape()) + "^T x " +
                         shape_string(b.shape()) + " -> " +
                         shape_string(c.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  kernels::gemm_at_acc(m, k, n, a.data(), k, b.data(), n, c.data(), n);
}

template <typename T>
BasicTensor<T> transpose(const BasicTensor<T>& a) {
  check_matrix(a, "transpose");
  auto out = BasicTensor<T>::matrix(a.dim(1), a.dim(0));
  for (std::size_t i = 0; i < a.dim(0); ++i)
    for (std::size_t j = 0; j < a.dim(1); ++j) out(j, i) = a(i, j);
  return out;
}

template <typename T>
T logsumexp(std::span<const T> v) {
  if (v.empty()) throw DimensionError("logsumexp of empty input");
  if (v.size() == 1) return v[0];
  const T m = *std::max_element(v.begin(), v.end());
  if (std::isinf(m)) return m;
  T s = 0;
  for (T x : v) s += std::exp(x - m);
  return m + std::log(s);
}

template <typename T>
T sigmoid(T x) {
  if (x >= 0) return T{1} / (T{1} + std::exp(-x));
  const T e = std::exp(x);
  return e / (T{1} + e);
}

template <typename T>
BasicTensor<T> sigmoid(const BasicTensor<T>& x) {
  BasicTensor<T> y = x;
  for (auto& v : y.values()) v = sigmoid(v);
  return y;
}

template <typename T>
BasicTensor<T> tanh(const BasicTensor<T>& x) {
  BasicTensor<T> y = x;
  for (auto& v : y.values()) v = std::tanh(v);
  return y;
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x) {
  BasicTensor<T> y = x;
  for (auto& v : y.values()) v = v > T{0} ? v : T{0};
  return y;
}

namespace {
template <typename T, typename F>
BasicTensor<T> zip_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy,
                            F f) {
  if (y.shape() != dy.shape()) {
    throw DimensionError("activation backward: shape mismatch " +
                         shape_string(y.shape()) + " vs " +
                         shape_string(dy.shape()));
  }
  BasicTensor<T> dx(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) dx[i] = f(y[i], dy[i]);
  return dx;
}
}  // namespace

template <typename T>
BasicTensor<T> sigmoid_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy) {
  return zip_backward(y, dy, [](T s, T g) { return g * s * (T{1} - s); });
}

template <typename T>
BasicTensor<T> tanh_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy) {
  return zip_backward(y, dy, [](T t, T g) { return g * (T{1} - t * t); });
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy) {
  return zip_backward(y, dy, [](T r, T g) { return r > T{0} ? g : T{0}; });
}

template <typename T>
void log_softmax_inplace(std::span<T> row) {
  if (row.empty()) throw DimensionError("log_softmax of empty row");
  const T lse = logsumexp(std::span<const T>(row.data(), row.size()));
  for (auto& v : row) v -= lse;
}

template <typename T>
BasicTensor<T> log_softmax(const BasicTensor<T>& x) {
  const std::size_t n = last_dim(x.shape());
  if (n == 0) throw DimensionError("log_softmax: empty last dimension");
  BasicTensor<T> y = x;
  for (std::size_t off = 0; off < y.size(); off += n)
    log_softmax_inplace(std::span<T>(y.data() + off, n));
  return y;
}

template <typename T>
BasicTensor<T> log_softmax_backward(const BasicTensor<T>& y,
                                    const BasicTensor<T>& dy) {
  if (y.shape() != dy.shape())
    throw DimensionError("log_softmax_backward: shape mismatch");
  const std::size_t n = last_dim(y.shape());
  BasicTensor<T> dx(y.shape());
  for (std::size_t off = 0; off < y.size(); off += n) {
    T total = 0;
    for (std::size_t j = 0; j < n; ++j) total += dy[off + j];
    for (std::size_t j = 0; j < n; ++j)
      dx[off + j] = dy[off + j] - std::exp(y[off + j]) * total;
  }
  return dx;
}

template <typename T>
bool all_finite(std::span<const T> v) {
  return std::all_of(v.begin(), v.end(), [](T x) { return std::isfinite(x); });
}

#define ASYNCREV_INSTANTIATE_OPS(T)                                           \
  template BasicTensor<T> matmul(const BasicTensor<T>&, const BasicTensor<T>&); \
  template void matmul_acc(const BasicTensor<T>&, const BasicTensor<T>&,      \
                           BasicTensor<T>&);                                  \
  template void matmul_at_acc(const BasicTensor<T>&, const BasicTensor<T>&,   \
                              BasicTensor<T>&);                               \
  template BasicTensor<T> transpose(const BasicTensor<T>&);                   \
  template T logsumexp(std::span<const T>);                                   \
  template T sigmoid(T);                                                      \
  template BasicTensor<T> sigmoid(const BasicTensor<T>&);                     \
  template BasicTensor<T> tanh(const BasicTensor<T>&);                        \
  template BasicTensor<T> relu(const BasicTensor<T>&);                        \
  template BasicTensor<T> sigmoid_backward(const BasicTensor<T>&,             \
                                           const BasicTensor<T>&);            \
  template BasicTensor<T> tanh_backward(const BasicTensor<T>&,                \
                                        const BasicTensor<T>&);               \
  template BasicTensor<T> relu_backward(const BasicTensor<T>&,                \
                                        const BasicTensor<T>&);               \
  template BasicTensor<T> log_softmax(const BasicTensor<T>&);                 \
  template void log_softmax_inplace(std::span<T>);                            \
  template BasicTensor<T> log_softmax_backward(const BasicTensor<T>&,         \
                                               const BasicTensor<T>&);        \
  template bool all_finite(std::span<const T>);

ASYNCREV_INSTANTIATE_OPS(float)
ASYNCREV_INSTANTIATE_OPS(double)

}  // namespace asyncrev
