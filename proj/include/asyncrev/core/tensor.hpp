#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asyncrev/core/errors.hpp"

namespace asyncrev {

std::string shape_string(const std::vector<std::size_t>& shape);

// Dense row-major tensor. Most of the code uses rank 2 (rows = time).
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;

  explicit BasicTensor(std::vector<std::size_t> shape, T fill = T{0})
      : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

  BasicTensor(std::vector<std::size_t> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != element_count(shape_)) {
      throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                           " does not match shape " + shape_string(shape_));
    }
  }

  static BasicTensor matrix(std::size_t rows, std::size_t cols, T fill = T{0}) {
    return BasicTensor({rows, cols}, fill);
  }
  static BasicTensor vector(std::size_t n, T fill = T{0}) {
    return BasicTensor({n}, fill);
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  // Product of trailing dimensions; the row stride.
  std::size_t cols() const {
    if (shape_.empty()) return 0;
    return std::accumulate(shape_.begin() + 1, shape_.end(), std::size_t{1},
                           std::multiplies<>());
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols(), cols()};
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  // Rows [begin, end) as a new tensor with the same trailing shape.
  BasicTensor slice_rows(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows()) {
      throw DimensionError("row slice [" + std::to_string(begin) + ", " +
                           std::to_string(end) + ") out of range for shape " +
                           shape_string(shape_));
    }
    auto shape = shape_;
    shape[0] = end - begin;
    const std::size_t stride = cols();
    return BasicTensor(std::move(shape),
                       std::vector<T>(data_.begin() + begin * stride,
                                      data_.begin() + end * stride));
  }

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> out(data_.size());
    std::transform(data_.begin(), data_.end(), out.begin(),
                   [](T v) { return static_cast<U>(v); });
    return BasicTensor<U>(shape_, std::move(out));
  }

  // Elementwise value equality (so +0 == -0).
  bool operator==(const BasicTensor& other) const = default;

 private:
  static std::size_t element_count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

  std::vector<std::size_t> shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

// Stack rows of several rank-2 tensors with equal column counts.
template <typename T>
BasicTensor<T> concat_rows(std::span<const BasicTensor<T>> parts,
                           std::size_t cols) {
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.rows() > 0 && p.cols() != cols) {
      throw DimensionError("concat_rows: column mismatch");
    }
    total += p.rows();
  }
  BasicTensor<T> out = BasicTensor<T>::matrix(total, cols);
  std::size_t at = 0;
  for (const auto& p : parts) {
    std::copy(p.values().begin(), p.values().end(), out.data() + at * cols);
    at += p.rows();
  }
  return out;
}

}  // namespace asyncrev
