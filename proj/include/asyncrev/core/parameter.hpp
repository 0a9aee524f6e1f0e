#pragma once

#include <string>
#include <utility>

#include "asyncrev/core/tensor.hpp"

namespace asyncrev {

template <typename T>
struct Parameter {
  BasicTensor<T> value;
  BasicTensor<T> grad;

  Parameter() = default;
  explicit Parameter(BasicTensor<T> v)
      : value(std::move(v)), grad(value.shape(), T{0}) {}

  void zero_grad() { grad.fill(T{0}); }

  template <typename U>
  Parameter<U> cast() const {
    Parameter<U> out(value.template cast<U>());
    out.grad = grad.template cast<U>();
    return out;
  }
};

// Non-owning (name, parameter) pair handed out by parameter visitors.
template <typename T>
struct NamedParameter {
  std::string name;
  Parameter<T>* param;
};

}  // namespace asyncrev
