#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "floodtext/error.hpp"

namespace floodtext {

// Dense row-major tensor. `grad` is empty until a backward pass touches the
// tensor; when present it always has the same length as `values`.
template <class T>
struct TensorT {
  std::vector<std::size_t> shape;
  std::vector<T> values;
  std::vector<T> grad;

  TensorT() = default;

  explicit TensorT(std::vector<std::size_t> s) : shape(std::move(s)) {
    values.assign(numel_of(shape), T{0});
  }

  TensorT(std::vector<std::size_t> s, std::vector<T> v)
      : shape(std::move(s)), values(std::move(v)) {
    if (values.size() != numel_of(shape)) {
      throw ShapeError("tensor value count does not match shape");
    }
  }

  static std::size_t numel_of(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
  }

  std::size_t numel() const { return values.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
  std::size_t rank() const { return shape.size(); }

  T& at(std::size_t i) { return values[i]; }
  T at(std::size_t i) const { return values[i]; }
  T& at(std::size_t r, std::size_t c) { return values[r * shape[1] + c]; }
  T at(std::size_t r, std::size_t c) const { return values[r * shape[1] + c]; }

  bool has_grad() const { return !grad.empty(); }

  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), T{0});
  }

  void zero_grad() {
    if (!grad.empty()) grad.assign(grad.size(), T{0});
  }

  bool same_shape(const TensorT& other) const { return shape == other.shape; }

  bool all_finite() const {
    for (T v : values) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  std::string shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

// Row-major integer matrix for token-id blocks.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> values;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0) {}

  int& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  int at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::size_t numel() const { return values.size(); }

  bool operator==(const IntMatrix& other) const {
    return rows == other.rows && cols == other.cols && values == other.values;
  }
};

template <class T>
void check_finite(const TensorT<T>& t, const std::string& what) {
  if (!t.all_finite()) {
    throw NumericsError("non-finite values in " + what);
  }
}

}  // namespace floodtext
