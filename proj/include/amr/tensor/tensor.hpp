#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace amr {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& s);

/// Dense row-major array. Layer code treats dimension 0 as the batch.
template <typename T>
struct Tensor {
  Shape shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), data(shape_size(shape), fill) {}
  Tensor(Shape s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {}

  std::size_t size() const noexcept { return data.size(); }
  std::size_t batch() const noexcept { return shape.empty() ? 0 : shape[0]; }
  /// Elements per batch item.
  std::size_t sample_size() const noexcept { return batch() ? data.size() / batch() : 0; }
  /// Shape without the batch dimension.
  Shape sample_shape() const { return shape.empty() ? Shape{} : Shape(shape.begin() + 1, shape.end()); }

  T* ptr() noexcept { return data.data(); }
  const T* ptr() const noexcept { return data.data(); }
  T& operator[](std::size_t i) noexcept { return data[i]; }
  const T& operator[](std::size_t i) const noexcept { return data[i]; }

  bool all_finite() const;
};

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  return Tensor<To>(t.shape, std::vector<To>(t.data.begin(), t.data.end()));
}

/// Prepends the batch dimension n to a per-sample shape.
inline Shape batched(std::size_t n, const Shape& s) {
  Shape out{n};
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace amr
