#include "amr/tensor/tensor.hpp"

#include <cmath>

namespace amr {

std::string to_string(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  if (s.size() == 1) out += ",";
  return out + ")";
}

template <typename T>
bool Tensor<T>::all_finite() const {
  for (T v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

template struct Tensor<float>;
template struct Tensor<double>;

}  // namespace amr
