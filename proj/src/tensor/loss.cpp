#include "amr/tensor/loss.hpp"

#include <cmath>
#include <vector>

#include "amr/common/error.hpp"

namespace amr {

namespace {

template <typename T>
void check_logits(const Tensor<T>& logits) {
  if (logits.shape.size() != 2 || logits.shape[0] == 0 || logits.shape[1] == 0)
    throw ShapeError("logits must be (N, C), got " + to_string(logits.shape));
}

// Loss and gradient for one row given the label index.
template <typename T>
double row_loss(const T* z, std::size_t C, std::size_t label, double scale, T* g) {
  double mx = z[0];
  for (std::size_t c = 1; c < C; ++c) mx = std::max<double>(mx, z[c]);
  double sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) sum += std::exp(static_cast<double>(z[c]) - mx);
  const double log_sum = std::log(sum);
  for (std::size_t c = 0; c < C; ++c) {
    const double p = std::exp(static_cast<double>(z[c]) - mx - log_sum);
    g[c] = static_cast<T>(scale * (p - (c == label ? 1.0 : 0.0)));
  }
  return -(static_cast<double>(z[label]) - mx - log_sum);
}

}  // namespace

template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels) {
  check_logits(logits);
  const std::size_t N = logits.shape[0], C = logits.shape[1];
  if (labels.size() != N)
    throw InvalidInput("label count " + std::to_string(labels.size()) + " does not match batch " + std::to_string(N));
  LossResult<T> r{0.0, Tensor<T>(logits.shape)};
  const double scale = 1.0 / static_cast<double>(N);
  for (std::size_t n = 0; n < N; ++n) {
    if (labels[n] >= C) throw InvalidLabel("label " + std::to_string(labels[n]) + " out of range");
    r.loss += row_loss(logits.ptr() + n * C, C, labels[n], scale, r.grad.ptr() + n * C);
  }
  r.loss *= scale;
  return r;
}

template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, const Tensor<T>& one_hot) {
  check_logits(logits);
  if (one_hot.shape != logits.shape)
    throw ShapeError("labels " + to_string(one_hot.shape) + " do not match logits " + to_string(logits.shape));
  const std::size_t N = logits.shape[0], C = logits.shape[1];
  std::vector<std::uint8_t> idx(N);
  for (std::size_t n = 0; n < N; ++n) {
    std::size_t ones = 0;
    for (std::size_t c = 0; c < C; ++c) {
      const T v = one_hot[n * C + c];
      if (v == T(1)) {
        ++ones;
        idx[n] = static_cast<std::uint8_t>(c);
      } else if (v != T(0)) {
        ones = 2;
        break;
      }
    }
    if (ones != 1) throw InvalidLabel("row " + std::to_string(n) + " is not one-hot");
  }
  return cross_entropy(logits, std::span<const std::uint8_t>(idx));
}

template <typename T>
std::vector<std::uint8_t> argmax_rows(const Tensor<T>& scores) {
  check_logits(scores);
  const std::size_t N = scores.shape[0], C = scores.shape[1];
  std::vector<std::uint8_t> out(N);
  for (std::size_t n = 0; n < N; ++n) {
    const T* z = scores.ptr() + n * C;
    std::size_t best = 0;
    for (std::size_t c = 1; c < C; ++c)
      if (z[c] > z[best]) best = c;
    out[n] = static_cast<std::uint8_t>(best);
  }
  return out;
}

template LossResult<float> cross_entropy(const Tensor<float>&, const Tensor<float>&);
template LossResult<double> cross_entropy(const Tensor<double>&, const Tensor<double>&);
template LossResult<float> cross_entropy(const Tensor<float>&, std::span<const std::uint8_t>);
template LossResult<double> cross_entropy(const Tensor<double>&, std::span<const std::uint8_t>);
template std::vector<std::uint8_t> argmax_rows(const Tensor<float>&);
template std::vector<std::uint8_t> argmax_rows(const Tensor<double>&);

}  // namespace amr
