#pragma once

#include <cstdint>
#include <span>

#include "amr/tensor/tensor.hpp"

namespace amr {

template <typename T>
struct LossResult {
  double loss = 0.0;
  Tensor<T> grad;  // d loss / d logits
};

/// Softmax cross-entropy averaged over the batch. logits and one_hot are
/// (N, C); every one_hot row must hold a single 1 and zeros elsewhere
/// (otherwise InvalidLabel).
template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, const Tensor<T>& one_hot);

/// Same loss with labels given as class indices.
template <typename T>
LossResult<T> cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels);

/// Row-wise argmax of (N, C) scores.
template <typename T>
std::vector<std::uint8_t> argmax_rows(const Tensor<T>& scores);

}  // namespace amr
