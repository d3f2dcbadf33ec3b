#pragma once

#include <cstdint>
#include <vector>

#include "amr/tensor/model.hpp"

namespace amr {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

template <typename T>
struct AdamState {
  std::vector<std::vector<double>> m, v;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update:
///   m = b1 m + (1-b1) g,  v = b2 v + (1-b2) g^2,
///   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
/// All gradients are checked first; a non-finite value raises
/// TrainingDivergence and leaves parameters and state untouched.
template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, const std::vector<const Tensor<T>*>& grads,
               AdamState<T>& state, const AdamConfig& cfg);

template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}
  /// Updates every parameter of the model from its accumulated gradient.
  void step(Model<T>& model);
  const AdamState<T>& state() const noexcept { return state_; }
  const AdamConfig& config() const noexcept { return cfg_; }

 private:
  AdamConfig cfg_;
  AdamState<T> state_;
};

}  // namespace amr
