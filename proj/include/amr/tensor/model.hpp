#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amr/tensor/layers.hpp"

namespace amr {

/// Parameter tensor together with its gradient accumulator.
template <typename T>
struct ParamRef {
  std::string name;  // "<layer>/<param>"
  Tensor<T>* value;
  Tensor<T>* grad;
};

/// An instantiated network. Single owner; not safe for concurrent use.
template <typename T>
class Model {
 public:
  /// Parameters are initialized from streams derived from (seed, layer
  /// name), so a layer's initial weights do not depend on its neighbours.
  Model(NetworkSpec net, std::uint64_t seed);

  const NetworkSpec& spec() const noexcept { return net_; }
  const Shape& output_shape() const noexcept { return shapes_[topo_.output]; }
  std::size_t total_params() const;

  /// x is (N, input_shape...). Train mode keeps the caches needed by backward.
  Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng* rng = nullptr);

  /// Eval-mode forward without caches; pure in (parameters, x).
  Tensor<T> predict(const Tensor<T>& x) const;

  /// Accumulates parameter gradients for the last train-mode forward.
  void backward(const Tensor<T>& grad_output);

  void zero_grad();

  /// Must be called after parameter values change (invalidates caches).
  void mark_updated();

  std::vector<ParamRef<T>> parameters();

 private:
  Tensor<T> run(const Tensor<T>& x, const ForwardContext& ctx, std::vector<LayerCache<T>>* caches) const;

  NetworkSpec net_;
  Topology topo_;
  std::vector<Shape> shapes_;
  std::vector<std::vector<Shape>> in_shapes_;
  std::vector<LayerParams<T>> params_;
  std::vector<std::vector<Tensor<T>>> grads_;
  std::vector<LayerCache<T>> caches_;
  std::size_t last_batch_ = 0;
};

}  // namespace amr
