#pragma once

#include <cstdint>
#include <vector>

#include "amr/common/rng.hpp"
#include "amr/tensor/layer_spec.hpp"
#include "amr/tensor/tensor.hpp"

namespace amr {

enum class Mode { train, eval };

/// Parameter values of one layer, ordered as param_shapes(). `uid`
/// identifies the owner for cache binding; `version` must be bumped
/// whenever the values change so caches from older forwards are rejected.
template <typename T>
struct LayerParams {
  std::vector<Tensor<T>> tensors;
  std::uint64_t uid = 0;
  std::uint64_t version = 0;
};

std::uint64_t next_param_uid();

/// Zero-valued parameters of the right shapes with a fresh uid.
template <typename T>
LayerParams<T> zero_params(const LayerSpec& spec, const std::vector<Shape>& inputs);

/// Glorot-uniform kernels, zero biases, LSTM forget-gate bias 1.
template <typename T>
LayerParams<T> init_params(const LayerSpec& spec, const std::vector<Shape>& inputs, Rng& rng);

/// State saved by layer_forward for the matching layer_backward.
template <typename T>
struct LayerCache {
  bool valid = false;
  LayerKind kind = LayerKind::dense;
  std::uint64_t uid = 0, version = 0;
  std::vector<Shape> input_shapes;
  std::vector<Tensor<T>> saved;
  std::vector<std::size_t> index;
};

struct ForwardContext {
  Mode mode = Mode::eval;
  Rng* rng = nullptr;       // required by dropout in train mode
  bool keep_cache = true;   // false skips saving state (inference)
};

template <typename T>
struct ForwardResult {
  Tensor<T> output;
  LayerCache<T> cache;
};

template <typename T>
struct BackwardResult {
  std::vector<Tensor<T>> input_grads;
  std::vector<Tensor<T>> param_grads;
};

/// Inputs carry a leading batch dimension. Throws ShapeError when they do
/// not match the spec.
template <typename T>
ForwardResult<T> layer_forward(const LayerSpec& spec, const LayerParams<T>& params,
                               const std::vector<const Tensor<T>*>& inputs, const ForwardContext& ctx);

/// Throws ContractError when the cache is missing, belongs to another
/// layer, or predates a parameter update.
template <typename T>
BackwardResult<T> layer_backward(const LayerSpec& spec, const LayerParams<T>& params,
                                 const LayerCache<T>& cache, const Tensor<T>& grad);

}  // namespace amr
