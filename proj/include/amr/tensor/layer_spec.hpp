#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amr/tensor/tensor.hpp"

namespace amr {

enum class LayerKind {
  dense,
  conv2d,
  conv1d,
  dropout,
  activation,
  flatten,
  zero_pad,
  max_pool,
  lstm,
  gru,
  bilstm,
  reshape,
  concat,
  add,
  slice,
  permute,
};

inline constexpr std::array kAllLayerKinds = {
    LayerKind::dense,   LayerKind::conv2d, LayerKind::conv1d,  LayerKind::dropout,
    LayerKind::activation, LayerKind::flatten, LayerKind::zero_pad, LayerKind::max_pool,
    LayerKind::lstm,    LayerKind::gru,    LayerKind::bilstm,  LayerKind::reshape,
    LayerKind::concat,  LayerKind::add,    LayerKind::slice,   LayerKind::permute,
};

enum class Activation { linear, relu, selu, tanh, sigmoid };

/// valid: no padding; same: output = ceil(in / stride) with the extra
/// padding on the bottom/right; causal (conv1d only): k-1 zeros on the left.
enum class Padding { valid, same, causal };

std::string_view kind_name(LayerKind k);
std::optional<LayerKind> parse_kind(std::string_view s);
std::string_view activation_name(Activation a);
std::optional<Activation> parse_activation(std::string_view s);
std::string_view padding_name(Padding p);
std::optional<Padding> parse_padding(std::string_view s);

/// One node of a network. Fields not used by `kind` keep their defaults and
/// are ignored. Shapes exclude the batch dimension; axes count from 0 over
/// the per-sample shape (negative values count from the end).
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::dense;
  std::vector<std::string> inputs;  // empty: the previous layer (or the network input)

  std::size_t units = 0;                 // dense / lstm / gru / bilstm (per direction)
  std::size_t filters = 0;               // conv2d / conv1d
  std::vector<std::size_t> kernel;       // conv2d {kh, kw}, conv1d {k}
  std::vector<std::size_t> strides;      // conv / pool; empty means 1 (conv) or pool size (pool)
  std::vector<std::size_t> pool;         // max_pool {ph, pw}
  Padding padding = Padding::valid;
  Activation activation = Activation::linear;
  double rate = 0.0;                     // dropout
  bool return_sequences = false;         // recurrent
  std::array<std::size_t, 4> pad{};      // zero_pad {top, bottom, left, right}
  std::vector<long> target_shape;        // reshape; at most one -1
  long axis = -1;                        // concat / slice
  std::size_t begin = 0, end = 0;        // slice [begin, end) along axis
  std::vector<std::size_t> perm;         // permute

  bool operator==(const LayerSpec&) const = default;
};

/// Number of incoming edges the kind accepts: exactly 1, or >= 2 for merges.
bool is_merge(LayerKind k);

/// Throws InvalidConfig when hyperparameters are inconsistent with the kind.
void validate(const LayerSpec& spec);

/// Output shape for the given input shapes; throws ShapeError naming the
/// layer and the offending shapes.
Shape infer_shape(const LayerSpec& spec, const std::vector<Shape>& inputs);

struct ParamShape {
  std::string name;
  Shape shape;
};

/// Trainable tensors of the layer, in a fixed order.
std::vector<ParamShape> param_shapes(const LayerSpec& spec, const std::vector<Shape>& inputs);

std::size_t param_count(const LayerSpec& spec, const std::vector<Shape>& inputs);

/// A whole network: single input, ordered layers wired by name, one output.
struct NetworkSpec {
  Shape input_shape;
  std::vector<LayerSpec> layers;
  std::string output;  // empty: the last layer

  bool operator==(const NetworkSpec&) const = default;
};

inline constexpr std::string_view kNetworkInput = "input";

/// Layer indices in a valid evaluation order plus the resolved input
/// indices of each layer (-1 = network input). Throws InvalidConfig on
/// unknown references, duplicate names or cycles.
struct Topology {
  std::vector<std::size_t> order;
  std::vector<std::vector<long>> edges;
  std::size_t output = 0;
};
Topology resolve_topology(const NetworkSpec& net);

/// Per-layer output shapes, indexed like net.layers.
std::vector<Shape> infer_shapes(const NetworkSpec& net, const Topology& topo);

std::size_t param_count(const NetworkSpec& net);

}  // namespace amr
