#pragma once

#include "amr/kernels/conv.hpp"
#include "amr/tensor/layer_spec.hpp"

namespace amr::detail {

struct Axis1D {
  std::size_t out = 0, pad_before = 0;
};

// Output extent and leading padding along one axis.
Axis1D axis_geometry(std::size_t in, std::size_t k, std::size_t stride, Padding p);

// conv1d is mapped onto a conv2d with height 1.
kernels::ConvGeometry conv_geometry(const LayerSpec& spec, const Shape& in);
kernels::PoolGeometry pool_geometry(const LayerSpec& spec, const Shape& in);

std::size_t normalize_axis(long axis, std::size_t rank, const std::string& layer);

}  // namespace amr::detail
