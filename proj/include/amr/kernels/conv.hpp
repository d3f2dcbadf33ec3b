#pragma once

#include <cstddef>
#include <vector>

namespace amr::kernels {

/// Geometry of a 2-D convolution over channels-last (H, W, C) samples with
/// an explicit zero padding. Output is (out_h, out_w, filters); weights are
/// (kh, kw, C, filters).
struct ConvGeometry {
  std::size_t in_h = 1, in_w = 1, in_c = 1;
  std::size_t filters = 1;
  std::size_t kh = 1, kw = 1;
  std::size_t stride_h = 1, stride_w = 1;
  std::size_t pad_top = 0, pad_left = 0;
  std::size_t out_h = 1, out_w = 1;

  std::size_t patch() const noexcept { return kh * kw * in_c; }
  std::size_t in_size() const noexcept { return in_h * in_w * in_c; }
  std::size_t out_pixels() const noexcept { return out_h * out_w; }
  std::size_t out_size() const noexcept { return out_h * out_w * filters; }
};

/// One sample: cols is (out_pixels, patch), zero where the window hangs over
/// the padding.
template <typename T>
void im2col(const ConvGeometry& g, const T* x, T* cols);

/// Adjoint of im2col; accumulates into dx.
template <typename T>
void col2im(const ConvGeometry& g, const T* cols, T* dx);

/// y = conv(x, w) + bias for a batch of n samples (im2col + gemm, chunked).
template <typename T>
void conv_forward(const ConvGeometry& g, std::size_t n, const T* x, const T* w, const T* bias, T* y);

/// Gradients for a batch. dx (may be null) is overwritten; dw and db are
/// accumulated.
template <typename T>
void conv_backward(const ConvGeometry& g, std::size_t n, const T* x, const T* w, const T* dy,
                   T* dx, T* dw, T* db);

/// Max pooling over (H, W, C) with padded positions treated as -inf.
/// `argmax` receives the flat input offset of each selected element.
struct PoolGeometry {
  std::size_t in_h = 1, in_w = 1, channels = 1;
  std::size_t ph = 1, pw = 1;
  std::size_t stride_h = 1, stride_w = 1;
  std::size_t pad_top = 0, pad_left = 0;
  std::size_t out_h = 1, out_w = 1;

  std::size_t in_size() const noexcept { return in_h * in_w * channels; }
  std::size_t out_size() const noexcept { return out_h * out_w * channels; }
};

template <typename T>
void maxpool_forward(const PoolGeometry& g, std::size_t n, const T* x, T* y, std::size_t* argmax);

template <typename T>
void maxpool_backward(const PoolGeometry& g, std::size_t n, const T* dy, const std::size_t* argmax,
                      T* dx);

namespace reference {

/// Direct serial convolution loops; test oracle for conv_forward/backward.
template <typename T>
void conv_forward(const ConvGeometry& g, std::size_t n, const T* x, const T* w, const T* bias, T* y);

template <typename T>
void conv_backward(const ConvGeometry& g, std::size_t n, const T* x, const T* w, const T* dy,
                   T* dx, T* dw, T* db);

}  // namespace reference

}  // namespace amr::kernels
