#include "amr/kernels/conv.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "amr/kernels/gemm.hpp"

namespace amr::kernels {

namespace {

// Caps the im2col scratch buffer at ~8M elements per chunk.
std::size_t chunk_samples(const ConvGeometry& g, std::size_t n) {
  const std::size_t per = std::max<std::size_t>(1, g.out_pixels() * g.patch());
  return std::clamp<std::size_t>((std::size_t{8} << 20) / per, 1, std::max<std::size_t>(n, 1));
}

// Input coordinate for output position o and kernel tap t, or -1 if in padding.
inline long in_coord(std::size_t o, std::size_t t, std::size_t stride, std::size_t pad, std::size_t extent) {
  const long v = static_cast<long>(o * stride + t) - static_cast<long>(pad);
  return (v >= 0 && v < static_cast<long>(extent)) ? v : -1;
}

}  // namespace

template <typename T>
void im2col(const ConvGeometry& g, const T* x, T* cols) {
  const std::size_t patch = g.patch();
  for (std::size_t oh = 0; oh < g.out_h; ++oh) {
    for (std::size_t ow = 0; ow < g.out_w; ++ow) {
      T* row = cols + (oh * g.out_w + ow) * patch;
      for (std::size_t i = 0; i < g.kh; ++i) {
        const long ih = in_coord(oh, i, g.stride_h, g.pad_top, g.in_h);
        for (std::size_t j = 0; j < g.kw; ++j) {
          T* dst = row + (i * g.kw + j) * g.in_c;
          const long iw = in_coord(ow, j, g.stride_w, g.pad_left, g.in_w);
          if (ih < 0 || iw < 0) {
            std::fill(dst, dst + g.in_c, T(0));
          } else {
            const T* src = x + (static_cast<std::size_t>(ih) * g.in_w + static_cast<std::size_t>(iw)) * g.in_c;
            std::copy(src, src + g.in_c, dst);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const ConvGeometry& g, const T* cols, T* dx) {
  const std::size_t patch = g.patch();
  for (std::size_t oh = 0; oh < g.out_h; ++oh) {
    for (std::size_t ow = 0; ow < g.out_w; ++ow) {
      const T* row = cols + (oh * g.out_w + ow) * patch;
      for (std::size_t i = 0; i < g.kh; ++i) {
        const long ih = in_coord(oh, i, g.stride_h, g.pad_top, g.in_h);
        if (ih < 0) continue;
        for (std::size_t j = 0; j < g.kw; ++j) {
          const long iw = in_coord(ow, j, g.stride_w, g.pad_left, g.in_w);
          if (iw < 0) continue;
          const T* src = row + (i * g.kw + j) * g.in_c;
          T* dst = dx + (static_cast<std::size_t>(ih) * g.in_w + static_cast<std::size_t>(iw)) * g.in_c;
#pragma omp simd
          for (std::size_t c = 0; c < g.in_c; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

template <typename T>
void conv_forward(const ConvGeometry& g, std::size_t n, const T* x, const T* w, const T* bias, T* y) {
  const std::size_t patch = g.patch(), pix = g.out_pixels(), F = g.filters;
  const std::size_t chunk = chunk_samples(g, n);
  std::vector<T> cols(chunk * pix * patch);
  for (std::size_t s0 = 0; s0 < n; s0 += chunk) {
    const std::size_t nb = std::min(chunk, n - s0);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < nb; ++s) im2col(g, x + (s0 + s) * g.in_size(), cols.data() + s * pix * patch);
    T* out = y + s0 * g.out_size();
    const std::size_t rows = nb * pix;
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < rows; ++r) {
      if (bias) {
        std::copy(bias, bias + F, out + r * F);
      } else {
        std::fill(out + r * F, out + (r + 1) * F, T(0));
      }
    }
    gemm(Trans::no, Trans::no, rows, F, patch, T(1), cols.data(), patch, w, F, T(1), out, F);
  }
}

template <typename T>
void conv_backward(const ConvGeometry& g, std::size_t n, const T* x, const T* w, const T* dy,
                   T* dx, T* dw, T* db) {
  const std::size_t patch = g.patch(), pix = g.out_pixels(), F = g.filters;
  const std::size_t chunk = chunk_samples(g, n);
  std::vector<T> cols(chunk * pix * patch);
  if (dx) std::fill(dx, dx + n * g.in_size(), T(0));
  for (std::size_t s0 = 0; s0 < n; s0 += chunk) {
    const std::size_t nb = std::min(chunk, n - s0);
    const std::size_t rows = nb * pix;
    const T* g_out = dy + s0 * g.out_size();
    if (db) {
      for (std::size_t r = 0; r < rows; ++r) {
        const T* src = g_out + r * F;
#pragma omp simd
        for (std::size_t f = 0; f < F; ++f) db[f] += src[f];
      }
    }
    if (dw) {
#pragma omp parallel for schedule(static)
      for (std::size_t s = 0; s < nb; ++s) im2col(g, x + (s0 + s) * g.in_size(), cols.data() + s * pix * patch);
      gemm(Trans::yes, Trans::no, patch, F, rows, T(1), cols.data(), patch, g_out, F, T(1), dw, F);
    }
    if (dx) {
      gemm(Trans::no, Trans::yes, rows, patch, F, T(1), g_out, F, w, F, T(0), cols.data(), patch);
#pragma omp parallel for schedule(static)
      for (std::size_t s = 0; s < nb; ++s) col2im(g, cols.data() + s * pix * patch, dx + (s0 + s) * g.in_size());
    }
  }
}

template <typename T>
void maxpool_forward(const PoolGeometry& g, std::size_t n, const T* x, T* y, std::size_t* argmax) {
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < n; ++s) {
    const T* xs = x + s * g.in_size();
    T* ys = y + s * g.out_size();
    std::size_t* as = argmax + s * g.out_size();
    for (std::size_t oh = 0; oh < g.out_h; ++oh) {
      for (std::size_t ow = 0; ow < g.out_w; ++ow) {
        for (std::size_t c = 0; c < g.channels; ++c) {
          T best = -std::numeric_limits<T>::infinity();
          std::size_t where = 0;
          bool found = false;
          for (std::size_t i = 0; i < g.ph; ++i) {
            const long ih = in_coord(oh, i, g.stride_h, g.pad_top, g.in_h);
            if (ih < 0) continue;
            for (std::size_t j = 0; j < g.pw; ++j) {
              const long iw = in_coord(ow, j, g.stride_w, g.pad_left, g.in_w);
              if (iw < 0) continue;
              const std::size_t off = (static_cast<std::size_t>(ih) * g.in_w + static_cast<std::size_t>(iw)) * g.channels + c;
              if (!found || xs[off] > best) {
                best = xs[off];
                where = off;
                found = true;
              }
            }
          }
          const std::size_t o = (oh * g.out_w + ow) * g.channels + c;
          ys[o] = found ? best : T(0);
          as[o] = where;
        }
      }
    }
  }
}

template <typename T>
void maxpool_backward(const PoolGeometry& g, std::size_t n, const T* dy, const std::size_t* argmax,
                      T* dx) {
  std::fill(dx, dx + n * g.in_size(), T(0));
#pragma omp parallel for schedule(static)
  for (std::size_t s = 0; s < n; ++s) {
    const T* dys = dy + s * g.out_size();
    const std::size_t* as = argmax + s * g.out_size();
    T* dxs = dx + s * g.in_size();
    for (std::size_t o = 0; o < g.out_size(); ++o) dxs[as[o]] += dys[o];
  }
}

namespace reference {

template <typename T>
void conv_forward(const ConvGeometry& g, std::size_t n, const T* x, const T* w, const T* bias, T* y) {
  for (std::size_t s = 0; s < n; ++s) {
    const T* xs = x + s * g.in_size();
    T* ys = y + s * g.out_size();
    for (std::size_t oh = 0; oh < g.out_h; ++oh)
      for (std::size_t ow = 0; ow < g.out_w; ++ow)
        for (std::size_t f = 0; f < g.filters; ++f) {
          T acc = bias ? bias[f] : T(0);
          for (std::size_t i = 0; i < g.kh; ++i) {
            const long ih = in_coord(oh, i, g.stride_h, g.pad_top, g.in_h);
            if (ih < 0) continue;
            for (std::size_t j = 0; j < g.kw; ++j) {
              const long iw = in_coord(ow, j, g.stride_w, g.pad_left, g.in_w);
              if (iw < 0) continue;
              for (std::size_t c = 0; c < g.in_c; ++c) {
                acc += xs[(static_cast<std::size_t>(ih) * g.in_w + static_cast<std::size_t>(iw)) * g.in_c + c] *
                       w[((i * g.kw + j) * g.in_c + c) * g.filters + f];
              }
            }
          }
          ys[(oh * g.out_w + ow) * g.filters + f] = acc;
        }
  }
}

template <typename T>
void conv_backward(const ConvGeometry& g, std::size_t n, const T* x, const T* w, const T* dy,
                   T* dx, T* dw, T* db) {
  if (dx) std::fill(dx, dx + n * g.in_size(), T(0));
  for (std::size_t s = 0; s < n; ++s) {
    const T* xs = x + s * g.in_size();
    const T* dys = dy + s * g.out_size();
    T* dxs = dx ? dx + s * g.in_size() : nullptr;
    for (std::size_t oh = 0; oh < g.out_h; ++oh)
      for (std::size_t ow = 0; ow < g.out_w; ++ow)
        for (std::size_t f = 0; f < g.filters; ++f) {
          const T go = dys[(oh * g.out_w + ow) * g.filters + f];
          if (db) db[f] += go;
          for (std::size_t i = 0; i < g.kh; ++i) {
            const long ih = in_coord(oh, i, g.stride_h, g.pad_top, g.in_h);
            if (ih < 0) continue;
            for (std::size_t j = 0; j < g.kw; ++j) {
              const long iw = in_coord(ow, j, g.stride_w, g.pad_left, g.in_w);
              if (iw < 0) continue;
              for (std::size_t c = 0; c < g.in_c; ++c) {
                const std::size_t xo = (static_cast<std::size_t>(ih) * g.in_w + static_cast<std::size_t>(iw)) * g.in_c + c;
                const std::size_t wo = ((i * g.kw + j) * g.in_c + c) * g.filters + f;
                if (dw) dw[wo] += go * xs[xo];
                if (dxs) dxs[xo] += go * w[wo];
              }
            }
          }
        }
  }
}

}  // namespace reference

#define AMR_INSTANTIATE_CONV(T)                                                                   \
  template void im2col<T>(const ConvGeometry&, const T*, T*);                                     \
  template void col2im<T>(const ConvGeometry&, const T*, T*);                                     \
  template void conv_forward<T>(const ConvGeometry&, std::size_t, const T*, const T*, const T*, T*); \
  template void conv_backward<T>(const ConvGeometry&, std::size_t, const T*, const T*, const T*, T*, \
                                 T*, T*);                                                         \
  template void maxpool_forward<T>(const PoolGeometry&, std::size_t, const T*, T*, std::size_t*); \
  template void maxpool_backward<T>(const PoolGeometry&, std::size_t, const T*, const std::size_t*, \
                                    T*);                                                          \
  template void reference::conv_forward<T>(const ConvGeometry&, std::size_t, const T*, const T*,  \
                                           const T*, T*);                                         \
  template void reference::conv_backward<T>(const ConvGeometry&, std::size_t, const T*, const T*, \
                                            const T*, T*, T*, T*);

AMR_INSTANTIATE_CONV(float)
AMR_INSTANTIATE_CONV(double)

#undef AMR_INSTANTIATE_CONV

}  // namespace amr::kernels
