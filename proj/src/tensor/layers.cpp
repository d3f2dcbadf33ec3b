#include "amr/tensor/layers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "amr/common/error.hpp"
#include "amr/kernels/conv.hpp"
#include "amr/kernels/gemm.hpp"
#include "geometry.hpp"

namespace amr {

using kernels::gemm;
using kernels::Trans;

std::uint64_t next_param_uid() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

namespace {

constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
constexpr double kSeluScale = 1.0507009873554804934193349852946;

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

template <typename T>
void apply_activation(Activation a, std::vector<T>& v) {
  switch (a) {
    case Activation::linear:
      return;
    case Activation::relu:
      for (T& x : v) x = x > T(0) ? x : T(0);
      return;
    case Activation::selu:
      for (T& x : v)
        x = x > T(0) ? T(kSeluScale) * x : T(kSeluScale * kSeluAlpha) * (std::exp(x) - T(1));
      return;
    case Activation::tanh:
      for (T& x : v) x = std::tanh(x);
      return;
    case Activation::sigmoid:
      for (T& x : v) x = sigmoid(x);
      return;
  }
}

// Multiplies g in place by f'(x), expressed through the activation output y.
template <typename T>
void activation_grad(Activation a, const std::vector<T>& y, std::vector<T>& g) {
  const std::size_t n = g.size();
  switch (a) {
    case Activation::linear:
      return;
    case Activation::relu:
      for (std::size_t i = 0; i < n; ++i)
        if (!(y[i] > T(0))) g[i] = T(0);
      return;
    case Activation::selu:
      for (std::size_t i = 0; i < n; ++i)
        g[i] *= y[i] > T(0) ? T(kSeluScale) : y[i] + T(kSeluScale * kSeluAlpha);
      return;
    case Activation::tanh:
      for (std::size_t i = 0; i < n; ++i) g[i] *= T(1) - y[i] * y[i];
      return;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < n; ++i) g[i] *= y[i] * (T(1) - y[i]);
      return;
  }
}

template <typename T>
void add_bias_rows(std::size_t rows, std::size_t cols, const T* bias, T* out) {
  for (std::size_t r = 0; r < rows; ++r) std::copy(bias, bias + cols, out + r * cols);
}

template <typename T>
void column_sums(std::size_t rows, std::size_t cols, const T* src, T* dst) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = src + r * cols;
#pragma omp simd
    for (std::size_t c = 0; c < cols; ++c) dst[c] += row[c];
  }
}

template <typename T>
Tensor<T> params_like(const Tensor<T>& p) {
  return Tensor<T>(p.shape);
}

template <typename T>
std::vector<Tensor<T>> zero_param_grads(const LayerParams<T>& params) {
  std::vector<Tensor<T>> g;
  for (const auto& p : params.tensors) g.push_back(params_like(p));
  return g;
}

// Outer/inner extents around one per-sample axis (the batch folds into outer).
struct AxisSplit {
  std::size_t outer = 1, dim = 1, inner = 1;
};

AxisSplit split_at(const Shape& full, std::size_t sample_axis) {
  AxisSplit s;
  const std::size_t ax = sample_axis + 1;
  for (std::size_t d = 0; d < ax; ++d) s.outer *= full[d];
  s.dim = full[ax];
  for (std::size_t d = ax + 1; d < full.size(); ++d) s.inner *= full[d];
  return s;
}

// ---------------------------------------------------------------------------
// Recurrent cores. x is (N, T, d); gate buffers are (N, T, G*h) with the
// Keras gate order (LSTM i, f, c, o; GRU z, r, h).

template <typename T>
struct LstmTrace {
  Tensor<T> gates;  // activated gates
  Tensor<T> cell;
  Tensor<T> hidden;
};

template <typename T>
struct LstmRef {
  const Tensor<T>& gates;
  const Tensor<T>& cell;
  const Tensor<T>& hidden;
};

template <typename T>
LstmTrace<T> lstm_run(const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& U, const Tensor<T>& b,
                      std::size_t h, bool reverse) {
  const std::size_t N = x.shape[0], Tn = x.shape[1], d = x.shape[2], G = 4 * h;
  LstmTrace<T> tr{Tensor<T>({N, Tn, G}), Tensor<T>({N, Tn, h}), Tensor<T>({N, Tn, h})};
  T* gates = tr.gates.ptr();
  add_bias_rows(N * Tn, G, b.ptr(), gates);
  gemm(Trans::no, Trans::no, N * Tn, G, d, T(1), x.ptr(), d, W.ptr(), G, T(1), gates, G);
  for (std::size_t s = 0; s < Tn; ++s) {
    const std::size_t t = reverse ? Tn - 1 - s : s;
    const std::size_t tp = reverse ? t + 1 : t - 1;
    if (s > 0)
      gemm(Trans::no, Trans::no, N, G, h, T(1), tr.hidden.ptr() + tp * h, Tn * h, U.ptr(), G, T(1),
           gates + t * G, Tn * G);
    for (std::size_t n = 0; n < N; ++n) {
      T* g = gates + (n * Tn + t) * G;
      T* c = tr.cell.ptr() + (n * Tn + t) * h;
      T* hh = tr.hidden.ptr() + (n * Tn + t) * h;
      const T* cp = s > 0 ? tr.cell.ptr() + (n * Tn + tp) * h : nullptr;
      for (std::size_t j = 0; j < h; ++j) {
        const T i = sigmoid(g[j]);
        const T f = sigmoid(g[h + j]);
        const T cc = std::tanh(g[2 * h + j]);
        const T o = sigmoid(g[3 * h + j]);
        g[j] = i;
        g[h + j] = f;
        g[2 * h + j] = cc;
        g[3 * h + j] = o;
        c[j] = (cp ? f * cp[j] : T(0)) + i * cc;
        hh[j] = o * std::tanh(c[j]);
      }
    }
  }
  return tr;
}

// dH is the gradient w.r.t. every hidden state (N, T, h). Accumulates into
// dW, dU, db and returns dx.
template <typename T>
Tensor<T> lstm_grad(const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& U, const LstmRef<T>& tr,
                    const Tensor<T>& dH, std::size_t h, bool reverse, T* dW, T* dU, T* db) {
  const std::size_t N = x.shape[0], Tn = x.shape[1], d = x.shape[2], G = 4 * h;
  Tensor<T> dA({N, Tn, G});
  std::vector<T> dh_rec(N * h, T(0)), dc_next(N * h, T(0));
  for (std::size_t s = Tn; s-- > 0;) {
    const std::size_t t = reverse ? Tn - 1 - s : s;
    const std::size_t tp = reverse ? t + 1 : t - 1;
    for (std::size_t n = 0; n < N; ++n) {
      const T* g = tr.gates.ptr() + (n * Tn + t) * G;
      const T* c = tr.cell.ptr() + (n * Tn + t) * h;
      const T* cp = s > 0 ? tr.cell.ptr() + (n * Tn + tp) * h : nullptr;
      const T* up = dH.ptr() + (n * Tn + t) * h;
      T* da = dA.ptr() + (n * Tn + t) * G;
      T* dcn = dc_next.data() + n * h;
      const T* dhr = dh_rec.data() + n * h;
      for (std::size_t j = 0; j < h; ++j) {
        const T i = g[j], f = g[h + j], cc = g[2 * h + j], o = g[3 * h + j];
        const T dh = up[j] + dhr[j];
        const T tc = std::tanh(c[j]);
        const T dc = dcn[j] + dh * o * (T(1) - tc * tc);
        da[j] = dc * cc * i * (T(1) - i);
        da[h + j] = (cp ? dc * cp[j] : T(0)) * f * (T(1) - f);
        da[2 * h + j] = dc * i * (T(1) - cc * cc);
        da[3 * h + j] = dh * tc * o * (T(1) - o);
        dcn[j] = dc * f;
      }
    }
    if (s > 0) {
      gemm(Trans::no, Trans::yes, N, h, G, T(1), dA.ptr() + t * G, Tn * G, U.ptr(), G, T(0), dh_rec.data(), h);
    }
  }
  // Hidden state feeding each step (zeros at the first step of the scan).
  Tensor<T> hprev({N, Tn, h});
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t s = 1; s < Tn; ++s) {
      const std::size_t t = reverse ? Tn - 1 - s : s;
      const std::size_t tp = reverse ? t + 1 : t - 1;
      std::copy_n(tr.hidden.ptr() + (n * Tn + tp) * h, h, hprev.ptr() + (n * Tn + t) * h);
    }
  gemm(Trans::yes, Trans::no, d, G, N * Tn, T(1), x.ptr(), d, dA.ptr(), G, T(1), dW, G);
  gemm(Trans::yes, Trans::no, h, G, N * Tn, T(1), hprev.ptr(), h, dA.ptr(), G, T(1), dU, G);
  column_sums(N * Tn, G, dA.ptr(), db);
  Tensor<T> dx({N, Tn, d});
  gemm(Trans::no, Trans::yes, N * Tn, d, G, T(1), dA.ptr(), G, W.ptr(), G, T(0), dx.ptr(), d);
  return dx;
}

template <typename T>
struct GruTrace {
  Tensor<T> gates;   // activated z, r, candidate
  Tensor<T> rec_h;   // h_{t-1} U_h + b_rec_h, before the reset gate
  Tensor<T> hidden;
};

template <typename T>
GruTrace<T> gru_run(const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& U, const Tensor<T>& b,
                    std::size_t h) {
  const std::size_t N = x.shape[0], Tn = x.shape[1], d = x.shape[2], G = 3 * h;
  GruTrace<T> tr{Tensor<T>({N, Tn, G}), Tensor<T>({N, Tn, h}), Tensor<T>({N, Tn, h})};
  const T* b_in = b.ptr();
  const T* b_rec = b.ptr() + G;
  T* gates = tr.gates.ptr();
  add_bias_rows(N * Tn, G, b_in, gates);
  gemm(Trans::no, Trans::no, N * Tn, G, d, T(1), x.ptr(), d, W.ptr(), G, T(1), gates, G);
  std::vector<T> rec(N * G);
  for (std::size_t t = 0; t < Tn; ++t) {
    add_bias_rows(N, G, b_rec, rec.data());
    if (t > 0)
      gemm(Trans::no, Trans::no, N, G, h, T(1), tr.hidden.ptr() + (t - 1) * h, Tn * h, U.ptr(), G, T(1),
           rec.data(), G);
    for (std::size_t n = 0; n < N; ++n) {
      T* g = gates + (n * Tn + t) * G;
      const T* rc = rec.data() + n * G;
      T* rh = tr.rec_h.ptr() + (n * Tn + t) * h;
      T* hh = tr.hidden.ptr() + (n * Tn + t) * h;
      const T* hp = t > 0 ? tr.hidden.ptr() + (n * Tn + t - 1) * h : nullptr;
      for (std::size_t j = 0; j < h; ++j) {
        const T z = sigmoid(g[j] + rc[j]);
        const T r = sigmoid(g[h + j] + rc[h + j]);
        const T cand = std::tanh(g[2 * h + j] + r * rc[2 * h + j]);
        g[j] = z;
        g[h + j] = r;
        g[2 * h + j] = cand;
        rh[j] = rc[2 * h + j];
        hh[j] = z * (hp ? hp[j] : T(0)) + (T(1) - z) * cand;
      }
    }
  }
  return tr;
}

template <typename T>
struct GruRef {
  const Tensor<T>& gates;
  const Tensor<T>& rec_h;
  const Tensor<T>& hidden;
};

template <typename T>
Tensor<T> gru_grad(const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& U, const GruRef<T>& tr,
                   const Tensor<T>& dH, std::size_t h, T* dW, T* dU, T* db) {
  const std::size_t N = x.shape[0], Tn = x.shape[1], d = x.shape[2], G = 3 * h;
  Tensor<T> dAx({N, Tn, G}), dRec({N, Tn, G});
  std::vector<T> dh_next(N * h, T(0));
  for (std::size_t t = Tn; t-- > 0;) {
    for (std::size_t n = 0; n < N; ++n) {
      const T* g = tr.gates.ptr() + (n * Tn + t) * G;
      const T* rh = tr.rec_h.ptr() + (n * Tn + t) * h;
      const T* hp = t > 0 ? tr.hidden.ptr() + (n * Tn + t - 1) * h : nullptr;
      const T* up = dH.ptr() + (n * Tn + t) * h;
      T* dax = dAx.ptr() + (n * Tn + t) * G;
      T* drc = dRec.ptr() + (n * Tn + t) * G;
      T* dhn = dh_next.data() + n * h;
      for (std::size_t j = 0; j < h; ++j) {
        const T z = g[j], r = g[h + j], cand = g[2 * h + j];
        const T dh = up[j] + dhn[j];
        const T hpj = hp ? hp[j] : T(0);
        const T daz = dh * (hpj - cand) * z * (T(1) - z);
        const T dah = dh * (T(1) - z) * (T(1) - cand * cand);
        const T dar = dah * rh[j] * r * (T(1) - r);
        dax[j] = daz;
        dax[h + j] = dar;
        dax[2 * h + j] = dah;
        drc[j] = daz;
        drc[h + j] = dar;
        drc[2 * h + j] = dah * r;
        dhn[j] = dh * z;
      }
    }
    if (t > 0)
      gemm(Trans::no, Trans::yes, N, h, G, T(1), dRec.ptr() + t * G, Tn * G, U.ptr(), G, T(1),
           dh_next.data(), h);
  }
  Tensor<T> hprev({N, Tn, h});
  for (std::size_t n = 0; n < N; ++n)
    std::copy_n(tr.hidden.ptr() + n * Tn * h, (Tn - 1) * h, hprev.ptr() + (n * Tn + 1) * h);
  gemm(Trans::yes, Trans::no, d, G, N * Tn, T(1), x.ptr(), d, dAx.ptr(), G, T(1), dW, G);
  gemm(Trans::yes, Trans::no, h, G, N * Tn, T(1), hprev.ptr(), h, dRec.ptr(), G, T(1), dU, G);
  column_sums(N * Tn, G, dAx.ptr(), db);
  column_sums(N * Tn, G, dRec.ptr(), db + G);
  Tensor<T> dx({N, Tn, d});
  gemm(Trans::no, Trans::yes, N * Tn, d, G, T(1), dAx.ptr(), G, W.ptr(), G, T(0), dx.ptr(), d);
  return dx;
}

// Copies the step-`t` hidden states (N, h) out of a (N, T, h) sequence
// into columns [off, off + h) of a (N, width) matrix.
template <typename T>
void take_step(const Tensor<T>& seq, std::size_t t, T* dst, std::size_t width, std::size_t off) {
  const std::size_t N = seq.shape[0], Tn = seq.shape[1], h = seq.shape[2];
  for (std::size_t n = 0; n < N; ++n) std::copy_n(seq.ptr() + (n * Tn + t) * h, h, dst + n * width + off);
}

// Gradient w.r.t. a full hidden sequence given the layer's upstream grad.
template <typename T>
Tensor<T> hidden_grad(const Tensor<T>& grad, std::size_t N, std::size_t Tn, std::size_t h, bool sequences,
                      std::size_t width, std::size_t off, std::size_t last_t) {
  Tensor<T> dH({N, Tn, h});
  for (std::size_t n = 0; n < N; ++n) {
    if (sequences) {
      for (std::size_t t = 0; t < Tn; ++t)
        std::copy_n(grad.ptr() + (n * Tn + t) * width + off, h, dH.ptr() + (n * Tn + t) * h);
    } else {
      std::copy_n(grad.ptr() + n * width + off, h, dH.ptr() + (n * Tn + last_t) * h);
    }
  }
  return dH;
}

// Writes a (N, T, h) sequence into columns [off, off + h) of (N, T, width).
template <typename T>
void place_sequence(const Tensor<T>& seq, T* dst, std::size_t width, std::size_t off) {
  const std::size_t rows = seq.shape[0] * seq.shape[1], h = seq.shape[2];
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(seq.ptr() + r * h, h, dst + r * width + off);
}

// Maps each output flat index of a per-sample permutation to its input index.
std::vector<std::size_t> permute_map(const Shape& in, const std::vector<std::size_t>& perm) {
  const std::size_t rank = in.size();
  std::vector<std::size_t> in_stride(rank, 1);
  for (std::size_t d = rank - 1; d-- > 0;) in_stride[d] = in_stride[d + 1] * in[d + 1];
  Shape out(rank);
  for (std::size_t i = 0; i < rank; ++i) out[i] = in[perm[i]];
  const std::size_t total = shape_size(in);
  std::vector<std::size_t> map(total);
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t o = 0; o < total; ++o) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < rank; ++i) src += idx[i] * in_stride[perm[i]];
    map[o] = src;
    for (std::size_t i = rank; i-- > 0;) {
      if (++idx[i] < out[i]) break;
      idx[i] = 0;
    }
  }
  return map;
}

template <typename T>
void check_inputs(const LayerSpec& spec, const std::vector<const Tensor<T>*>& inputs, std::vector<Shape>& shapes) {
  if (inputs.empty()) throw ShapeError("layer '" + spec.name + "': no inputs");
  const std::size_t n = inputs[0]->batch();
  for (const auto* in : inputs) {
    if (in->shape.size() < 2 || shape_size(in->shape) != in->size())
      throw ShapeError("layer '" + spec.name + "': input " + to_string(in->shape) + " has no batch dimension");
    if (in->batch() != n)
      throw ShapeError("layer '" + spec.name + "': batch mismatch " + to_string(in->shape) + " vs " +
                       to_string(inputs[0]->shape));
    shapes.push_back(in->sample_shape());
  }
}

}  // namespace

template <typename T>
LayerParams<T> zero_params(const LayerSpec& spec, const std::vector<Shape>& inputs) {
  LayerParams<T> p;
  for (const auto& ps : param_shapes(spec, inputs)) p.tensors.emplace_back(ps.shape);
  p.uid = next_param_uid();
  return p;
}

template <typename T>
LayerParams<T> init_params(const LayerSpec& spec, const std::vector<Shape>& inputs, Rng& rng) {
  LayerParams<T> p = zero_params<T>(spec, inputs);
  const auto shapes = param_shapes(spec, inputs);
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const Shape& s = shapes[k].shape;
    const std::string& name = shapes[k].name;
    Tensor<T>& t = p.tensors[k];
    if (name.ends_with("bias")) {
      if (spec.kind == LayerKind::lstm || spec.kind == LayerKind::bilstm) {
        const std::size_t h = spec.units;
        std::fill(t.data.begin() + h, t.data.begin() + 2 * h, T(1));
      }
      continue;
    }
    std::size_t receptive = 1;
    for (std::size_t d = 0; d + 2 < s.size(); ++d) receptive *= s[d];
    const double fan_in = static_cast<double>(s[s.size() - 2] * receptive);
    const double fan_out = static_cast<double>(s.back() * receptive);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (T& v : t.data) v = static_cast<T>(dist(rng));
  }
  return p;
}

template <typename T>
ForwardResult<T> layer_forward(const LayerSpec& spec, const LayerParams<T>& params,
                               const std::vector<const Tensor<T>*>& inputs, const ForwardContext& ctx) {
  std::vector<Shape> shapes;
  check_inputs(spec, inputs, shapes);
  const Shape out_shape = infer_shape(spec, shapes);
  const auto pshapes = param_shapes(spec, shapes);
  if (params.tensors.size() != pshapes.size())
    throw ContractError("layer '" + spec.name + "': expected " + std::to_string(pshapes.size()) +
                        " parameter tensors, got " + std::to_string(params.tensors.size()));
  for (std::size_t k = 0; k < pshapes.size(); ++k)
    if (params.tensors[k].shape != pshapes[k].shape)
      throw ShapeError("layer '" + spec.name + "': parameter '" + pshapes[k].name + "' has shape " +
                       to_string(params.tensors[k].shape) + ", expected " + to_string(pshapes[k].shape));

  const Tensor<T>& x = *inputs[0];
  const std::size_t N = x.batch();
  ForwardResult<T> r;
  r.output = Tensor<T>(batched(N, out_shape));
  LayerCache<T>& c = r.cache;
  c.kind = spec.kind;
  c.uid = params.uid;
  c.version = params.version;
  c.input_shapes = shapes;
  const bool keep = ctx.keep_cache;
  T* y = r.output.ptr();

  switch (spec.kind) {
    case LayerKind::dense: {
      const std::size_t d = shapes[0].back(), u = spec.units, rows = x.size() / d;
      add_bias_rows(rows, u, params.tensors[1].ptr(), y);
      gemm(Trans::no, Trans::no, rows, u, d, T(1), x.ptr(), d, params.tensors[0].ptr(), u, T(1), y, u);
      apply_activation(spec.activation, r.output.data);
      if (keep) c.saved = {x, r.output};
      break;
    }
    case LayerKind::conv2d:
    case LayerKind::conv1d: {
      const auto g = detail::conv_geometry(spec, shapes[0]);
      kernels::conv_forward(g, N, x.ptr(), params.tensors[0].ptr(), params.tensors[1].ptr(), y);
      apply_activation(spec.activation, r.output.data);
      if (keep) c.saved = {x, r.output};
      break;
    }
    case LayerKind::dropout: {
      if (ctx.mode == Mode::train && spec.rate > 0.0) {
        if (!ctx.rng) throw ContractError("layer '" + spec.name + "': dropout in train mode needs an rng");
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Tensor<T> mask(x.shape);
        const T keep_scale = T(1.0 / (1.0 - spec.rate));
        for (std::size_t i = 0; i < x.size(); ++i) {
          mask[i] = u(*ctx.rng) >= spec.rate ? keep_scale : T(0);
          y[i] = x[i] * mask[i];
        }
        if (keep) c.saved = {std::move(mask)};
      } else {
        r.output.data = x.data;
      }
      break;
    }
    case LayerKind::activation:
      r.output.data = x.data;
      apply_activation(spec.activation, r.output.data);
      if (keep) c.saved = {r.output};
      break;
    case LayerKind::flatten:
    case LayerKind::reshape:
      r.output.data = x.data;
      break;
    case LayerKind::zero_pad: {
      const Shape& s = shapes[0];
      const std::size_t H = s[0], W = s[1], C = s[2], Wo = out_shape[1];
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < H; ++i)
          std::copy_n(x.ptr() + (n * H + i) * W * C, W * C,
                      y + n * shape_size(out_shape) + ((i + spec.pad[0]) * Wo + spec.pad[2]) * C);
      break;
    }
    case LayerKind::max_pool: {
      const auto g = detail::pool_geometry(spec, shapes[0]);
      c.index.resize(r.output.size());
      kernels::maxpool_forward(g, N, x.ptr(), y, c.index.data());
      if (!keep) c.index.clear();
      break;
    }
    case LayerKind::lstm: {
      const std::size_t h = spec.units, Tn = shapes[0][0];
      auto tr = lstm_run(x, params.tensors[0], params.tensors[1], params.tensors[2], h, false);
      if (spec.return_sequences) r.output.data = tr.hidden.data;
      else take_step(tr.hidden, Tn - 1, y, h, 0);
      if (keep) c.saved = {x, std::move(tr.gates), std::move(tr.cell), std::move(tr.hidden)};
      break;
    }
    case LayerKind::gru: {
      const std::size_t h = spec.units, Tn = shapes[0][0];
      auto tr = gru_run(x, params.tensors[0], params.tensors[1], params.tensors[2], h);
      if (spec.return_sequences) r.output.data = tr.hidden.data;
      else take_step(tr.hidden, Tn - 1, y, h, 0);
      if (keep) c.saved = {x, std::move(tr.gates), std::move(tr.rec_h), std::move(tr.hidden)};
      break;
    }
    case LayerKind::bilstm: {
      const std::size_t h = spec.units, Tn = shapes[0][0];
      auto fw = lstm_run(x, params.tensors[0], params.tensors[1], params.tensors[2], h, false);
      auto bw = lstm_run(x, params.tensors[3], params.tensors[4], params.tensors[5], h, true);
      if (spec.return_sequences) {
        place_sequence(fw.hidden, y, 2 * h, 0);
        place_sequence(bw.hidden, y, 2 * h, h);
      } else {
        take_step(fw.hidden, Tn - 1, y, 2 * h, 0);
        take_step(bw.hidden, 0, y, 2 * h, h);
      }
      if (keep)
        c.saved = {x,
                   std::move(fw.gates), std::move(fw.cell), std::move(fw.hidden),
                   std::move(bw.gates), std::move(bw.cell), std::move(bw.hidden)};
      break;
    }
    case LayerKind::concat: {
      const std::size_t ax = detail::normalize_axis(spec.axis, shapes[0].size(), spec.name);
      const AxisSplit os = split_at(r.output.shape, ax);
      std::size_t off = 0;
      for (const auto* in : inputs) {
        const AxisSplit is = split_at(in->shape, ax);
        const std::size_t block = is.dim * is.inner;
        for (std::size_t o = 0; o < os.outer; ++o)
          std::copy_n(in->ptr() + o * block, block, y + o * os.dim * os.inner + off);
        off += block;
      }
      break;
    }
    case LayerKind::add:
      r.output.data = x.data;
      for (std::size_t k = 1; k < inputs.size(); ++k)
        for (std::size_t i = 0; i < r.output.size(); ++i) y[i] += (*inputs[k])[i];
      break;
    case LayerKind::slice: {
      const std::size_t ax = detail::normalize_axis(spec.axis, shapes[0].size(), spec.name);
      const AxisSplit is = split_at(x.shape, ax);
      const std::size_t len = (spec.end - spec.begin) * is.inner;
      for (std::size_t o = 0; o < is.outer; ++o)
        std::copy_n(x.ptr() + (o * is.dim + spec.begin) * is.inner, len, y + o * len);
      break;
    }
    case LayerKind::permute: {
      const auto map = permute_map(shapes[0], spec.perm);
      const std::size_t S = map.size();
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t o = 0; o < S; ++o) y[n * S + o] = x[n * S + map[o]];
      break;
    }
  }
  c.valid = keep;
  return r;
}

template <typename T>
BackwardResult<T> layer_backward(const LayerSpec& spec, const LayerParams<T>& params,
                                 const LayerCache<T>& c, const Tensor<T>& grad) {
  if (!c.valid) throw ContractError("layer '" + spec.name + "': backward without a forward cache");
  if (c.kind != spec.kind || c.uid != params.uid)
    throw ContractError("layer '" + spec.name + "': cache belongs to a different layer");
  if (c.version != params.version)
    throw ContractError("layer '" + spec.name + "': cache is stale (parameters changed since forward)");
  const Shape out_shape = infer_shape(spec, c.input_shapes);
  const std::size_t N = grad.batch();
  if (grad.shape != batched(N, out_shape))
    throw ShapeError("layer '" + spec.name + "': upstream gradient " + to_string(grad.shape) +
                     " does not match output " + to_string(batched(N, out_shape)));

  BackwardResult<T> r;
  r.param_grads = zero_param_grads(params);
  for (const auto& s : c.input_shapes) r.input_grads.emplace_back(batched(N, s));
  T* dx = r.input_grads[0].ptr();

  switch (spec.kind) {
    case LayerKind::dense: {
      const Tensor<T>& x = c.saved[0];
      const std::size_t d = c.input_shapes[0].back(), u = spec.units, rows = x.size() / d;
      std::vector<T> dz = grad.data;
      activation_grad(spec.activation, c.saved[1].data, dz);
      gemm(Trans::yes, Trans::no, d, u, rows, T(1), x.ptr(), d, dz.data(), u, T(0), r.param_grads[0].ptr(), u);
      column_sums(rows, u, dz.data(), r.param_grads[1].ptr());
      gemm(Trans::no, Trans::yes, rows, d, u, T(1), dz.data(), u, params.tensors[0].ptr(), u, T(0), dx, d);
      break;
    }
    case LayerKind::conv2d:
    case LayerKind::conv1d: {
      const auto g = detail::conv_geometry(spec, c.input_shapes[0]);
      Tensor<T> dz = grad;
      activation_grad(spec.activation, c.saved[1].data, dz.data);
      kernels::conv_backward(g, N, c.saved[0].ptr(), params.tensors[0].ptr(), dz.ptr(), dx,
                             r.param_grads[0].ptr(), r.param_grads[1].ptr());
      break;
    }
    case LayerKind::dropout:
      if (c.saved.empty()) {
        r.input_grads[0].data = grad.data;
      } else {
        const Tensor<T>& mask = c.saved[0];
        for (std::size_t i = 0; i < grad.size(); ++i) dx[i] = grad[i] * mask[i];
      }
      break;
    case LayerKind::activation:
      r.input_grads[0].data = grad.data;
      activation_grad(spec.activation, c.saved[0].data, r.input_grads[0].data);
      break;
    case LayerKind::flatten:
    case LayerKind::reshape:
      r.input_grads[0].data = grad.data;
      break;
    case LayerKind::zero_pad: {
      const Shape& s = c.input_shapes[0];
      const std::size_t H = s[0], W = s[1], C = s[2], Wo = out_shape[1];
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < H; ++i)
          std::copy_n(grad.ptr() + n * shape_size(out_shape) + ((i + spec.pad[0]) * Wo + spec.pad[2]) * C, W * C,
                      dx + (n * H + i) * W * C);
      break;
    }
    case LayerKind::max_pool: {
      const auto g = detail::pool_geometry(spec, c.input_shapes[0]);
      kernels::maxpool_backward(g, N, grad.ptr(), c.index.data(), dx);
      break;
    }
    case LayerKind::lstm: {
      const std::size_t h = spec.units, Tn = c.input_shapes[0][0];
      const LstmRef<T> tr{c.saved[1], c.saved[2], c.saved[3]};
      const Tensor<T> dH = hidden_grad(grad, N, Tn, h, spec.return_sequences, h, 0, Tn - 1);
      r.input_grads[0] = lstm_grad(c.saved[0], params.tensors[0], params.tensors[1], tr, dH, h, false,
                                   r.param_grads[0].ptr(), r.param_grads[1].ptr(), r.param_grads[2].ptr());
      break;
    }
    case LayerKind::gru: {
      const std::size_t h = spec.units, Tn = c.input_shapes[0][0];
      const GruRef<T> tr{c.saved[1], c.saved[2], c.saved[3]};
      const Tensor<T> dH = hidden_grad(grad, N, Tn, h, spec.return_sequences, h, 0, Tn - 1);
      r.input_grads[0] = gru_grad(c.saved[0], params.tensors[0], params.tensors[1], tr, dH, h,
                                  r.param_grads[0].ptr(), r.param_grads[1].ptr(), r.param_grads[2].ptr());
      break;
    }
    case LayerKind::bilstm: {
      const std::size_t h = spec.units, Tn = c.input_shapes[0][0];
      const LstmRef<T> fw{c.saved[1], c.saved[2], c.saved[3]};
      const LstmRef<T> bw{c.saved[4], c.saved[5], c.saved[6]};
      const Tensor<T> dHf = hidden_grad(grad, N, Tn, h, spec.return_sequences, 2 * h, 0, Tn - 1);
      const Tensor<T> dHb = hidden_grad(grad, N, Tn, h, spec.return_sequences, 2 * h, h, 0);
      Tensor<T> dxf = lstm_grad(c.saved[0], params.tensors[0], params.tensors[1], fw, dHf, h, false,
                                r.param_grads[0].ptr(), r.param_grads[1].ptr(), r.param_grads[2].ptr());
      Tensor<T> dxb = lstm_grad(c.saved[0], params.tensors[3], params.tensors[4], bw, dHb, h, true,
                                r.param_grads[3].ptr(), r.param_grads[4].ptr(), r.param_grads[5].ptr());
      for (std::size_t i = 0; i < dxf.size(); ++i) dxf[i] += dxb[i];
      r.input_grads[0] = std::move(dxf);
      break;
    }
    case LayerKind::concat: {
      const std::size_t ax = detail::normalize_axis(spec.axis, c.input_shapes[0].size(), spec.name);
      const AxisSplit os = split_at(grad.shape, ax);
      std::size_t off = 0;
      for (auto& g_in : r.input_grads) {
        const AxisSplit is = split_at(g_in.shape, ax);
        const std::size_t block = is.dim * is.inner;
        for (std::size_t o = 0; o < os.outer; ++o)
          std::copy_n(grad.ptr() + o * os.dim * os.inner + off, block, g_in.ptr() + o * block);
        off += block;
      }
      break;
    }
    case LayerKind::add:
      for (auto& g_in : r.input_grads) g_in.data = grad.data;
      break;
    case LayerKind::slice: {
      const std::size_t ax = detail::normalize_axis(spec.axis, c.input_shapes[0].size(), spec.name);
      const AxisSplit is = split_at(r.input_grads[0].shape, ax);
      const std::size_t len = (spec.end - spec.begin) * is.inner;
      for (std::size_t o = 0; o < is.outer; ++o)
        std::copy_n(grad.ptr() + o * len, len, dx + (o * is.dim + spec.begin) * is.inner);
      break;
    }
    case LayerKind::permute: {
      const auto map = permute_map(c.input_shapes[0], spec.perm);
      const std::size_t S = map.size();
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t o = 0; o < S; ++o) dx[n * S + map[o]] = grad[n * S + o];
      break;
    }
  }
  return r;
}

#define AMR_INSTANTIATE_LAYERS(T)                                                                  \
  template LayerParams<T> zero_params<T>(const LayerSpec&, const std::vector<Shape>&);             \
  template LayerParams<T> init_params<T>(const LayerSpec&, const std::vector<Shape>&, Rng&);       \
  template ForwardResult<T> layer_forward<T>(const LayerSpec&, const LayerParams<T>&,              \
                                             const std::vector<const Tensor<T>*>&, const ForwardContext&); \
  template BackwardResult<T> layer_backward<T>(const LayerSpec&, const LayerParams<T>&,            \
                                               const LayerCache<T>&, const Tensor<T>&);

AMR_INSTANTIATE_LAYERS(float)
AMR_INSTANTIATE_LAYERS(double)

#undef AMR_INSTANTIATE_LAYERS

}  // namespace amr
