#include "amr/tensor/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "amr/tensor/layers.hpp"

namespace amr {

namespace {

using D = double;

struct Probe {
  const LayerSpec& spec;
  LayerParams<D>& params;
  std::vector<Tensor<D>>& inputs;
  const Tensor<D>& weights;
  std::uint64_t mask_seed;

  ForwardResult<D> forward() const {
    std::vector<const Tensor<D>*> in;
    for (const auto& t : inputs) in.push_back(&t);
    Rng rng(mask_seed);
    return layer_forward(spec, params, in, ForwardContext{Mode::train, &rng, true});
  }

  double loss() const {
    const auto r = forward();
    double s = 0.0;
    for (std::size_t i = 0; i < r.output.size(); ++i) s += r.output[i] * weights[i];
    return s;
  }
};

}  // namespace

GradCheckResult grad_check(const LayerSpec& spec, const std::vector<Shape>& input_shapes,
                           const GradCheckOptions& opt) {
  Rng rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Shape out_shape = infer_shape(spec, input_shapes);

  std::vector<Tensor<D>> inputs;
  for (const auto& s : input_shapes) {
    Tensor<D> t(batched(opt.batch, s));
    for (D& v : t.data) v = normal(rng);
    inputs.push_back(std::move(t));
  }
  LayerParams<D> params = init_params<D>(spec, input_shapes, rng);
  // Perturb biases and kernels so nothing sits at an initialization symmetry.
  for (auto& t : params.tensors)
    for (D& v : t.data) v += 0.1 * normal(rng);
  Tensor<D> weights(batched(opt.batch, out_shape));
  for (D& v : weights.data) v = normal(rng);

  Probe probe{spec, params, inputs, weights, derive_seed(opt.seed, "mask")};
  const auto fwd = probe.forward();
  const auto grads = layer_backward(spec, params, fwd.cache, weights);

  GradCheckResult res;
  auto compare = [&](std::vector<D>& values, const std::vector<D>& analytic, const std::string& label) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const D saved = values[i];
      values[i] = saved + opt.step;
      const double up = probe.loss();
      values[i] = saved - opt.step;
      const double down = probe.loss();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * opt.step);
      const double a = analytic[i];
      const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), opt.floor});
      ++res.checked;
      if (err > res.max_rel_error) {
        res.max_rel_error = err;
        res.worst = label + "[" + std::to_string(i) + "]";
      }
    }
  };
  for (std::size_t k = 0; k < inputs.size(); ++k)
    compare(inputs[k].data, grads.input_grads[k].data, "input" + std::to_string(k));
  const auto names = param_shapes(spec, input_shapes);
  for (std::size_t k = 0; k < params.tensors.size(); ++k)
    compare(params.tensors[k].data, grads.param_grads[k].data, names[k].name);
  return res;
}

}  // namespace amr
