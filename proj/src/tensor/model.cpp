#include "amr/tensor/model.hpp"

#include "amr/common/error.hpp"

namespace amr {

template <typename T>
Model<T>::Model(NetworkSpec net, std::uint64_t seed) : net_(std::move(net)) {
  topo_ = resolve_topology(net_);
  shapes_ = infer_shapes(net_, topo_);
  const std::size_t L = net_.layers.size();
  in_shapes_.resize(L);
  params_.resize(L);
  grads_.resize(L);
  const std::uint64_t init_seed = derive_seed(seed, "init");
  for (std::size_t i = 0; i < L; ++i) {
    for (long e : topo_.edges[i])
      in_shapes_[i].push_back(e < 0 ? net_.input_shape : shapes_[static_cast<std::size_t>(e)]);
    Rng rng(derive_seed(init_seed, net_.layers[i].name));
    params_[i] = init_params<T>(net_.layers[i], in_shapes_[i], rng);
    for (const auto& p : params_[i].tensors) grads_[i].emplace_back(p.shape);
  }
}

template <typename T>
std::size_t Model<T>::total_params() const {
  std::size_t n = 0;
  for (const auto& lp : params_)
    for (const auto& t : lp.tensors) n += t.size();
  return n;
}

template <typename T>
Tensor<T> Model<T>::run(const Tensor<T>& x, const ForwardContext& ctx, std::vector<LayerCache<T>>* caches) const {
  if (x.sample_shape() != net_.input_shape)
    throw ShapeError("model input " + to_string(x.shape) + " does not match " +
                     to_string(batched(x.batch(), net_.input_shape)));
  const std::size_t L = net_.layers.size();
  // Outputs are released as soon as their last consumer has run.
  std::vector<std::size_t> pending(L, 0);
  for (std::size_t i = 0; i < L; ++i)
    for (long e : topo_.edges[i])
      if (e >= 0) ++pending[static_cast<std::size_t>(e)];
  std::vector<std::optional<Tensor<T>>> outputs(L);
  if (caches) caches->assign(L, LayerCache<T>{});
  for (std::size_t i : topo_.order) {
    std::vector<const Tensor<T>*> in;
    for (long e : topo_.edges[i]) in.push_back(e < 0 ? &x : &*outputs[static_cast<std::size_t>(e)]);
    auto r = layer_forward(net_.layers[i], params_[i], in, ctx);
    outputs[i] = std::move(r.output);
    if (caches) (*caches)[i] = std::move(r.cache);
    for (long e : topo_.edges[i]) {
      if (e < 0) continue;
      const auto src = static_cast<std::size_t>(e);
      if (--pending[src] == 0 && src != topo_.output) outputs[src].reset();
    }
  }
  return std::move(*outputs[topo_.output]);
}

template <typename T>
Tensor<T> Model<T>::forward(const Tensor<T>& x, Mode mode, Rng* rng) {
  ForwardContext ctx{mode, rng, mode == Mode::train};
  if (mode == Mode::eval) {
    caches_.clear();
    return run(x, ctx, nullptr);
  }
  last_batch_ = x.batch();
  return run(x, ctx, &caches_);
}

template <typename T>
Tensor<T> Model<T>::predict(const Tensor<T>& x) const {
  return run(x, ForwardContext{Mode::eval, nullptr, false}, nullptr);
}

template <typename T>
void Model<T>::backward(const Tensor<T>& grad_output) {
  const std::size_t L = net_.layers.size();
  if (caches_.size() != L) throw ContractError("backward called without a train-mode forward");
  std::vector<std::optional<Tensor<T>>> upstream(L);
  upstream[topo_.output] = grad_output;
  for (auto it = topo_.order.rbegin(); it != topo_.order.rend(); ++it) {
    const std::size_t i = *it;
    if (!upstream[i]) continue;
    auto r = layer_backward(net_.layers[i], params_[i], caches_[i], *upstream[i]);
    upstream[i].reset();
    caches_[i] = LayerCache<T>{};
    for (std::size_t k = 0; k < r.param_grads.size(); ++k) {
      auto& acc = grads_[i][k];
      const auto& g = r.param_grads[k];
      for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += g[j];
    }
    for (std::size_t k = 0; k < topo_.edges[i].size(); ++k) {
      const long e = topo_.edges[i][k];
      if (e < 0) continue;
      auto& slot = upstream[static_cast<std::size_t>(e)];
      if (!slot) {
        slot = std::move(r.input_grads[k]);
      } else {
        for (std::size_t j = 0; j < slot->size(); ++j) (*slot)[j] += r.input_grads[k][j];
      }
    }
  }
  caches_.clear();
}

template <typename T>
void Model<T>::zero_grad() {
  for (auto& lg : grads_)
    for (auto& g : lg) std::fill(g.data.begin(), g.data.end(), T(0));
}

template <typename T>
void Model<T>::mark_updated() {
  for (auto& lp : params_) ++lp.version;
}

template <typename T>
std::vector<ParamRef<T>> Model<T>::parameters() {
  std::vector<ParamRef<T>> out;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto names = param_shapes(net_.layers[i], in_shapes_[i]);
    for (std::size_t k = 0; k < params_[i].tensors.size(); ++k)
      out.push_back({net_.layers[i].name + "/" + names[k].name, &params_[i].tensors[k], &grads_[i][k]});
  }
  return out;
}

template class Model<float>;
template class Model<double>;

}  // namespace amr
