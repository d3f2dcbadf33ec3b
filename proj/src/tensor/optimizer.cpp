#include "amr/tensor/optimizer.hpp"

#include <cmath>

#include "amr/common/error.hpp"

namespace amr {

template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, const std::vector<const Tensor<T>*>& grads,
               AdamState<T>& st, const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw ShapeError("adam: parameter and gradient counts differ");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k]->shape != grads[k]->shape)
      throw ShapeError("adam: gradient " + to_string(grads[k]->shape) + " does not match parameter " +
                       to_string(params[k]->shape));
    if (!grads[k]->all_finite())
      throw TrainingDivergence("adam: non-finite gradient in parameter tensor " + std::to_string(k));
  }
  if (st.m.empty()) {
    for (const auto* p : params) {
      st.m.emplace_back(p->size(), 0.0);
      st.v.emplace_back(p->size(), 0.0);
    }
  } else if (st.m.size() != params.size()) {
    throw ShapeError("adam: state does not match parameter list");
  }
  ++st.step;
  const double b1 = cfg.beta1, b2 = cfg.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(st.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    T* p = params[k]->ptr();
    const T* g = grads[k]->ptr();
    double* m = st.m[k].data();
    double* v = st.v[k].data();
    const std::size_t n = params[k]->size();
    for (std::size_t i = 0; i < n; ++i) {
      const double gi = g[i];
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      p[i] -= static_cast<T>(cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.epsilon));
    }
  }
}

template <typename T>
void Adam<T>::step(Model<T>& model) {
  std::vector<Tensor<T>*> p;
  std::vector<const Tensor<T>*> g;
  for (const auto& ref : model.parameters()) {
    p.push_back(ref.value);
    g.push_back(ref.grad);
  }
  adam_step(p, g, state_, cfg_);
  model.mark_updated();
}

template void adam_step(const std::vector<Tensor<float>*>&, const std::vector<const Tensor<float>*>&,
                        AdamState<float>&, const AdamConfig&);
template void adam_step(const std::vector<Tensor<double>*>&, const std::vector<const Tensor<double>*>&,
                        AdamState<double>&, const AdamConfig&);
template class Adam<float>;
template class Adam<double>;

}  // namespace amr
