#include "lrru/adam.hpp"

#include <cmath>

#include "lrru/error.hpp"

namespace lrru {

void adam_step(ModelParams& params, AdamState& state, const AdamOptions& options) {
  auto& tensors = params.tensors();
  if (state.m.empty()) {
    state.m.resize(tensors.size());
    state.v.resize(tensors.size());
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      state.m[i].assign(static_cast<std::size_t>(tensors[i].numel()), 0.0);
      state.v[i].assign(static_cast<std::size_t>(tensors[i].numel()), 0.0);
    }
  }
  if (state.m.size() != tensors.size()) throw DimensionError("adam: state/parameter mismatch");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(options.beta1, t);
  const double c2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    Tensor& p = tensors[k];
    auto values = p.mutable_data();
    const auto grad = p.grad();
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (m.size() != values.size()) throw DimensionError("adam: moment size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = (grad.empty() ? 0.0 : grad[i]) + options.weight_decay * values[i];
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * g;
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      values[i] -= options.lr * mhat / (std::sqrt(vhat) + options.eps);
    }
  }
}

}  // namespace lrru
