#include "nspf/adam.hpp"

#include <cmath>

#include "nspf/error.hpp"

namespace nspf {

AdamState make_adam_state(const ModelParams& params) { return {zeros_like(params), zeros_like(params), 0}; }

void adam_update(std::span<double> x, std::span<const double> g, std::span<double> m, std::span<double> v,
                 std::int64_t t, const AdamConfig& cfg) {
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t k = 0; k < x.size(); ++k) {
    m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
    v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
    x[k] -= cfg.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + cfg.eps);
  }
}

void adam_step(ModelParams& params, AdamState& state, const ModelParams& grads, const AdamConfig& cfg) {
  if (grads.tensors.size() != params.tensors.size() || state.m.tensors.size() != params.tensors.size()) {
    throw ValidationError("adam_step: parameter, gradient and moment layouts differ");
  }
  for (const auto& t : grads.tensors) {
    for (double x : t.data) {
      if (!std::isfinite(x)) throw NumericalError("non-finite gradient in tensor " + t.name);
    }
  }
  ++state.step;
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    auto& p = params.tensors[i];
    if (grads.tensors[i].size() != p.size()) throw ValidationError("adam_step: shape mismatch for " + p.name);
    adam_update(p.data, grads.tensors[i].data, state.m.tensors[i].data, state.v.tensors[i].data, state.step, cfg);
  }
}

}  // namespace nspf
