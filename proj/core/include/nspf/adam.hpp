#pragma once

#include <cstdint>
#include <span>

#include "nspf/model.hpp"

namespace nspf {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moments shaped like the parameters.
struct AdamState {
  ModelParams m;
  ModelParams v;
  std::int64_t step = 0;

  bool operator==(const AdamState&) const = default;
};

AdamState make_adam_state(const ModelParams& params);

/// One bias-corrected Adam update of a flat parameter block at step `t` (>= 1).
void adam_update(std::span<double> x, std::span<const double> g, std::span<double> m, std::span<double> v,
                 std::int64_t t, const AdamConfig& cfg);

/// Increments state.step and updates every tensor. Throws NumericalError
/// naming the tensor if a gradient is non-finite.
void adam_step(ModelParams& params, AdamState& state, const ModelParams& grads, const AdamConfig& cfg);

}  // namespace nspf
