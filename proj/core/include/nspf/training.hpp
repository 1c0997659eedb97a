#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "nspf/adam.hpp"
#include "nspf/dataset.hpp"
#include "nspf/losses.hpp"
#include "nspf/model.hpp"
#include "nspf/operators.hpp"

namespace nspf {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 1;
  int epochs = 100;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  int stencil_order = 2;
  LossWeights loss_weights;
  LossScheme loss_scheme = LossScheme::physics;
  int checkpoint_every = 0;  // 0: final checkpoint only
  int validate_every = 10;
  bool record_timing = true;

  AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_eps}; }
  std::vector<std::string> violations() const;
  bool operator==(const TrainConfig&) const = default;
};

struct HistoryRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_rel_l2_u = std::numeric_limits<double>::quiet_NaN();
  double val_rel_l2_p = std::numeric_limits<double>::quiet_NaN();
  double mean_abs_div = 0.0;
  double mean_abs_mom = 0.0;
  double wall_seconds = 0.0;
};

struct TrainState {
  ModelParams params;
  AdamState adam;
  std::vector<HistoryRow> history;
};

std::string history_to_csv(const std::vector<HistoryRow>& rows);

/// A geometry with its precomputed residual operators.
struct PreparedCase {
  const GeometryCase* source = nullptr;
  std::shared_ptr<const NsOperators> ops;
};

/// Metrics of the current parameters on a set of cases.
struct EvalSummary {
  double loss = 0.0;              // mean training loss
  double rel_l2_u = std::numeric_limits<double>::quiet_NaN();  // mean over cases with references
  double rel_l2_p = std::numeric_limits<double>::quiet_NaN();
  double mean_abs_div = 0.0;      // mean over cases
  double mean_abs_mom = 0.0;
  std::size_t with_reference = 0;
};

class Trainer {
 public:
  Trainer(ModelConfig model, TrainConfig train, FluidConstants consts, ChannelSpec spec);

  const ModelConfig& model_config() const { return model_; }
  const TrainConfig& train_config() const { return train_; }

  PreparedCase prepare(const GeometryCase& c) const;
  TrainState initial_state() const;

  /// Loss of one case and, if grads is non-null, its parameter gradient
  /// (accumulated into *grads).
  LossTerms loss_gradient(const ModelParams& params, const PreparedCase& c, ModelParams* grads) const;

  /// BC-enforced prediction.
  FieldSet predict(const ModelParams& params, const GeometryCase& c) const;

  /// One Adam step on one case; returns the loss before the update.
  double step(TrainState& state, const PreparedCase& c) const;

  EvalSummary evaluate(const ModelParams& params, const std::vector<PreparedCase>& cases) const;

  using EpochCallback = std::function<void(const TrainState&, int epoch)>;

  /// Runs train_config().epochs epochs over shuffled training cases, appending
  /// an epoch-0 row and then a row per epoch (validation metrics every
  /// validate_every epochs and at the last epoch). Throws NumericalError on a
  /// non-finite loss, leaving `state` at the last finite parameters.
  void run(TrainState& state, const std::vector<GeometryCase>& train, const std::vector<GeometryCase>& val,
           const EpochCallback& on_epoch = {}) const;

 private:
  ModelConfig model_;
  TrainConfig train_;
  FluidConstants consts_;
  ChannelSpec spec_;
  UNet net_;
};

}  // namespace nspf
