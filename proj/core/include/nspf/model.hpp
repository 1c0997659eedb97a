#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nspf/fields.hpp"
#include "nspf/grid.hpp"
#include "nspf/tensor.hpp"

namespace nspf {

enum class Activation { relu, swish };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

double activation_eval(Activation kind, double x);
double activation_derivative(Activation kind, double x);

/// U-Net hyperparameters. Level k has min(base_channels * 2^k, max_channels)
/// channels and resolution (res_w, res_h) / 2^k.
struct ModelConfig {
  int levels = 8;
  int base_channels = 64;
  int max_channels = 512;
  Activation activation = Activation::relu;
  int res_w = 256;
  int res_h = 128;
  std::uint64_t seed = 0;

  int channels(int level) const;
  std::vector<std::string> violations() const;
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// All trainable tensors in a fixed order.
struct ModelParams {
  std::vector<Tensor> tensors;

  std::size_t parameter_count() const;
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  bool all_finite() const;

  bool operator==(const ModelParams&) const = default;
};

/// Tensors shaped like a ModelParams, holding gradients or optimizer moments.
ModelParams zeros_like(const ModelParams& params);

/// He-uniform kernels, zero biases, deterministic in config.seed.
ModelParams build_model(const ModelConfig& config);

/// Encoder-decoder network with three decoder paths (u, v, p).
///
/// Encoder level k < L-1: 3x3 conv + act (kept as skip), 2x2 stride-2 conv + act.
/// Bottleneck: 3x3 conv + act. Decoder level k: nearest upsample, 3x3 conv + act,
/// concatenate with skip k, 3x3 conv + act. Output: linear 3x3 conv to 1 channel.
class UNet {
 public:
  explicit UNet(const ModelConfig& config);
  ~UNet();
  UNet(UNet&&) noexcept;
  UNet& operator=(UNet&&) noexcept;

  const ModelConfig& config() const { return config_; }

  /// Activations retained for backward().
  struct Cache {
    int levels = 0;
    std::vector<int> w, h;          // per level
    std::vector<nn::Matrix> enc_in;     // input of enc{k}.conv; enc_in[top] feeds the bottleneck
    std::vector<nn::Matrix> enc_pre;    // pre-activation of enc{k}.conv
    std::vector<nn::Matrix> skip;       // act(enc_pre)
    std::vector<nn::Matrix> down_pre;   // pre-activation of enc{k}.down
    nn::Matrix bottleneck_pre;
    nn::Matrix bottleneck;
    struct Decoder {
      std::vector<nn::Matrix> up_in, up_pre, cat, fuse_pre;  // indexed by level
      nn::Matrix out_in;
    } dec[3];
  };

  /// Unmasked network output. `cache` may be null when no gradient is needed.
  FieldSet forward(const ModelParams& params, const GeometryImage& geom, Cache* cache = nullptr) const;

  /// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(output).
  void backward(const ModelParams& params, const Cache& cache, const FieldSet& grad_output,
                ModelParams& grads) const;

  std::unique_ptr<Cache> make_cache() const;

 private:
  ModelConfig config_;
};

/// Network output with solid pixels zeroed and boundary conditions enforced.
FieldSet forward(const ModelConfig& config, const ModelParams& params, const GeometryImage& geom,
                 const FluidConstants& consts);

}  // namespace nspf
