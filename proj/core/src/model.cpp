#include "nspf/model.hpp"

#include <algorithm>
#include <cmath>

#include "nspf/error.hpp"
#include "nspf/geometry.hpp"
#include "nspf/parallel.hpp"
#include "nspf/random.hpp"
#include "nspf/residual.hpp"

namespace nspf {

using nn::Matrix;

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "swish"; }

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "swish") return Activation::swish;
  throw ValidationError("unknown activation '" + name + "' (expected relu or swish)");
}

double activation_eval(Activation kind, double x) {
  if (kind == Activation::relu) return x > 0.0 ? x : 0.0;
  return x / (1.0 + std::exp(-x));
}

double activation_derivative(Activation kind, double x) {
  if (kind == Activation::relu) return x > 0.0 ? 1.0 : 0.0;
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

int ModelConfig::channels(int level) const {
  long long c = base_channels;
  for (int k = 0; k < level && c < max_channels; ++k) c *= 2;
  return static_cast<int>(std::min<long long>(c, max_channels));
}

std::vector<std::string> ModelConfig::violations() const {
  std::vector<std::string> v;
  if (levels < 2) v.push_back("levels: " + std::to_string(levels) + " < 2");
  if (base_channels < 1) v.push_back("base_channels: " + std::to_string(base_channels) + " < 1");
  if (max_channels < base_channels) v.push_back("max_channels: smaller than base_channels");
  if (res_w < 1 || res_h < 1) {
    v.push_back("input_resolution: must be positive");
  } else if (levels >= 2 && levels < 31) {
    const int f = 1 << (levels - 1);
    if (res_w % f != 0) {
      v.push_back("input_resolution: width " + std::to_string(res_w) + " not divisible by 2^" +
                  std::to_string(levels - 1) + " (level " + std::to_string(levels - 1) + ")");
    }
    if (res_h % f != 0) {
      v.push_back("input_resolution: height " + std::to_string(res_h) + " not divisible by 2^" +
                  std::to_string(levels - 1) + " (level " + std::to_string(levels - 1) + ")");
    }
  }
  return v;
}

void ModelConfig::validate() const {
  if (auto v = violations(); !v.empty()) throw ValidationError(v);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

const Tensor& ModelParams::at(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw ValidationError("no parameter tensor named " + name);
}

Tensor& ModelParams::at(const std::string& name) {
  return const_cast<Tensor&>(static_cast<const ModelParams&>(*this).at(name));
}

bool ModelParams::all_finite() const {
  for (const auto& t : tensors) {
    for (double x : t.data) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z = params;
  for (auto& t : z.tensors) std::fill(t.data.begin(), t.data.end(), 0.0);
  return z;
}

namespace {

const char* const decoder_names[3] = {"dec_u", "dec_v", "dec_p"};

struct LayerSpec {
  std::string name;
  int ci;
  int co;
  int k;
};

std::vector<LayerSpec> layer_specs(const ModelConfig& cfg) {
  std::vector<LayerSpec> out;
  const int top = cfg.levels - 1;
  int in = 1;
  for (int k = 0; k < top; ++k) {
    out.push_back({"enc" + std::to_string(k) + ".conv", in, cfg.channels(k), 3});
    out.push_back({"enc" + std::to_string(k) + ".down", cfg.channels(k), cfg.channels(k + 1), 2});
    in = cfg.channels(k + 1);
  }
  out.push_back({"bottleneck", cfg.channels(top), cfg.channels(top), 3});
  for (const char* d : decoder_names) {
    for (int k = top - 1; k >= 0; --k) {
      out.push_back({std::string(d) + ".up" + std::to_string(k), cfg.channels(k + 1), cfg.channels(k), 3});
      out.push_back({std::string(d) + ".fuse" + std::to_string(k), 2 * cfg.channels(k), cfg.channels(k), 3});
    }
    out.push_back({std::string(d) + ".out", cfg.channels(0), 1, 3});
  }
  return out;
}

Matrix activate(Activation a, const Matrix& x) {
  if (a == Activation::relu) return x.cwiseMax(0.0);
  return x.unaryExpr([](double t) { return t / (1.0 + std::exp(-t)); });
}

// dy * act'(pre), in place on dy.
void activate_backward(Activation a, const Matrix& pre, Matrix& dy) {
  if (a == Activation::relu) {
    dy = (pre.array() > 0.0).select(dy, 0.0);
    return;
  }
  dy.array() *= pre.unaryExpr([](double t) { return activation_derivative(Activation::swish, t); }).array();
}

struct ConvView {
  Eigen::Map<const Matrix> wt;  // (ci * k * k) x co
  const std::vector<double>& bias;
};

ConvView conv_view(const ModelParams& p, const std::string& name) {
  const Tensor& w = p.at(name + ".weight");
  const Tensor& b = p.at(name + ".bias");
  const Eigen::Index co = w.shape[0];
  const Eigen::Index rows = static_cast<Eigen::Index>(w.size()) / co;
  return {Eigen::Map<const Matrix>(w.data.data(), rows, co), b.data};
}

Matrix conv_apply(const ConvView& v, const Matrix& cols) {
  Matrix y = cols * v.wt;
  for (Eigen::Index c = 0; c < y.cols(); ++c) y.col(c).array() += v.bias[static_cast<std::size_t>(c)];
  return y;
}

Matrix conv3(const ModelParams& p, const std::string& name, const Matrix& x, int w, int h) {
  Matrix cols;
  nn::im2col3x3(x, w, h, cols);
  return conv_apply(conv_view(p, name), cols);
}

Matrix down2(const ModelParams& p, const std::string& name, const Matrix& x, int w, int h) {
  Matrix cols;
  nn::im2col2x2s2(x, w, h, cols);
  return conv_apply(conv_view(p, name), cols);
}

// Accumulates weight/bias gradients; returns d(input) unless skip_input.
Matrix conv_backward(const ModelParams& p, ModelParams& g, const std::string& name, const Matrix& x, int w, int h,
                     const Matrix& dy, bool stride2, bool skip_input = false) {
  Matrix cols;
  if (stride2) {
    nn::im2col2x2s2(x, w, h, cols);
  } else {
    nn::im2col3x3(x, w, h, cols);
  }
  Tensor& gw = g.at(name + ".weight");
  Tensor& gb = g.at(name + ".bias");
  const Eigen::Index co = gw.shape[0];
  Eigen::Map<Matrix> gwt(gw.data.data(), static_cast<Eigen::Index>(gw.size()) / co, co);
  gwt.noalias() += cols.transpose() * dy;
  for (Eigen::Index c = 0; c < co; ++c) gb.data[static_cast<std::size_t>(c)] += dy.col(c).sum();
  Matrix dx = Matrix::Zero(x.rows(), x.cols());
  if (skip_input) return dx;
  const Matrix dcols = dy * conv_view(p, name).wt.transpose();
  if (stride2) {
    nn::col2im2x2s2(dcols, w, h, dx);
  } else {
    nn::col2im3x3(dcols, w, h, dx);
  }
  return dx;
}

}  // namespace

ModelParams build_model(const ModelConfig& config) {
  config.validate();
  ModelParams params;
  std::uint64_t stream = 0;
  for (const auto& spec : layer_specs(config)) {
    Tensor w{spec.name + ".weight", {spec.co, spec.ci, spec.k, spec.k}, {}};
    w.data.resize(shape_size(w.shape));
    const double fan_in = static_cast<double>(spec.ci) * spec.k * spec.k;
    const double bound = std::sqrt(6.0 / fan_in);
    Rng rng(mix_seed(config.seed, stream++));
    for (double& x : w.data) x = rng.uniform(-bound, bound);
    Tensor b{spec.name + ".bias", {spec.co}, std::vector<double>(static_cast<std::size_t>(spec.co), 0.0)};
    params.tensors.push_back(std::move(w));
    params.tensors.push_back(std::move(b));
  }
  return params;
}


UNet::UNet(const ModelConfig& config) : config_(config) { config_.validate(); }
UNet::~UNet() = default;
UNet::UNet(UNet&&) noexcept = default;
UNet& UNet::operator=(UNet&&) noexcept = default;

std::unique_ptr<UNet::Cache> UNet::make_cache() const { return std::make_unique<Cache>(); }

FieldSet UNet::forward(const ModelParams& params, const GeometryImage& geom, Cache* cache) const {
  const ModelConfig& cfg = config_;
  if (geom.width() != cfg.res_w || geom.height() != cfg.res_h) {
    throw ValidationError("geometry resolution " + std::to_string(geom.width()) + "x" +
                          std::to_string(geom.height()) + " does not match model input " +
                          std::to_string(cfg.res_w) + "x" + std::to_string(cfg.res_h));
  }
  const int top = cfg.levels - 1;
  Cache local;
  Cache& c = cache ? *cache : local;
  c.levels = cfg.levels;
  c.w.resize(static_cast<std::size_t>(cfg.levels));
  c.h.resize(static_cast<std::size_t>(cfg.levels));
  for (int k = 0; k < cfg.levels; ++k) {
    c.w[static_cast<std::size_t>(k)] = cfg.res_w >> k;
    c.h[static_cast<std::size_t>(k)] = cfg.res_h >> k;
  }
  c.enc_in.assign(static_cast<std::size_t>(cfg.levels), {});
  c.enc_pre.assign(static_cast<std::size_t>(top), {});
  c.skip.assign(static_cast<std::size_t>(top), {});
  c.down_pre.assign(static_cast<std::size_t>(top), {});

  Matrix x(static_cast<Eigen::Index>(geom.size()), 1);
  for (std::size_t k = 0; k < geom.size(); ++k) x(static_cast<Eigen::Index>(k), 0) = geom[k];
  for (int k = 0; k < top; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const int w = c.w[ku];
    const int h = c.h[ku];
    c.enc_in[ku] = std::move(x);
    c.enc_pre[ku] = conv3(params, "enc" + std::to_string(k) + ".conv", c.enc_in[ku], w, h);
    c.skip[ku] = activate(cfg.activation, c.enc_pre[ku]);
    c.down_pre[ku] = down2(params, "enc" + std::to_string(k) + ".down", c.skip[ku], w, h);
    x = activate(cfg.activation, c.down_pre[ku]);
  }
  c.enc_in[static_cast<std::size_t>(top)] = std::move(x);
  c.bottleneck_pre = conv3(params, "bottleneck", c.enc_in[static_cast<std::size_t>(top)],
                           c.w[static_cast<std::size_t>(top)], c.h[static_cast<std::size_t>(top)]);
  c.bottleneck = activate(cfg.activation, c.bottleneck_pre);

  FieldSet out(cfg.res_w, cfg.res_h);
  parallel_for(3, [&](std::size_t d) {
    auto& dc = c.dec[d];
    const std::string prefix = decoder_names[d];
    dc.up_in.assign(static_cast<std::size_t>(top), {});
    dc.up_pre.assign(static_cast<std::size_t>(top), {});
    dc.cat.assign(static_cast<std::size_t>(top), {});
    dc.fuse_pre.assign(static_cast<std::size_t>(top), {});
    const Matrix* y = &c.bottleneck;
    Matrix act;
    for (int k = top - 1; k >= 0; --k) {
      const auto ku = static_cast<std::size_t>(k);
      const int w = c.w[ku];
      const int h = c.h[ku];
      dc.up_in[ku] = nn::upsample2(*y, c.w[ku + 1], c.h[ku + 1]);
      dc.up_pre[ku] = conv3(params, prefix + ".up" + std::to_string(k), dc.up_in[ku], w, h);
      const Eigen::Index ck = dc.up_pre[ku].cols();
      dc.cat[ku].resize(dc.up_pre[ku].rows(), 2 * ck);
      dc.cat[ku].leftCols(ck) = activate(cfg.activation, dc.up_pre[ku]);
      dc.cat[ku].rightCols(ck) = c.skip[ku];
      dc.fuse_pre[ku] = conv3(params, prefix + ".fuse" + std::to_string(k), dc.cat[ku], w, h);
      act = activate(cfg.activation, dc.fuse_pre[ku]);
      y = &act;
    }
    dc.out_in = *y;
    const Matrix o = conv3(params, prefix + ".out", dc.out_in, cfg.res_w, cfg.res_h);
    Field& f = out.channel(static_cast<int>(d));
    for (Eigen::Index k = 0; k < o.rows(); ++k) f[static_cast<std::size_t>(k)] = o(k, 0);
  });
  return out;
}

void UNet::backward(const ModelParams& params, const Cache& c, const FieldSet& grad_output,
                    ModelParams& grads) const {
  const ModelConfig& cfg = config_;
  const int top = cfg.levels - 1;
  // Per-decoder gradients w.r.t. the skips and the bottleneck, summed in a
  // fixed order afterwards so results do not depend on thread timing.
  std::vector<Matrix> dskip[3];
  Matrix dbottleneck[3];
  parallel_for(3, [&](std::size_t d) {
    const auto& dc = c.dec[d];
    const std::string prefix = decoder_names[d];
    const Field& g = grad_output.channel(static_cast<int>(d));
    Matrix dy(static_cast<Eigen::Index>(g.size()), 1);
    for (std::size_t k = 0; k < g.size(); ++k) dy(static_cast<Eigen::Index>(k), 0) = g[k];
    dy = conv_backward(params, grads, prefix + ".out", dc.out_in, cfg.res_w, cfg.res_h, dy, false);
    dskip[d].assign(static_cast<std::size_t>(top), {});
    for (int k = 0; k < top; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const int w = c.w[ku];
      const int h = c.h[ku];
      activate_backward(cfg.activation, dc.fuse_pre[ku], dy);
      Matrix dcat = conv_backward(params, grads, prefix + ".fuse" + std::to_string(k), dc.cat[ku], w, h, dy, false);
      const Eigen::Index ck = dc.up_pre[ku].cols();
      dskip[d][ku] = dcat.rightCols(ck);
      Matrix dup = dcat.leftCols(ck);
      activate_backward(cfg.activation, dc.up_pre[ku], dup);
      Matrix din = conv_backward(params, grads, prefix + ".up" + std::to_string(k), dc.up_in[ku], w, h, dup, false);
      dy = nn::upsample2_backward(din, c.w[ku + 1], c.h[ku + 1]);
    }
    dbottleneck[d] = std::move(dy);
  });

  Matrix dx = dbottleneck[0] + dbottleneck[1] + dbottleneck[2];
  activate_backward(cfg.activation, c.bottleneck_pre, dx);
  const auto tu = static_cast<std::size_t>(top);
  dx = conv_backward(params, grads, "bottleneck", c.enc_in[tu], c.w[tu], c.h[tu], dx, false);
  for (int k = top - 1; k >= 0; --k) {
    const auto ku = static_cast<std::size_t>(k);
    const int w = c.w[ku];
    const int h = c.h[ku];
    activate_backward(cfg.activation, c.down_pre[ku], dx);
    Matrix ds = conv_backward(params, grads, "enc" + std::to_string(k) + ".down", c.skip[ku], w, h, dx, true);
    ds += dskip[0][ku];
    ds += dskip[1][ku];
    ds += dskip[2][ku];
    activate_backward(cfg.activation, c.enc_pre[ku], ds);
    dx = conv_backward(params, grads, "enc" + std::to_string(k) + ".conv", c.enc_in[ku], w, h, ds, false, k == 0);
  }
}

FieldSet forward(const ModelConfig& config, const ModelParams& params, const GeometryImage& geom,
                 const FluidConstants& consts) {
  FieldSet out = UNet(config).forward(params, geom);
  const BoundaryImage bnd = encode_boundary(geom);
  enforce_bcs_inplace(out, bnd, consts);
  return out;
}

}  // namespace nspf
