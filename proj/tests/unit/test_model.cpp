#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "nspf/error.hpp"
#include "nspf/geometry.hpp"
#include "nspf/model.hpp"
#include "nspf/random.hpp"

using namespace nspf;

namespace {

ModelConfig small_config(Activation act = Activation::swish) {
  ModelConfig mc;
  mc.levels = 2;
  mc.base_channels = 4;
  mc.res_w = mc.res_h = 8;
  mc.activation = act;
  mc.seed = 3;
  return mc;
}

// Parameter count from layer shapes alone.
std::size_t closed_form_count(int levels, int base, int cap) {
  auto ch = [&](int k) { return std::min(base << k, cap); };
  auto conv = [](int ci, int co, int k) { return static_cast<std::size_t>(co * ci * k * k + co); };
  const int top = levels - 1;
  std::size_t n = 0;
  for (int k = 0; k < top; ++k) n += conv(k == 0 ? 1 : ch(k), ch(k), 3) + conv(ch(k), ch(k + 1), 2);
  n += conv(ch(top), ch(top), 3);
  std::size_t dec = conv(ch(0), 1, 3);
  for (int k = 0; k < top; ++k) dec += conv(ch(k + 1), ch(k), 3) + conv(2 * ch(k), ch(k), 3);
  return n + 3 * dec;
}

GeometryImage holey(int w, int h) {
  GeometryImage g(w, h, 1);
  g(w / 2, h / 2) = 0;
  g(w / 2 + 1, h / 2) = 0;
  return g;
}

}  // namespace

TEST(Activation, ScalarValues) {
  EXPECT_EQ(activation_eval(Activation::relu, -1.0), 0.0);
  EXPECT_EQ(activation_eval(Activation::relu, 2.0), 2.0);
  EXPECT_EQ(activation_eval(Activation::swish, 0.0), 0.0);
  EXPECT_NEAR(activation_eval(Activation::swish, 1.0), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(activation_eval(Activation::swish, 1.0), 0.7311, 1e-4);
}

TEST(Activation, DerivativeMatchesDifferenceQuotient) {
  for (Activation a : {Activation::relu, Activation::swish}) {
    for (double x : {-2.3, -0.4, 0.7, 3.1}) {
      const double fd = (activation_eval(a, x + 1e-6) - activation_eval(a, x - 1e-6)) / 2e-6;
      EXPECT_NEAR(activation_derivative(a, x), fd, 1e-8);
    }
  }
}

TEST(Activation, NamesRoundTrip) {
  EXPECT_EQ(activation_from_string(to_string(Activation::swish)), Activation::swish);
  EXPECT_EQ(activation_from_string("relu"), Activation::relu);
  EXPECT_THROW(activation_from_string("tanh"), ValidationError);
}

TEST(BuildModel, TwoLevelParameterCount) {
  const ModelParams p = build_model(small_config());
  EXPECT_EQ(p.parameter_count(), 2623u);
  EXPECT_EQ(p.parameter_count(), closed_form_count(2, 4, 512));
  EXPECT_EQ(p.at("enc0.conv.weight").shape, (std::vector<int>{4, 1, 3, 3}));
  EXPECT_EQ(p.at("enc0.down.weight").shape, (std::vector<int>{8, 4, 2, 2}));
  EXPECT_EQ(p.at("bottleneck.weight").shape, (std::vector<int>{8, 8, 3, 3}));
  EXPECT_EQ(p.at("dec_v.fuse0.weight").shape, (std::vector<int>{4, 8, 3, 3}));
  EXPECT_EQ(p.at("dec_p.out.weight").shape, (std::vector<int>{1, 4, 3, 3}));
}

TEST(BuildModel, DeepCountsAndChannelCap) {
  ModelConfig mc;
  mc.levels = 8;
  mc.base_channels = 64;
  EXPECT_EQ(mc.channels(0), 64);
  EXPECT_EQ(mc.channels(3), 512);
  EXPECT_EQ(mc.channels(7), 512);
  for (int levels : {2, 3, 4, 5}) {
    ModelConfig c;
    c.levels = levels;
    c.base_channels = 3;
    c.max_channels = 12;
    c.res_w = 64;
    c.res_h = 32;
    EXPECT_EQ(build_model(c).parameter_count(), closed_form_count(levels, 3, 12)) << levels;
  }
}

TEST(BuildModel, SeedDeterminesParameters) {
  const ModelConfig mc = small_config();
  EXPECT_EQ(build_model(mc), build_model(mc));
  ModelConfig other = mc;
  other.seed = 4;
  EXPECT_NE(build_model(mc), build_model(other));
}

TEST(BuildModel, HeUniformBoundsAndZeroBias) {
  const ModelParams p = build_model(small_config());
  for (const Tensor& t : p.tensors) {
    if (t.shape.size() == 1) {
      for (double b : t.data) EXPECT_EQ(b, 0.0);
      continue;
    }
    const double fan_in = t.shape[1] * t.shape[2] * t.shape[3];
    const double bound = std::sqrt(6.0 / fan_in);
    for (double w : t.data) EXPECT_LE(std::fabs(w), bound) << t.name;
  }
}

TEST(ModelConfig, DivisibilityChecked) {
  ModelConfig mc;
  mc.levels = 8;
  mc.res_w = 256;
  mc.res_h = 128;
  EXPECT_TRUE(mc.violations().empty());
  mc.res_h = 64;
  const auto v = mc.violations();
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("level 7"), std::string::npos) << v[0];
  EXPECT_THROW(build_model(mc), ValidationError);
  mc.res_h = 128;
  mc.levels = 1;
  EXPECT_FALSE(mc.violations().empty());
}

TEST(Forward, OutputShapeAndMasking) {
  ModelConfig mc = small_config();
  mc.levels = 3;
  mc.res_w = 16;
  mc.res_h = 8;
  const GeometryImage g = holey(16, 8);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    mc.seed = seed;
    const FieldSet f = forward(mc, build_model(mc), g, FluidConstants{});
    ASSERT_EQ(f.width(), 16);
    ASSERT_EQ(f.height(), 8);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g[k] != 0) continue;
      EXPECT_EQ(f.u[k], 0.0);
      EXPECT_EQ(f.v[k], 0.0);
      EXPECT_EQ(f.p[k], 0.0);
    }
    const BoundaryImage bnd = encode_boundary(g);
    EXPECT_EQ(f, enforce_bcs(f, bnd, FluidConstants{}));
  }
}

TEST(Forward, DeterministicAndResolutionChecked) {
  const ModelConfig mc = small_config();
  const ModelParams p = build_model(mc);
  const GeometryImage g = holey(8, 8);
  EXPECT_EQ(forward(mc, p, g, FluidConstants{}), forward(mc, p, g, FluidConstants{}));
  EXPECT_THROW(forward(mc, p, GeometryImage(16, 8, 1), FluidConstants{}), ValidationError);
}

TEST(Forward, LevelShapesHalveAndRestore) {
  ModelConfig mc = small_config();
  mc.levels = 4;
  mc.res_w = 32;
  mc.res_h = 16;
  const UNet net(mc);
  auto cache = net.make_cache();
  const FieldSet f = net.forward(build_model(mc), GeometryImage(32, 16, 1), cache.get());
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(cache->w[k], 32 >> k);
    EXPECT_EQ(cache->h[k], 16 >> k);
  }
  EXPECT_EQ(cache->bottleneck.rows(), 4 * 2);
  EXPECT_EQ(cache->bottleneck.cols(), mc.channels(3));
  EXPECT_EQ(f.width(), 32);
  EXPECT_EQ(f.height(), 16);
}

class GradientTest : public ::testing::TestWithParam<Activation> {};

TEST_P(GradientTest, BackwardMatchesCentralDifferences) {
  const ModelConfig mc = small_config(GetParam());
  const UNet net(mc);
  ModelParams params = build_model(mc);
  // Nonzero biases so ReLU kinks are not hit at exactly zero.
  Rng rng(17);
  for (auto& t : params.tensors) {
    if (t.shape.size() == 1) {
      for (auto& b : t.data) b = rng.uniform(-0.1, 0.1);
    }
  }
  const GeometryImage g = holey(8, 8);
  const FieldSet weights = test::random_fields(8, 8, 5);
  auto loss = [&](const ModelParams& p) {
    const FieldSet out = net.forward(p, g);
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
      for (std::size_t k = 0; k < out.u.size(); ++k) s += weights.channel(c)[k] * out.channel(c)[k];
    }
    return s;
  };
  auto cache = net.make_cache();
  net.forward(params, g, cache.get());
  ModelParams grads = zeros_like(params);
  net.backward(params, *cache, weights, grads);

  for (int s = 0; s < 60; ++s) {
    const std::size_t ti = rng.below(params.tensors.size());
    Tensor& t = params.tensors[ti];
    const std::size_t k = rng.below(t.size());
    const double x0 = t.data[k];
    t.data[k] = x0 + 1e-5;
    const double lp = loss(params);
    t.data[k] = x0 - 1e-5;
    const double lm = loss(params);
    t.data[k] = x0;
    const double fd = (lp - lm) / 2e-5;
    const double an = grads.tensors[ti].data[k];
    EXPECT_NEAR(an, fd, 1e-6 * std::max(1.0, std::fabs(fd))) << t.name << "[" << k << "]";
  }
}

INSTANTIATE_TEST_SUITE_P(Activations, GradientTest, ::testing::Values(Activation::relu, Activation::swish),
                         [](const auto& info) { return to_string(info.param); });

TEST(ZerosLike, SameShapesAllZero) {
  const ModelParams p = build_model(small_config());
  const ModelParams z = zeros_like(p);
  ASSERT_EQ(z.tensors.size(), p.tensors.size());
  for (std::size_t i = 0; i < p.tensors.size(); ++i) {
    EXPECT_EQ(z.tensors[i].name, p.tensors[i].name);
    EXPECT_EQ(z.tensors[i].shape, p.tensors[i].shape);
    for (double x : z.tensors[i].data) EXPECT_EQ(x, 0.0);
  }
  EXPECT_THROW(p.at("missing"), ValidationError);
}
