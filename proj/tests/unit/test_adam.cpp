#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nspf/adam.hpp"
#include "nspf/error.hpp"

using namespace nspf;

namespace {

ModelParams scalar_params(double x) {
  ModelParams p;
  p.tensors.push_back({"x", {1}, {x}});
  return p;
}

}  // namespace

TEST(Adam, FirstStepMovesByLearningRate) {
  for (double g : {3.0, -0.25, 1e-3}) {
    double x = 1.0, m = 0.0, v = 0.0;
    const AdamConfig cfg{0.01, 0.9, 0.999, 1e-8};
    adam_update({&x, 1}, {&g, 1}, {&m, 1}, {&v, 1}, 1, cfg);
    // Bias-corrected moments equal g and g^2 after one step.
    const double expected = 1.0 - 0.01 * g / (std::fabs(g) + 1e-8);
    EXPECT_DOUBLE_EQ(x, expected);
    EXPECT_NEAR(x, 1.0 - 0.01 * (g > 0 ? 1 : -1), 1e-7);
  }
}

TEST(Adam, SecondStepHandEvaluated) {
  double x = 0.0, m = 0.0, v = 0.0;
  const AdamConfig cfg{0.1, 0.9, 0.999, 1e-8};
  const double g1 = 2.0, g2 = -1.0;
  adam_update({&x, 1}, {&g1, 1}, {&m, 1}, {&v, 1}, 1, cfg);
  adam_update({&x, 1}, {&g2, 1}, {&m, 1}, {&v, 1}, 2, cfg);
  const double m2 = 0.9 * 0.1 * g1 + 0.1 * g2;
  const double v2 = 0.999 * 0.001 * g1 * g1 + 0.001 * g2 * g2;
  const double step2 = 0.1 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
  EXPECT_NEAR(x, -0.1 * g1 / (std::fabs(g1) + 1e-8) - step2, 1e-14);
}

TEST(Adam, ZeroGradientLeavesParametersButCountsStep) {
  ModelParams p = scalar_params(0.5);
  AdamState s = make_adam_state(p);
  adam_step(p, s, scalar_params(0.0), AdamConfig{});
  EXPECT_EQ(p.tensors[0].data[0], 0.5);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, MinimizesQuadratic) {
  ModelParams p = scalar_params(1.0);
  AdamState s = make_adam_state(p);
  const AdamConfig cfg{0.1, 0.9, 0.999, 1e-8};
  int reached = -1;
  for (int t = 1; t <= 200; ++t) {
    adam_step(p, s, scalar_params(p.tensors[0].data[0]), cfg);
    if (std::fabs(p.tensors[0].data[0]) < 0.1) {
      reached = t;
      break;
    }
  }
  EXPECT_GT(reached, 0);
}

TEST(Adam, DeterministicState) {
  auto run = [] {
    ModelParams p = scalar_params(1.0);
    AdamState s = make_adam_state(p);
    for (int t = 0; t < 50; ++t) adam_step(p, s, scalar_params(std::sin(p.tensors[0].data[0])), AdamConfig{});
    return std::pair{p, s};
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Adam, NonFiniteGradientNamesTensor) {
  ModelParams p = scalar_params(1.0);
  AdamState s = make_adam_state(p);
  try {
    adam_step(p, s, scalar_params(std::numeric_limits<double>::infinity()), AdamConfig{});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("x"), std::string::npos);
  }
  EXPECT_EQ(s.step, 0);
  EXPECT_EQ(p.tensors[0].data[0], 1.0);
}
