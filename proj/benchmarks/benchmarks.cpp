#include <benchmark/benchmark.h>

#include "nspf/dataset.hpp"
#include "nspf/geometry.hpp"
#include "nspf/losses.hpp"
#include "nspf/random.hpp"
#include "nspf/residual.hpp"
#include "nspf/solver.hpp"
#include "nspf/stencil.hpp"
#include "nspf/training.hpp"

namespace {

using namespace nspf;

ChannelSpec spec_for(int w) { return {6.0, 3.0, w, w / 2}; }

FieldSet noisy_fields(int w, int h) {
  Rng rng(1);
  FieldSet f(w, h);
  for (int c = 0; c < 3; ++c) {
    for (auto& x : f.channel(c).values()) x = rng.uniform(-1.0, 1.0);
  }
  return f;
}

GeometryCase obstacle_case(int w) {
  const ChannelSpec spec = spec_for(w);
  return make_case("bench", generate_star_polygon(4, 6, spec), spec);
}

void BM_CrossCorrelateLaplacian(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const int order = static_cast<int>(state.range(1));
  const Field f = noisy_fields(w, w / 2).u;
  const Stencil s = make_stencil(Derivative::laplacian, order, 6.0 / w);
  for (auto _ : state) benchmark::DoNotOptimize(cross_correlate(f, s));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.size()));
}
BENCHMARK(BM_CrossCorrelateLaplacian)->Args({64, 2})->Args({256, 2})->Args({256, 6});

void BM_NsResidual(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const GeometryCase c = obstacle_case(w);
  const FieldSet f = noisy_fields(w, w / 2);
  const NsScheme scheme(c.bnd, 6.0 / w, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ns_residual(f, scheme, 0.05));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.bnd.size()));
}
BENCHMARK(BM_NsResidual)->Arg(64)->Arg(256);

void BM_PhysicsLoss(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const GeometryCase c = obstacle_case(w);
  const FieldSet f = noisy_fields(w, w / 2);
  for (auto _ : state) benchmark::DoNotOptimize(physics_loss(f, c.bnd, FluidConstants{}, LossWeights{}, 6.0 / w));
}
BENCHMARK(BM_PhysicsLoss)->Arg(64)->Arg(256);

ModelConfig bench_model(int w, int levels, int base) {
  ModelConfig mc;
  mc.levels = levels;
  mc.base_channels = base;
  mc.res_w = w;
  mc.res_h = w / 2;
  mc.activation = Activation::swish;
  return mc;
}

void BM_Predict(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const ModelConfig mc = bench_model(w, static_cast<int>(state.range(1)), static_cast<int>(state.range(2)));
  const Trainer tr(mc, TrainConfig{}, FluidConstants{}, spec_for(w));
  const TrainState st = tr.initial_state();
  const GeometryCase c = obstacle_case(w);
  for (auto _ : state) benchmark::DoNotOptimize(tr.predict(st.params, c));
}
BENCHMARK(BM_Predict)->Args({64, 4, 16})->Args({64, 4, 32})->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const ModelConfig mc = bench_model(w, static_cast<int>(state.range(1)), static_cast<int>(state.range(2)));
  const Trainer tr(mc, TrainConfig{}, FluidConstants{}, spec_for(w));
  TrainState st = tr.initial_state();
  const GeometryCase c = obstacle_case(w);
  const PreparedCase pc = tr.prepare(c);
  for (auto _ : state) benchmark::DoNotOptimize(tr.step(st, pc));
}
BENCHMARK(BM_TrainStep)->Args({64, 4, 16})->Args({64, 4, 32})->Unit(benchmark::kMillisecond);

void BM_OracleSolve(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const GeometryCase c = obstacle_case(w);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_discrete_ns(c.geom, FluidConstants{}, spec_for(w), SolverConfig{}));
  }
}
BENCHMARK(BM_OracleSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
