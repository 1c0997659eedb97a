// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.
//
//   nspf_acceptance [criterion ...]   (no arguments: all of them)

#include <Eigen/SparseCore>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "nspf/dataset.hpp"
#include "nspf/geometry.hpp"
#include "nspf/io.hpp"
#include "nspf/losses.hpp"
#include "nspf/manufactured.hpp"
#include "nspf/model.hpp"
#include "nspf/operators.hpp"
#include "nspf/metrics.hpp"
#include "nspf/random.hpp"
#include "nspf/residual.hpp"
#include "nspf/solver.hpp"
#include "nspf/stencil.hpp"
#include "nspf/training.hpp"

namespace fs = std::filesystem;
using namespace nspf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double inf_norm(const Field& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::fabs(x));
  return m;
}

Field random_field(int w, int h, Rng& rng) {
  Field f(w, h);
  for (auto& x : f.values()) x = rng.uniform(-1.0, 1.0);
  return f;
}

FieldSet random_fields(int w, int h, Rng& rng) {
  FieldSet f(w, h);
  for (int c = 0; c < 3; ++c) {
    for (auto& x : f.channel(c).values()) x = rng.uniform(-1.0, 1.0);
  }
  return f;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nspf_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// 1. Cross-correlation with the five-point kernel equals the matrix product.

Eigen::SparseMatrix<double> five_point_matrix(int n, double h) {
  std::vector<Eigen::Triplet<double>> t;
  const double s = 1.0 / (h * h);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int row = j * n + i;
      t.emplace_back(row, row, -4.0 * s);
      if (i > 0) t.emplace_back(row, row - 1, s);
      if (i + 1 < n) t.emplace_back(row, row + 1, s);
      if (j > 0) t.emplace_back(row, row - n, s);
      if (j + 1 < n) t.emplace_back(row, row + n, s);
    }
  }
  Eigen::SparseMatrix<double> a(n * n, n * n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

Outcome stencil_matrix_equivalence() {
  Rng rng(20240101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(13));
    const double h = 1.0 / n;
    const Field u = random_field(n, n, rng);
    const Stencil lap = make_stencil(Derivative::laplacian, 2, h);
    const Field conv = cross_correlate(u, lap);
    const Eigen::SparseMatrix<double> hand = five_point_matrix(n, h);
    const Eigen::Map<const Eigen::VectorXd> x(u.values().data(), static_cast<Eigen::Index>(u.size()));
    const Eigen::Map<const Eigen::VectorXd> y(conv.values().data(), static_cast<Eigen::Index>(conv.size()));
    const Eigen::SparseMatrix<double> assembled = assemble_stencil(lap, n, n);
    for (const Eigen::SparseMatrix<double>* a : {&hand, &assembled}) {
      const Eigen::VectorXd prod = *a * x;
      worst = std::max(worst, (y - prod).lpNorm<Eigen::Infinity>() / prod.lpNorm<Eigen::Infinity>());
    }
  }
  return {worst < 1e-12, fmt("max relative error %.3e over 100 fields (limit 1e-12)", worst)};
}

// ---------------------------------------------------------------------------
// 2. Poiseuille residuals.

Outcome poiseuille_residuals() {
  const ChannelSpec spec{6.0, 3.0, 64, 32};
  const FluidConstants consts;
  const FieldSet f = poiseuille_solution(spec, consts, consts.inflow_u);
  const BoundaryImage bnd = encode_boundary(GeometryImage(64, 32, 1));
  const NsResidual r = ns_residual(f, bnd, consts, spec.h(), 2);
  double mom = 0.0, div = 0.0;
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    if (code::momentum_row(bnd[k])) mom = std::max({mom, std::fabs(r.mx[k]), std::fabs(r.my[k])});
    if (code::divergence_row(bnd[k])) div = std::max(div, std::fabs(r.d[k]));
  }
  const double scale = std::max({inf_norm(f.u), inf_norm(f.v), inf_norm(f.p)});
  const double limit = 1e-12 * scale;
  return {mom < limit && div < limit,
          fmt("momentum %.3e, divergence %.3e", mom, div) + fmt(" (limit %.3e)", limit)};
}

// ---------------------------------------------------------------------------
// 3. Oracle convergence order on the Kovasznay flow.

Outcome kovasznay_order() {
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const ChannelSpec spec{6.0, 3.0, n, n / 2};
    const SolveResult r = solve_discrete_ns(kovasznay_problem(spec, 40.0), SolverConfig{});
    if (!r.report.converged) return {false, "solve at " + std::to_string(n) + " did not converge"};
    errs.push_back(velocity_rel_l2(r.fields, kovasznay_solution(spec, 40.0), GeometryImage(n, n / 2, 1)));
  }
  const double o1 = std::log2(errs[0] / errs[1]);
  const double o2 = std::log2(errs[1] / errs[2]);
  const bool ok = o1 >= 1.7 && o1 <= 2.3 && o2 >= 1.7 && o2 <= 2.3;
  std::ostringstream d;
  d << "errors " << errs[0] << ", " << errs[1] << ", " << errs[2] << "; orders " << fmt("%.3f, %.3f", o1, o2)
    << " (range [1.7, 2.3])";
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 4. Analytic parameter gradients against central differences.

Outcome gradient_check() {
  const ChannelSpec spec{1.0, 1.0, 8, 8};
  ModelConfig mc;
  mc.levels = 2;
  mc.base_channels = 4;
  mc.res_w = mc.res_h = 8;
  mc.activation = Activation::swish;
  mc.seed = 5;
  const Trainer tr(mc, TrainConfig{}, FluidConstants{}, spec);
  GeometryCase c;
  c.id = "g";
  c.geom = GeometryImage(8, 8, 1);
  c.geom(3, 4) = c.geom(4, 4) = c.geom(4, 3) = 0;
  c.bnd = encode_boundary(c.geom);
  const PreparedCase pc = tr.prepare(c);
  ModelParams params = build_model(mc);
  ModelParams grads = zeros_like(params);
  tr.loss_gradient(params, pc, &grads);
  double gmax = 0.0;
  for (const auto& t : grads.tensors) {
    for (double g : t.data) gmax = std::max(gmax, std::fabs(g));
  }
  Rng rng(77);
  double worst = 0.0;
  const double eps = 1e-5;
  for (int s = 0; s < 100; ++s) {
    const std::size_t ti = rng.below(params.tensors.size());
    Tensor& t = params.tensors[ti];
    const std::size_t k = rng.below(t.size());
    const double x0 = t.data[k];
    t.data[k] = x0 + eps;
    const double lp = tr.loss_gradient(params, pc, nullptr).total;
    t.data[k] = x0 - eps;
    const double lm = tr.loss_gradient(params, pc, nullptr).total;
    t.data[k] = x0;
    const double fd = (lp - lm) / (2.0 * eps);
    const double an = grads.tensors[ti].data[k];
    const double rel = std::fabs(an - fd) / std::max({std::fabs(an), std::fabs(fd), 1e-7 * gmax});
    worst = std::max(worst, rel);
  }
  return {worst < 1e-4, fmt("max relative error %.3e over 100 parameters (limit 1e-4)", worst)};
}

// ---------------------------------------------------------------------------
// Training setups shared by 5, 6 and 11.

std::vector<PreparedCase> prepare_all(const Trainer& tr, const std::vector<GeometryCase>& cases) {
  std::vector<PreparedCase> out;
  for (const auto& c : cases) out.push_back(tr.prepare(c));
  return out;
}

// 5. One geometry, physics loss only, compared with the oracle.
constexpr int kSingleSteps = 2000;

Outcome single_geometry() {
  const ChannelSpec spec{6.0, 3.0, 64, 32};
  const FluidConstants consts;
  GeometryCase c = make_case("single", generate_star_polygon(101, 4, spec), spec);
  const SolveResult ref = solve_discrete_ns(c.geom, consts, spec, SolverConfig{});
  if (!ref.report.converged) return {false, "oracle did not converge"};
  ModelConfig mc;
  mc.levels = 4;
  mc.base_channels = 32;
  mc.res_w = 64;
  mc.res_h = 32;
  mc.activation = Activation::swish;
  TrainConfig tc;
  tc.learning_rate = 5e-4;
  tc.loss_weights.w_divergence = 100.0;
  const Trainer tr(mc, tc, consts, spec);
  const PreparedCase pc = tr.prepare(c);
  TrainState st = tr.initial_state();
  for (int s = 0; s < kSingleSteps; ++s) tr.step(st, pc);
  const FieldSet pred = tr.predict(st.params, c);
  const double eu = velocity_rel_l2(pred, ref.fields, c.geom);
  const double ep = relative_l2(pred.p, ref.fields.p, c.geom);
  return {eu <= 0.05 && ep <= 0.08,
          fmt("after %.0f steps", kSingleSteps) + fmt(": rel L2 u %.4f, p %.4f (limits 0.05, 0.08)", eu, ep)};
}

// 6 and 11. Forty training and ten validation geometries.
constexpr int kMultiEpochs = 200;

struct MultiSetup {
  ChannelSpec spec{6.0, 3.0, 64, 32};
  std::vector<GeometryCase> train;
  std::vector<GeometryCase> val;
};

MultiSetup multi_setup() {
  MultiSetup s;
  const std::vector<int> edges{3, 4, 5, 6, 12};
  const FluidConstants consts;
  for (int k = 0; k < 50; ++k) {
    const Polygon p = generate_star_polygon(mix_seed(606, static_cast<std::uint64_t>(k)), edges[k % 5], s.spec);
    GeometryCase c = make_case(case_id(static_cast<std::size_t>(k)), p, s.spec, k < 40 ? "train" : "val");
    const SolveResult r = solve_discrete_ns(c.geom, consts, s.spec, SolverConfig{});
    if (r.report.converged) c.reference = r.fields;
    (k < 40 ? s.train : s.val).push_back(std::move(c));
  }
  return s;
}

struct MultiResult {
  EvalSummary initial_train;
  EvalSummary final_train;
  EvalSummary final_val;
};

MultiResult multi_run(const MultiSetup& s, double w_div) {
  ModelConfig mc;
  mc.levels = 4;
  mc.base_channels = 16;
  mc.res_w = 64;
  mc.res_h = 32;
  mc.activation = Activation::swish;
  mc.seed = 6;
  TrainConfig tc;
  tc.learning_rate = 1e-3;
  tc.epochs = kMultiEpochs;
  tc.seed = 6;
  tc.validate_every = kMultiEpochs;
  tc.loss_weights.w_divergence = w_div;
  const Trainer tr(mc, tc, FluidConstants{}, s.spec);
  TrainState st = tr.initial_state();
  const auto train = prepare_all(tr, s.train);
  const auto val = prepare_all(tr, s.val);
  MultiResult r;
  r.initial_train = tr.evaluate(st.params, train);
  tr.run(st, s.train, s.val);
  r.final_train = tr.evaluate(st.params, train);
  r.final_val = tr.evaluate(st.params, val);
  return r;
}

Outcome multi_geometry(const MultiResult& r) {
  const double div_drop = r.initial_train.mean_abs_div / r.final_train.mean_abs_div;
  const double mom_drop = r.initial_train.mean_abs_mom / r.final_train.mean_abs_mom;
  const double gap = r.final_val.rel_l2_u - r.final_train.rel_l2_u;
  std::ostringstream d;
  d << "residual drop div " << fmt("%.1fx", div_drop) << ", mom " << fmt("%.1fx", mom_drop) << " (need 100x); rel L2 u"
    << fmt(" train %.4f, val %.4f", r.final_train.rel_l2_u, r.final_val.rel_l2_u)
    << fmt(", gap %.2f pp (limit 2 pp)", 100.0 * gap);
  return {div_drop >= 100.0 && mom_drop >= 100.0 && gap <= 0.02, d.str()};
}

Outcome divergence_weight(const MultiResult& w1, const MultiResult& w10) {
  const double a = w1.final_train.mean_abs_div;
  const double b = w10.final_train.mean_abs_div;
  return {b < a, fmt("mean |Rd| with w_div=1: %.4e, with w_div=10: %.4e", a, b)};
}

// ---------------------------------------------------------------------------
// 7. Loss algebra.

Outcome loss_algebra() {
  Rng rng(7);
  GeometryImage g(16, 8, 1);
  g(6, 3) = g(7, 3) = g(7, 4) = 0;
  const BoundaryImage bnd = encode_boundary(g);
  const FluidConstants consts;
  double worst = 0.0;
  bool exact = true;
  for (int trial = 0; trial < 50; ++trial) {
    const FieldSet pred = random_fields(16, 8, rng), ref = random_fields(16, 8, rng);
    LossWeights w;
    w.w_data = rng.uniform(0.01, 5.0);
    w.w_pde = rng.uniform(0.01, 5.0);
    w.w_momentum = rng.uniform(0.0, 3.0);
    w.w_divergence = rng.uniform(0.0, 3.0);
    const double total = hybrid_loss(pred, &ref, bnd, g, consts, w, 0.375);
    const double parts = w.w_data * data_loss(pred, ref, g) + w.w_pde * physics_loss(pred, bnd, consts, w, 0.375);
    worst = std::max(worst, std::fabs(total - parts) / std::fabs(parts));
    LossWeights only_pde = w;
    only_pde.w_data = 0.0;
    LossWeights only_data = w;
    only_data.w_pde = 0.0;
    exact = exact && hybrid_loss(pred, &ref, bnd, g, consts, only_pde, 0.375) ==
                         w.w_pde * physics_loss(pred, bnd, consts, w, 0.375);
    exact = exact && hybrid_loss(pred, &ref, bnd, g, consts, only_data, 0.375) == w.w_data * data_loss(pred, ref, g);
  }
  return {worst < 1e-14 && exact, fmt("max relative decomposition error %.3e (limit 1e-14); degenerate cases ", worst) +
                                      (exact ? "exact" : "NOT exact")};
}

// ---------------------------------------------------------------------------
// 8. Hard boundary conditions.

Outcome hard_bcs() {
  const ChannelSpec spec{6.0, 3.0, 64, 32};
  Rng rng(8);
  std::size_t checked = 0, bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const GeometryImage g = rasterize(generate_star_polygon(rng.next(), 3 + trial % 6, spec), spec);
    const BoundaryImage bnd = encode_boundary(g);
    FieldSet e;
    if (trial % 2 == 0) {
      FieldSet f = random_fields(64, 32, rng);
      for (int c = 0; c < 3; ++c) {
        for (auto& x : f.channel(c).values()) x *= 50.0;
      }
      e = enforce_bcs(f, bnd, FluidConstants{});
    } else {
      // Untrained network output.
      ModelConfig mc;
      mc.levels = 3;
      mc.base_channels = 4;
      mc.res_w = 64;
      mc.res_h = 32;
      mc.seed = static_cast<std::uint64_t>(trial);
      const Trainer tr(mc, TrainConfig{}, FluidConstants{}, spec);
      GeometryCase c;
      c.geom = g;
      c.bnd = bnd;
      e = tr.predict(build_model(mc), c);
    }
    for (std::size_t k = 0; k < bnd.size(); ++k) {
      const auto c = bnd[k];
      if (c == code::inflow) {
        ++checked;
        bad += !(e.u[k] == 3.0 && e.v[k] == 0.0);
      } else if (c == code::wall) {
        ++checked;
        bad += !(e.u[k] == 0.0 && e.v[k] == 0.0);
      } else if (c == code::outflow) {
        ++checked;
        bad += !(e.p[k] == 0.0);
      }
    }
  }
  return {bad == 0 && checked > 0, std::to_string(checked) +
                                       " boundary pixels checked on projected random fields and network outputs, " + std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------------------
// 9. Cell-Reynolds threshold at 256x128.

Outcome cell_reynolds() {
  const FluidConstants consts;
  const ChannelSpec spec{6.0, 3.0, 256, 128};
  const double threshold = cell_reynolds_threshold(consts, spec.h());
  const double expected = 2.0 * 0.05 / (6.0 / 256.0);  // 4.2666...
  GeometryImage g(256, 128, 1);
  FieldSet below(256, 128), above(256, 128);
  below.u(100, 60) = std::nextafter(expected, 0.0);
  above.u(100, 60) = std::nextafter(expected, 10.0);
  const bool flags_ok = !max_velocity_diag(below, g, consts, spec.h()).cell_reynolds_exceeded &&
                        max_velocity_diag(above, g, consts, spec.h()).cell_reynolds_exceeded;
  const bool ok = std::fabs(threshold - expected) <= 1e-15 * expected && std::fabs(threshold - 4.2667) < 5e-5 &&
                  flags_ok;
  return {ok, fmt("threshold %.6f m/s (expected %.6f)", threshold, expected) +
                  (flags_ok ? "; flag flips at the threshold" : "; flag does not flip at the threshold")};
}

// ---------------------------------------------------------------------------
// 10. Determinism of gen, solve, train and eval through the CLI.

int cli_run(std::vector<std::string> args, std::string& log) {
  args.insert(args.begin(), "nspf");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) log += err.str();
  return code;
}

Outcome determinism() {
  const fs::path root = scratch_dir("determinism");
  std::string log;
  auto pipeline = [&](const fs::path& dir) {
    const std::string data = (dir / "data").string();
    const std::string run = (dir / "run").string();
    return cli_run({"gen", "--out", data, "--n", "4", "--edges", "5,6", "--res", "32x16", "--seed", "10"}, log) ||
           cli_run({"solve", "--data", data, "--no-timing"}, log) ||
           cli_run({"train", "--data", data, "--out", run, "--epochs", "3", "--levels", "3", "--base-channels", "4",
                    "--lr", "1e-3", "--seed", "3", "--no-timing", "--quiet"},
                   log) ||
           cli_run({"eval", "--checkpoint", run + "/checkpoint", "--data", data, "--out", (dir / "eval").string(),
                    "--no-timing"},
                   log);
  };
  if (pipeline(root / "a") || pipeline(root / "b")) return {false, "pipeline failed: " + log};
  const std::vector<std::string> files{"data/manifest.json", "data/geom_0002.pgm",       "data/ref_0001.nsf",
                                       "run/history.csv",    "run/checkpoint/params.nsp", "run/checkpoint/config.json",
                                       "eval/metrics.csv",   "eval/summary.json"};
  std::vector<std::string> differing;
  for (const auto& f : files) {
    if (io::read_text(root / "a" / f) != io::read_text(root / "b" / f)) differing.push_back(f);
  }
  if (!differing.empty()) return {false, "files differ: " + differing.front()};
  return {true, std::to_string(files.size()) + " artifacts byte-identical across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::atoi(argv[k]));
  if (wanted.empty()) {
    for (int k = 1; k <= 11; ++k) wanted.insert(k);
  }
  const std::map<int, std::string> names{{1, "stencil-matrix equivalence"},
                                         {2, "exact-solution residuals"},
                                         {3, "oracle convergence order"},
                                         {4, "gradient correctness"},
                                         {5, "single-geometry training"},
                                         {6, "multi-geometry training"},
                                         {7, "loss algebra"},
                                         {8, "hard boundary conditions"},
                                         {9, "cell-Reynolds threshold"},
                                         {10, "determinism"},
                                         {11, "divergence-weight study"}};
  const std::map<int, std::function<Outcome()>> simple{{1, stencil_matrix_equivalence}, {2, poiseuille_residuals},
                                                        {3, kovasznay_order},            {4, gradient_check},
                                                        {5, single_geometry},            {7, loss_algebra},
                                                        {8, hard_bcs},                   {9, cell_reynolds},
                                                        {10, determinism}};
  int failures = 0;
  auto report = [&](int id, const Outcome& o, double seconds) {
    std::printf("%s  criterion %2d  %-28s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, names.at(id).c_str(),
                o.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  auto timed = [](const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    return std::pair{o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
  };

  for (int id : wanted) {
    if (simple.count(id)) {
      const auto [o, s] = timed(simple.at(id));
      report(id, o, s);
    }
  }
  if (wanted.count(6) || wanted.count(11)) {
    // Criterion 11 reuses the weight-1 run of criterion 6.
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    try {
      const MultiSetup setup = multi_setup();
      const MultiResult w1 = multi_run(setup, 1.0);
      if (wanted.count(6)) report(6, multi_geometry(w1), elapsed());
      if (wanted.count(11)) {
        const MultiResult w10 = multi_run(setup, 10.0);
        report(11, divergence_weight(w1, w10), elapsed());
      }
    } catch (const std::exception& e) {
      for (int id : {6, 11}) {
        if (wanted.count(id)) report(id, {false, std::string("exception: ") + e.what()}, elapsed());
      }
    }
  }
  for (int id : wanted) {
    if (!names.count(id)) {
      std::printf("FAIL  criterion %2d  unknown criterion\n", id);
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
