#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "nspf/checkpoint.hpp"
#include "nspf/config.hpp"
#include "nspf/dataset.hpp"
#include "nspf/error.hpp"
#include "nspf/evaluation.hpp"
#include "nspf/geometry.hpp"
#include "nspf/io.hpp"
#include "nspf/manifest.hpp"
#include "nspf/model.hpp"
#include "nspf/render.hpp"
#include "nspf/training.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;

namespace nspf::cli {

namespace {

// Options shared by every command that reads a run configuration.
struct Common {
  std::string config;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

struct Loaded {
  RunConfig rc;
  bool explicit_resolution = false;  // model.input_resolution given in the file
};

Loaded load_run_config(const std::string& path, const fs::path& fallback = {}) {
  Loaded l;
  fs::path file = path;
  if (file.empty() && !fallback.empty() && fs::exists(fallback)) file = fallback;
  if (file.empty()) return l;
  if (!fs::exists(file)) throw ValidationError("config file not found: " + file.string());
  const std::string text = io::read_text(file);
  l.rc = run_config_from_json(text);
  const auto j = nlohmann::json::parse(text);
  l.explicit_resolution = j.contains("model") && j["model"].is_object() && j["model"].contains("input_resolution");
  return l;
}

void validate(const RunConfig& rc) {
  if (auto v = rc.violations(); !v.empty()) throw ValidationError(v);
}

std::pair<int, int> parse_resolution(const std::string& s) {
  int w = 0;
  int h = 0;
  char x = 0;
  std::istringstream in(s);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || !in.eof()) {
    throw ValidationError("--res: expected WIDTHxHEIGHT, got '" + s + "'");
  }
  return {w, h};
}

std::vector<ParametricObstacle> default_test_shapes() {
  ParametricObstacle circle;
  circle.kind = ObstacleKind::circle;
  circle.radius = 0.4;
  ParametricObstacle oval;
  oval.kind = ObstacleKind::ellipse;
  oval.radius_x = 0.45;
  oval.radius_y = 0.25;
  ParametricObstacle flower;
  flower.kind = ObstacleKind::flower;
  flower.radius = 0.3;
  flower.amplitude = 0.1;
  flower.lobes = 5;
  return {circle, oval, flower};
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Run configuration (JSON); flags override its values");
  c.seed_opt = sub->add_option("--seed", c.seed, "Seed for all randomness of this command");
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  Common common;
  std::string out;
  int n = 0;
  std::vector<int> edges;
  std::string res;
  std::vector<double> fractions;
  bool test_shapes = false;
  CLI::Option *n_opt, *edges_opt, *res_opt, *fractions_opt;
};

int cmd_gen(GenArgs& a, std::ostream& out) {
  Loaded l = load_run_config(a.common.config);
  GenOptions& g = l.rc.dataset;
  if (a.n_opt->count()) g.n = a.n;
  if (a.edges_opt->count()) g.edges = a.edges;
  if (a.common.seed_opt->count()) g.seed = a.common.seed;
  if (a.res_opt->count()) std::tie(g.channel.res_w, g.channel.res_h) = parse_resolution(a.res);
  if (a.fractions_opt->count()) g.split_fractions = a.fractions;
  if (a.test_shapes) g.parametric = default_test_shapes();
  l.rc.dataset_root = a.out;
  validate(l.rc);
  const Manifest m = generate_dataset(g, a.out);
  write_resolved_config(a.out, l.rc);
  out << "wrote " << m.cases.size() << " cases to " << a.out << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  Common common;
  std::string data;
  bool force = false;
  bool no_timing = false;
  std::string method;
  double tol = 0.0;
  int max_iters = 0;
  CLI::Option *method_opt, *tol_opt, *iters_opt;
};

int cmd_solve(SolveArgs& a, std::ostream& out) {
  Loaded l = load_run_config(a.common.config, fs::path(a.data) / "resolved_config.json");
  SolverConfig& s = l.rc.solver;
  if (a.method_opt->count()) s.method = solver_method_from_string(a.method);
  if (a.tol_opt->count()) s.tol = a.tol;
  if (a.iters_opt->count()) s.max_iters = a.max_iters;
  if (a.no_timing) s.record_timing = false;
  l.rc.dataset_root = a.data;
  validate(l.rc);
  const Manifest m = generate_reference_dataset(a.data, l.rc.fluid, s, a.force);
  write_resolved_config(a.data, l.rc);
  std::size_t converged = 0;
  for (const auto& c : m.cases) {
    if (c.has_reference()) {
      ++converged;
    } else {
      out << "case " << c.id << ": reference did not converge\n";
    }
  }
  out << converged << "/" << m.cases.size() << " references converged\n";
  return exit_ok;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  Common common;
  std::string data;
  std::string out;
  int epochs = 0;
  double lr = 0.0;
  int levels = 0;
  int base = 0;
  std::string activation;
  std::string scheme;
  double w_mom = 0.0, w_div = 0.0, w_data = 0.0, w_pde = 0.0;
  int validate_every = 0;
  int checkpoint_every = 0;
  bool no_timing = false;
  bool quiet = false;
  CLI::Option *epochs_opt, *lr_opt, *levels_opt, *base_opt, *act_opt, *scheme_opt, *w_mom_opt, *w_div_opt,
      *w_data_opt, *w_pde_opt, *validate_opt, *ckpt_opt;
};

std::string epoch_dir(int epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "checkpoint_epoch_%04d", epoch);
  return buf;
}

int cmd_train(TrainArgs& a, std::ostream& out) {
  Loaded l = load_run_config(a.common.config);
  RunConfig& rc = l.rc;
  if (!a.data.empty()) rc.dataset_root = a.data;
  if (!a.out.empty()) rc.output_root = a.out;
  if (rc.dataset_root.empty()) throw ValidationError("train: no dataset (--data or dataset_root)");
  if (rc.output_root.empty()) throw ValidationError("train: no output directory (--out or output_root)");
  if (a.common.seed_opt->count()) rc.model.seed = rc.train.seed = a.common.seed;
  if (a.epochs_opt->count()) rc.train.epochs = a.epochs;
  if (a.lr_opt->count()) rc.train.learning_rate = a.lr;
  if (a.levels_opt->count()) rc.model.levels = a.levels;
  if (a.base_opt->count()) rc.model.base_channels = a.base;
  if (a.act_opt->count()) rc.model.activation = activation_from_string(a.activation);
  if (a.scheme_opt->count()) rc.train.loss_scheme = loss_scheme_from_string(a.scheme);
  if (a.w_mom_opt->count()) rc.train.loss_weights.w_momentum = a.w_mom;
  if (a.w_div_opt->count()) rc.train.loss_weights.w_divergence = a.w_div;
  if (a.w_data_opt->count()) rc.train.loss_weights.w_data = a.w_data;
  if (a.w_pde_opt->count()) rc.train.loss_weights.w_pde = a.w_pde;
  if (a.validate_opt->count()) rc.train.validate_every = a.validate_every;
  if (a.ckpt_opt->count()) rc.train.checkpoint_every = a.checkpoint_every;
  if (a.no_timing) rc.train.record_timing = false;

  const fs::path root = rc.dataset_root;
  const Manifest m = load_manifest(root);
  if (!l.explicit_resolution) {
    rc.model.res_w = m.channel.res_w;
    rc.model.res_h = m.channel.res_h;
  }
  validate(rc);

  const std::vector<GeometryCase> all = load_cases(root, m);
  std::vector<GeometryCase> train;
  std::vector<GeometryCase> val;
  for (const auto& c : all) {
    if (c.split == "train") train.push_back(c);
    if (c.split == "val") val.push_back(c);
  }
  if (train.empty()) throw ValidationError("train: the dataset has no training cases");

  const fs::path dir = rc.output_root;
  fs::create_directories(dir);
  write_resolved_config(dir, rc);

  const Trainer trainer(rc.model, rc.train, rc.fluid, m.channel);
  TrainState state = trainer.initial_state();
  auto report = [&](const TrainState& s, int epoch) {
    const HistoryRow& r = s.history.back();
    if (!a.quiet) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "epoch %d/%d loss %.6e div %.3e mom %.3e", epoch, rc.train.epochs,
                    r.train_loss, r.mean_abs_div, r.mean_abs_mom);
      out << buf << "\n" << std::flush;
    }
    if (rc.train.checkpoint_every > 0 && epoch > 0 && epoch % rc.train.checkpoint_every == 0) {
      write_checkpoint(dir / epoch_dir(epoch), rc.model, s.params);
      io::write_text(dir / "history.csv", history_to_csv(s.history));
    }
  };
  try {
    trainer.run(state, train, val, report);
  } catch (const NumericalError&) {
    io::write_text(dir / "history.csv", history_to_csv(state.history));
    throw;
  }
  write_checkpoint(dir / "checkpoint", rc.model, state.params);
  io::write_text(dir / "history.csv", history_to_csv(state.history));
  out << "checkpoint written to " << (dir / "checkpoint").string() << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  Common common;
  std::string checkpoint;
  std::string geometry;
  std::string reference;
  std::string data;
  std::string id;
  std::string out;
};

int cmd_predict(PredictArgs& a, std::ostream& out) {
  Loaded l = load_run_config(a.common.config);
  const Checkpoint ck = read_checkpoint(a.checkpoint);
  l.rc.model = ck.config;
  l.rc.output_root = a.out;

  GeometryImage geom;
  std::optional<FieldSet> target;
  std::string stem;
  if (!a.geometry.empty()) {
    if (!a.data.empty() || !a.id.empty()) throw ValidationError("predict: use either --geometry or --data/--id");
    geom = io::read_geometry(a.geometry);
    if (!a.reference.empty()) target = io::read_fieldset(a.reference);
    stem = fs::path(a.geometry).stem().string();
  } else {
    if (a.data.empty() || a.id.empty()) throw ValidationError("predict: --geometry or both --data and --id required");
    const Manifest m = load_manifest(a.data);
    const GeometryCase c = load_case(a.data, m.find(a.id));
    geom = c.geom;
    target = c.reference;
    stem = a.id;
    l.rc.dataset_root = a.data;
  }
  if (geom.width() != ck.config.res_w || geom.height() != ck.config.res_h) {
    throw ValidationError("predict: geometry is " + std::to_string(geom.width()) + "x" +
                          std::to_string(geom.height()) + " but the model expects " +
                          std::to_string(ck.config.res_w) + "x" + std::to_string(ck.config.res_h));
  }
  if (target && (target->width() != geom.width() || target->height() != geom.height())) {
    throw ValidationError("predict: reference resolution differs from the geometry");
  }
  validate(l.rc);
  const FieldSet pred = forward(ck.config, ck.params, geom, l.rc.fluid);
  fs::create_directories(a.out);
  io::write_fieldset(fs::path(a.out) / ("pred_" + stem + ".nsf"), pred);
  render_fields(pred, target ? &*target : nullptr, a.out, "pred_" + stem);
  write_resolved_config(a.out, l.rc);
  out << "prediction written to " << (fs::path(a.out) / ("pred_" + stem + ".nsf")).string() << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  Common common;
  std::string checkpoint;
  std::string data;
  std::string out;
  bool no_timing = false;
  double threshold = 0.0;
  double bin_width = 0.0;
  CLI::Option *threshold_opt, *bin_opt;
};

int cmd_eval(EvalArgs& a, std::ostream& out, std::ostream& err) {
  Loaded l = load_run_config(a.common.config);
  RunConfig& rc = l.rc;
  const Checkpoint ck = read_checkpoint(a.checkpoint);
  rc.model = ck.config;
  rc.dataset_root = a.data;
  rc.output_root = a.out;
  if (a.threshold_opt->count()) rc.eval.vmax_threshold = a.threshold;
  if (a.bin_opt->count()) rc.eval.histogram_bin_width = a.bin_width;
  if (a.no_timing) rc.eval.record_timing = false;
  validate(rc);
  const Manifest m = load_manifest(a.data);
  const EvalReport report = evaluate_dataset(ck, a.data, m, rc.fluid, rc.eval);
  write_evaluation(a.out, report, rc.eval);
  write_resolved_config(a.out, rc);
  for (const auto& s : report.skipped) err << "warning: case " << s.id << " skipped: " << s.reason << "\n";
  for (const auto& g : summarize(report.rows, rc.eval.vmax_threshold)) {
    if (!g.filter.empty()) continue;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-5s n=%zu rel_l2_u=%.4f rel_l2_p=%.4f mean_abs_div=%.3e mean_abs_mom=%.3e",
                  g.split.c_str(), g.count, g.rel_l2_u, g.rel_l2_p, g.mean_abs_div, g.mean_abs_mom);
    out << buf << "\n";
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  Common common;
  std::vector<std::string> inputs;
  std::string out;
  double threshold = 0.0;
  CLI::Option* threshold_opt;
};

int cmd_report(ReportArgs& a, std::ostream& out) {
  Loaded l = load_run_config(a.common.config);
  if (a.threshold_opt->count()) l.rc.eval.vmax_threshold = a.threshold;
  l.rc.output_root = a.out;
  validate(l.rc);
  std::vector<std::pair<std::string, GroupSummary>> labelled;
  std::vector<CaseMetrics> pooled;
  for (const auto& in : a.inputs) {
    const fs::path file = fs::is_directory(in) ? fs::path(in) / "metrics.csv" : fs::path(in);
    const auto rows = metrics_from_csv(io::read_text(file));
    for (const auto& g : summarize(rows, l.rc.eval.vmax_threshold)) labelled.emplace_back(in, g);
    pooled.insert(pooled.end(), rows.begin(), rows.end());
  }
  fs::create_directories(a.out);
  io::write_text(fs::path(a.out) / "report.csv", summaries_to_csv(labelled));
  io::write_text(fs::path(a.out) / "scatter.csv", scatter_to_csv(pooled));
  io::write_text(fs::path(a.out) / "histogram.csv", histogram_to_csv(pooled, l.rc.eval.histogram_bin_width));
  write_resolved_config(a.out, l.rc);
  out << "aggregated " << a.inputs.size() << " metric files into " << (fs::path(a.out) / "report.csv").string()
      << "\n";
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physics-aware U-Net surrogates for steady channel flow", "nspf"};
  app.require_subcommand(1);
  app.fallthrough(false);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a dataset of random obstacle geometries");
  add_common(g, gen.common);
  g->add_option("--out", gen.out, "Dataset directory")->required();
  gen.n_opt = g->add_option("--n", gen.n, "Number of random cases");
  gen.edges_opt = g->add_option("--edges", gen.edges, "Polygon edge counts, cycled (e.g. 3,4,5,6,12)")->delimiter(',');
  gen.res_opt = g->add_option("--res", gen.res, "Resolution WIDTHxHEIGHT (e.g. 64x32)");
  gen.fractions_opt =
      g->add_option("--split-fractions", gen.fractions, "train,val[,test] fractions summing to 1")->delimiter(',');
  g->add_flag("--test-shapes", gen.test_shapes, "Add circle, oval and flower test cases");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Compute oracle reference solutions for a dataset");
  add_common(s, solve.common);
  s->add_option("--data", solve.data, "Dataset directory")->required();
  s->add_flag("--force", solve.force, "Recompute converged references too");
  s->add_flag("--no-timing", solve.no_timing, "Record zero wall times (byte-reproducible manifests)");
  solve.method_opt = s->add_option("--method", solve.method, "newton or pseudo_time");
  solve.tol_opt = s->add_option("--tol", solve.tol, "Residual infinity-norm tolerance");
  solve.iters_opt = s->add_option("--max-iters", solve.max_iters, "Newton iteration limit");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a U-Net on a dataset");
  add_common(t, train.common);
  t->add_option("--data", train.data, "Dataset directory (overrides dataset_root)");
  t->add_option("--out", train.out, "Output directory (overrides output_root)");
  train.epochs_opt = t->add_option("--epochs", train.epochs, "Number of epochs");
  train.lr_opt = t->add_option("--lr", train.lr, "Adam learning rate");
  train.levels_opt = t->add_option("--levels", train.levels, "U-Net depth");
  train.base_opt = t->add_option("--base-channels", train.base, "Channels of the first level");
  train.act_opt = t->add_option("--activation", train.activation, "relu or swish");
  train.scheme_opt =
      t->add_option("--loss-scheme", train.scheme, "physics, data, hybrid_exclusive or hybrid_additive");
  train.w_mom_opt = t->add_option("--w-mom", train.w_mom, "Momentum residual weight");
  train.w_div_opt = t->add_option("--w-div", train.w_div, "Divergence residual weight");
  train.w_data_opt = t->add_option("--w-data", train.w_data, "Data loss weight");
  train.w_pde_opt = t->add_option("--w-pde", train.w_pde, "Physics loss weight");
  train.validate_opt = t->add_option("--validate-every", train.validate_every, "Validation cadence in epochs");
  train.ckpt_opt = t->add_option("--checkpoint-every", train.checkpoint_every, "Checkpoint cadence (0: final only)");
  t->add_flag("--no-timing", train.no_timing, "Record zero wall times (byte-reproducible history)");
  t->add_flag("--quiet", train.quiet, "No per-epoch progress lines");

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "Predict fields for one geometry");
  add_common(p, predict.common);
  p->add_option("--checkpoint", predict.checkpoint, "Checkpoint directory")->required();
  p->add_option("--geometry", predict.geometry, "Geometry PGM image");
  p->add_option("--reference", predict.reference, "Optional reference NSF1 file for error images");
  p->add_option("--data", predict.data, "Dataset directory (with --id)");
  p->add_option("--id", predict.id, "Case id in the dataset");
  p->add_option("--out", predict.out, "Output directory")->required();

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint against the dataset references");
  add_common(e, eval.common);
  e->add_option("--checkpoint", eval.checkpoint, "Checkpoint directory")->required();
  e->add_option("--data", eval.data, "Dataset directory")->required();
  e->add_option("--out", eval.out, "Output directory")->required();
  e->add_flag("--no-timing", eval.no_timing, "Write eval_ms = 0 (byte-reproducible metrics)");
  eval.threshold_opt = e->add_option("--vmax-threshold", eval.threshold, "Stratification speed (m/s)");
  eval.bin_opt = e->add_option("--bin-width", eval.bin_width, "Histogram bin width (m/s)");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Aggregate metrics.csv files of several evaluations");
  add_common(r, report.common);
  r->add_option("inputs", report.inputs, "Evaluation directories or metrics.csv files")->required();
  r->add_option("--out", report.out, "Output directory")->required();
  report.threshold_opt = r->add_option("--vmax-threshold", report.threshold, "Stratification speed (m/s)");

  auto* st = app.add_subcommand("selftest", "Run the built-in property checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return exit_validation;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out);
    if (s->parsed()) return cmd_solve(solve, out);
    if (t->parsed()) return cmd_train(train, out);
    if (p->parsed()) return cmd_predict(predict, out);
    if (e->parsed()) return cmd_eval(eval, out, err);
    if (r->parsed()) return cmd_report(report, out);
    if (st->parsed()) return run_selftest(out) == 0 ? exit_ok : exit_runtime;
  } catch (const ValidationError& ex) {
    err << "validation error:\n";
    for (const auto& problem : ex.problems()) err << "  " << problem << "\n";
    return exit_validation;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return exit_runtime;
  }
  err << app.help();
  return exit_validation;
}

}  // namespace nspf::cli
