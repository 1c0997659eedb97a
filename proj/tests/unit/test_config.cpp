#include <gtest/gtest.h>

#include "helpers.hpp"
#include "nspf/config.hpp"
#include "nspf/error.hpp"
#include "nspf/io.hpp"
#include "nspf/manifest.hpp"

using namespace nspf;

namespace {

std::string error_text(const std::string& json) {
  try {
    run_config_from_json(json);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(RunConfig, EmptyObjectGivesDefaults) {
  const RunConfig rc = run_config_from_json("{}");
  EXPECT_EQ(rc, RunConfig{});
  EXPECT_EQ(rc.fluid.nu, 0.05);
  EXPECT_EQ(rc.fluid.inflow_u, 3.0);
  EXPECT_EQ(rc.train.learning_rate, 1e-4);
  EXPECT_EQ(rc.train.batch_size, 1);
  EXPECT_EQ(rc.model.levels, 8);
  EXPECT_EQ(rc.model.res_w, 256);
  EXPECT_EQ(rc.model.res_h, 128);
  EXPECT_EQ(rc.solver.tol, 1e-8);
}

TEST(RunConfig, TextRoundTripIsStable) {
  RunConfig rc;
  rc.model.levels = 3;
  rc.model.base_channels = 8;
  rc.model.res_w = 64;
  rc.model.res_h = 32;
  rc.model.activation = Activation::swish;
  rc.train.loss_scheme = LossScheme::hybrid_additive;
  rc.train.loss_weights.w_data = 0.25;
  rc.train.learning_rate = 3.3e-4;
  rc.solver.method = SolverMethod::pseudo_time;
  rc.dataset.edges = {3, 7};
  rc.dataset.channel.res_w = 64;
  rc.dataset.channel.res_h = 32;
  rc.dataset.split_fractions = {0.5, 0.25, 0.25};
  ParametricObstacle flower;
  flower.kind = ObstacleKind::flower;
  flower.center = {2.0, 1.5};
  rc.dataset.parametric.push_back(flower);
  rc.eval.vmax_threshold = 5.5;
  rc.dataset_root = "data";
  const std::string text = run_config_to_text(rc);
  const RunConfig back = run_config_from_json(text);
  EXPECT_EQ(back, rc);
  EXPECT_EQ(run_config_to_text(back), text);
}

TEST(RunConfig, BatchSizeOtherThanOneRejected) {
  const std::string msg = error_text(R"({"train": {"batch_size": 4}})");
  EXPECT_NE(msg.find("batch_size"), std::string::npos) << msg;
}

TEST(RunConfig, AllProblemsReportedTogether) {
  const std::string msg =
      error_text(R"({"model": {"levels": "eight", "colour": 1}, "fluid": {"nu": -1}, "extra": true,
                     "train": {"loss_scheme": "mixed", "loss_weights": {"w_mass": 1}}})");
  for (const char* part : {"model.levels: wrong type", "model.colour: unknown key", "fluid.nu", "extra: unknown key",
                           "train.loss_scheme", "train.loss_weights.w_mass: unknown key"}) {
    EXPECT_NE(msg.find(part), std::string::npos) << part << " missing from: " << msg;
  }
}

TEST(RunConfig, MalformedInputs) {
  EXPECT_NE(error_text("{not json").find("not valid JSON"), std::string::npos);
  EXPECT_NE(error_text("[]").find("expected an object"), std::string::npos);
  EXPECT_NE(error_text(R"({"model": {"input_resolution": [64]}})").find("expected [width, height]"),
            std::string::npos);
  EXPECT_NE(error_text(R"({"train": {"stencil_order": 6}})").find("differ"), std::string::npos);
}

TEST(RunConfig, ResolvedConfigFile) {
  const auto dir = test::temp_dir("resolved");
  RunConfig rc;
  rc.train.epochs = 7;
  write_resolved_config(dir, rc);
  EXPECT_EQ(load_config(dir / "resolved_config.json"), rc);
}

TEST(ModelConfigJson, RejectsInvalidArchitecture) {
  nlohmann::ordered_json j = to_json(ModelConfig{});
  EXPECT_EQ(model_config_from_json(j), ModelConfig{});
  j["input_resolution"] = {100, 50};
  EXPECT_THROW(model_config_from_json(j), ValidationError);
}

TEST(Manifest, RoundTripIsByteStable) {
  Manifest m;
  m.channel = ChannelSpec{6.0, 3.0, 64, 32};
  CaseEntry a;
  a.id = "0000";
  a.seed = 123456789012345ULL;
  a.n_edges = 5;
  a.files = {{"geometry", "geom_0000.pgm"}, {"boundary", "bnd_0000.pgm"}};
  SolveReport rep;
  rep.converged = true;
  rep.iterations = 7;
  rep.momentum_residual = 1.25e-10;
  a.solve_report = rep;
  CaseEntry b;
  b.id = "t0";
  b.split = "test";
  b.parametric = ParametricObstacle{};
  b.parametric->radius = 0.5;
  m.cases = {a, b};
  const std::string text = manifest_to_json(m);
  const Manifest back = manifest_from_json(text);
  EXPECT_EQ(manifest_to_json(back), text);
  EXPECT_EQ(back.cases[0].seed, a.seed);
  EXPECT_TRUE(back.cases[0].solve_report->converged);
  EXPECT_FALSE(back.cases[0].has_reference());
  EXPECT_EQ(back.find("t0").split, "test");
  EXPECT_THROW(back.find("nope"), ValidationError);
}

TEST(Manifest, Violations) {
  Manifest m;
  CaseEntry a;
  a.id = "x";
  m.cases = {a, a};
  m.cases[1].split = "holdout";
  const auto v = m.violations();
  EXPECT_EQ(v.size(), 2u);
  EXPECT_TRUE(valid_split("val"));
  EXPECT_FALSE(valid_split("holdout"));

  const auto dir = test::temp_dir("manifest");
  Manifest ok;
  CaseEntry c;
  c.id = "c";
  c.files = {{"geometry", "geom_c.pgm"}};
  ok.cases = {c};
  write_manifest(dir, ok);
  EXPECT_THROW(load_manifest(dir), ValidationError);
  io::write_geometry(dir / "geom_c.pgm", GeometryImage(4, 2, 1));
  EXPECT_EQ(manifest_to_json(load_manifest(dir)), manifest_to_json(ok));
  EXPECT_THROW(manifest_from_json("{\"cases\": 3}"), ValidationError);
}
