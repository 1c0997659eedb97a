#include "nspf/config.hpp"

#include <set>

#include "nspf/error.hpp"
#include "nspf/io.hpp"

namespace nspf {

using ojson = nlohmann::ordered_json;

std::vector<std::string> RunConfig::violations() const {
  std::vector<std::string> v;
  for (auto& s : model.violations()) v.push_back("model." + s);
  for (auto& s : train.violations()) v.push_back("train." + s);
  for (auto& s : solver.violations()) v.push_back("solver." + s);
  for (auto& s : dataset.violations()) v.push_back("dataset." + s);
  for (auto& s : eval.violations()) v.push_back("eval." + s);
  if (!(fluid.nu > 0.0)) v.push_back("fluid.nu: must be > 0");
  if (train.stencil_order != solver.stencil_order) {
    v.push_back("train.stencil_order and solver.stencil_order differ (loss and oracle must share operators)");
  }
  if (eval.stencil_order != train.stencil_order) {
    v.push_back("eval.stencil_order and train.stencil_order differ");
  }
  return v;
}

ojson to_json(const ModelConfig& m) {
  ojson j;
  j["levels"] = m.levels;
  j["base_channels"] = m.base_channels;
  j["max_channels"] = m.max_channels;
  j["activation"] = to_string(m.activation);
  j["input_resolution"] = {m.res_w, m.res_h};
  j["seed"] = m.seed;
  return j;
}

ojson to_json(const TrainConfig& t) {
  ojson j;
  j["learning_rate"] = t.learning_rate;
  j["batch_size"] = t.batch_size;
  j["epochs"] = t.epochs;
  j["adam_beta1"] = t.adam_beta1;
  j["adam_beta2"] = t.adam_beta2;
  j["adam_eps"] = t.adam_eps;
  j["seed"] = t.seed;
  j["stencil_order"] = t.stencil_order;
  j["loss_scheme"] = to_string(t.loss_scheme);
  j["loss_weights"] = {{"w_momentum", t.loss_weights.w_momentum},
                       {"w_divergence", t.loss_weights.w_divergence},
                       {"w_data", t.loss_weights.w_data},
                       {"w_pde", t.loss_weights.w_pde}};
  j["checkpoint_every"] = t.checkpoint_every;
  j["validate_every"] = t.validate_every;
  j["record_timing"] = t.record_timing;
  return j;
}

ojson to_json(const FluidConstants& f) {
  ojson j;
  j["nu"] = f.nu;
  j["inflow_u"] = f.inflow_u;
  return j;
}

ojson to_json(const SolverConfig& s) {
  ojson j;
  j["method"] = to_string(s.method);
  j["tol"] = s.tol;
  j["max_iters"] = s.max_iters;
  j["damping"] = s.damping;
  j["pseudo_dt"] = s.pseudo_dt;
  j["pseudo_iters"] = s.pseudo_iters;
  j["divergence_growth"] = s.divergence_growth;
  j["continuation_start"] = s.continuation_start;
  j["continuation_ratio"] = s.continuation_ratio;
  j["max_continuation_stages"] = s.max_continuation_stages;
  j["stencil_order"] = s.stencil_order;
  j["record_timing"] = s.record_timing;
  return j;
}

ojson to_json(const GenOptions& g) {
  ojson j;
  j["n"] = g.n;
  j["edges"] = g.edges;
  j["seed"] = g.seed;
  j["resolution"] = {g.channel.res_w, g.channel.res_h};
  j["split_fractions"] = g.split_fractions;
  j["min_radius"] = g.polygon.min_radius;
  j["max_radius"] = g.polygon.max_radius;
  j["max_attempts"] = g.polygon.max_attempts;
  j["test_shapes"] = ojson::array();
  for (const auto& p : g.parametric) j["test_shapes"].push_back(parametric_to_json(p));
  return j;
}

ojson to_json(const EvalOptions& e) {
  ojson j;
  j["vmax_threshold"] = e.vmax_threshold;
  j["histogram_bin_width"] = e.histogram_bin_width;
  j["stencil_order"] = e.stencil_order;
  j["record_timing"] = e.record_timing;
  return j;
}

ojson to_json(const RunConfig& r) {
  ojson j;
  j["model"] = to_json(r.model);
  j["train"] = to_json(r.train);
  j["fluid"] = to_json(r.fluid);
  j["solver"] = to_json(r.solver);
  j["dataset"] = to_json(r.dataset);
  j["eval"] = to_json(r.eval);
  j["dataset_root"] = r.dataset_root;
  j["output_root"] = r.output_root;
  return j;
}

namespace {

// Reads keys of one JSON object, recording type errors and unknown keys.
class Reader {
 public:
  Reader(const ojson& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    const ojson* v = find(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const nlohmann::json::exception&) {
      errors_.push_back(where(key) + ": wrong type");
    }
  }

  template <typename E, typename F>
  void get_enum(const char* key, E& out, F parse) {
    std::string s;
    const std::size_t before = errors_.size();
    get(key, s);
    if (errors_.size() != before || !find(key)) return;
    try {
      out = parse(s);
    } catch (const ValidationError& e) {
      errors_.push_back(where(key) + ": " + e.what());
    }
  }

  const ojson* child(const char* key) { return find(key); }

  void finish(const std::set<std::string>& known) {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!known.count(k)) errors_.push_back(where(k.c_str()) + ": unknown key");
    }
  }

  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const ojson* find(const char* key) const {
    if (!j_.is_object()) return nullptr;
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const ojson& j_;
  std::string path_;
  std::vector<std::string>& errors_;
};

void read_model(const ojson& j, const std::string& path, ModelConfig& m, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.get("levels", m.levels);
  r.get("base_channels", m.base_channels);
  r.get("max_channels", m.max_channels);
  r.get_enum("activation", m.activation, activation_from_string);
  if (const ojson* res = r.child("input_resolution")) {
    if (res->is_array() && res->size() == 2 && (*res)[0].is_number_integer() && (*res)[1].is_number_integer()) {
      m.res_w = (*res)[0].get<int>();
      m.res_h = (*res)[1].get<int>();
    } else {
      errors.push_back(r.where("input_resolution") + ": expected [width, height]");
    }
  }
  r.get("seed", m.seed);
  r.finish({"levels", "base_channels", "max_channels", "activation", "input_resolution", "seed"});
}

void read_train(const ojson& j, const std::string& path, TrainConfig& t, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.get("learning_rate", t.learning_rate);
  r.get("batch_size", t.batch_size);
  r.get("epochs", t.epochs);
  r.get("adam_beta1", t.adam_beta1);
  r.get("adam_beta2", t.adam_beta2);
  r.get("adam_eps", t.adam_eps);
  r.get("seed", t.seed);
  r.get("stencil_order", t.stencil_order);
  r.get_enum("loss_scheme", t.loss_scheme, loss_scheme_from_string);
  if (const ojson* w = r.child("loss_weights")) {
    Reader rw(*w, r.where("loss_weights"), errors);
    rw.get("w_momentum", t.loss_weights.w_momentum);
    rw.get("w_divergence", t.loss_weights.w_divergence);
    rw.get("w_data", t.loss_weights.w_data);
    rw.get("w_pde", t.loss_weights.w_pde);
    rw.finish({"w_momentum", "w_divergence", "w_data", "w_pde"});
  }
  r.get("checkpoint_every", t.checkpoint_every);
  r.get("validate_every", t.validate_every);
  r.get("record_timing", t.record_timing);
  r.finish({"learning_rate", "batch_size", "epochs", "adam_beta1", "adam_beta2", "adam_eps", "seed",
            "stencil_order", "loss_scheme", "loss_weights", "checkpoint_every", "validate_every", "record_timing"});
}

void read_fluid(const ojson& j, const std::string& path, FluidConstants& f, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.get("nu", f.nu);
  r.get("inflow_u", f.inflow_u);
  r.finish({"nu", "inflow_u"});
}

void read_solver(const ojson& j, const std::string& path, SolverConfig& s, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.get_enum("method", s.method, solver_method_from_string);
  r.get("tol", s.tol);
  r.get("max_iters", s.max_iters);
  r.get("damping", s.damping);
  r.get("pseudo_dt", s.pseudo_dt);
  r.get("pseudo_iters", s.pseudo_iters);
  r.get("divergence_growth", s.divergence_growth);
  r.get("continuation_start", s.continuation_start);
  r.get("continuation_ratio", s.continuation_ratio);
  r.get("max_continuation_stages", s.max_continuation_stages);
  r.get("stencil_order", s.stencil_order);
  r.get("record_timing", s.record_timing);
  r.finish({"method", "tol", "max_iters", "damping", "pseudo_dt", "pseudo_iters", "divergence_growth",
            "continuation_start", "continuation_ratio", "max_continuation_stages", "stencil_order",
            "record_timing"});
}

void read_dataset(const ojson& j, const std::string& path, GenOptions& g, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.get("n", g.n);
  r.get("edges", g.edges);
  r.get("seed", g.seed);
  if (const ojson* res = r.child("resolution")) {
    if (res->is_array() && res->size() == 2 && (*res)[0].is_number_integer() && (*res)[1].is_number_integer()) {
      g.channel.res_w = (*res)[0].get<int>();
      g.channel.res_h = (*res)[1].get<int>();
    } else {
      errors.push_back(r.where("resolution") + ": expected [width, height]");
    }
  }
  r.get("split_fractions", g.split_fractions);
  r.get("min_radius", g.polygon.min_radius);
  r.get("max_radius", g.polygon.max_radius);
  r.get("max_attempts", g.polygon.max_attempts);
  if (const ojson* shapes = r.child("test_shapes")) {
    g.parametric.clear();
    if (!shapes->is_array()) {
      errors.push_back(r.where("test_shapes") + ": expected an array");
    } else {
      for (const auto& s : *shapes) {
        try {
          g.parametric.push_back(parametric_from_json(s));
        } catch (const std::exception& e) {
          errors.push_back(r.where("test_shapes") + ": " + e.what());
        }
      }
    }
  }
  r.finish({"n", "edges", "seed", "resolution", "split_fractions", "min_radius", "max_radius", "max_attempts",
            "test_shapes"});
}

void read_eval(const ojson& j, const std::string& path, EvalOptions& e, std::vector<std::string>& errors) {
  Reader r(j, path, errors);
  r.get("vmax_threshold", e.vmax_threshold);
  r.get("histogram_bin_width", e.histogram_bin_width);
  r.get("stencil_order", e.stencil_order);
  r.get("record_timing", e.record_timing);
  r.finish({"vmax_threshold", "histogram_bin_width", "stencil_order", "record_timing"});
}

}  // namespace

ModelConfig model_config_from_json(const ojson& j) {
  ModelConfig m;
  std::vector<std::string> errors;
  read_model(j, "", m, errors);
  for (auto& s : m.violations()) errors.push_back(s);
  if (!errors.empty()) throw ValidationError(errors);
  return m;
}

RunConfig run_config_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig rc;
  std::vector<std::string> errors;
  Reader r(j, "", errors);
  if (const ojson* m = r.child("model")) read_model(*m, "model", rc.model, errors);
  if (const ojson* t = r.child("train")) read_train(*t, "train", rc.train, errors);
  if (const ojson* f = r.child("fluid")) read_fluid(*f, "fluid", rc.fluid, errors);
  if (const ojson* s = r.child("solver")) read_solver(*s, "solver", rc.solver, errors);
  if (const ojson* d = r.child("dataset")) read_dataset(*d, "dataset", rc.dataset, errors);
  if (const ojson* e = r.child("eval")) read_eval(*e, "eval", rc.eval, errors);
  r.get("dataset_root", rc.dataset_root);
  r.get("output_root", rc.output_root);
  r.finish({"model", "train", "fluid", "solver", "dataset", "eval", "dataset_root", "output_root"});
  for (auto& s : rc.violations()) errors.push_back(s);
  if (!errors.empty()) throw ValidationError(errors);
  return rc;
}

std::string run_config_to_text(const RunConfig& r) { return to_json(r).dump(2) + "\n"; }

RunConfig load_config(const std::filesystem::path& path) { return run_config_from_json(io::read_text(path)); }

void write_resolved_config(const std::filesystem::path& dir, const RunConfig& r) {
  io::write_text(dir / "resolved_config.json", run_config_to_text(r));
}

}  // namespace nspf
