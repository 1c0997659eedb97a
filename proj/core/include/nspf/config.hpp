#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "nspf/dataset.hpp"
#include "nspf/evaluation.hpp"
#include "nspf/fields.hpp"
#include "nspf/model.hpp"
#include "nspf/solver.hpp"
#include "nspf/training.hpp"

namespace nspf {

/// Everything needed to reproduce a run.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  FluidConstants fluid;
  SolverConfig solver;
  GenOptions dataset;
  EvalOptions eval;
  std::string dataset_root;
  std::string output_root;

  std::vector<std::string> violations() const;
  bool operator==(const RunConfig&) const = default;
};

nlohmann::ordered_json to_json(const ModelConfig& m);
nlohmann::ordered_json to_json(const TrainConfig& t);
nlohmann::ordered_json to_json(const FluidConstants& f);
nlohmann::ordered_json to_json(const SolverConfig& s);
nlohmann::ordered_json to_json(const GenOptions& g);
nlohmann::ordered_json to_json(const EvalOptions& e);
nlohmann::ordered_json to_json(const RunConfig& r);

/// Parse helpers; every problem (unknown key, wrong type, invalid value) is
/// collected and reported in one ValidationError.
ModelConfig model_config_from_json(const nlohmann::ordered_json& j);
RunConfig run_config_from_json(const std::string& text);

std::string run_config_to_text(const RunConfig& r);

/// Reads and validates a run configuration, filling defaults.
RunConfig load_config(const std::filesystem::path& path);
/// Writes <dir>/resolved_config.json.
void write_resolved_config(const std::filesystem::path& dir, const RunConfig& r);

}  // namespace nspf
