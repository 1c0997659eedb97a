#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "nspf/geometry.hpp"
#include "nspf/grid.hpp"
#include "nspf/solver.hpp"

namespace nspf {

struct CaseEntry {
  std::string id;
  std::uint64_t seed = 0;
  int n_edges = 0;  // 0 for parametric obstacles
  std::optional<ParametricObstacle> parametric;
  std::string split = "train";
  /// Role -> file name relative to the dataset root. Roles: geometry,
  /// boundary, polygon, reference.
  std::map<std::string, std::string> files;
  std::optional<SolveReport> solve_report;

  bool has_reference() const { return files.count("reference") && solve_report && solve_report->converged; }
};

struct Manifest {
  int version = 1;
  ChannelSpec channel;
  std::vector<CaseEntry> cases;

  /// Problems with ids, splits, and (when root is given) missing files.
  std::vector<std::string> violations(const std::filesystem::path* root = nullptr) const;
  const CaseEntry& find(const std::string& id) const;
};

bool valid_split(const std::string& s);

nlohmann::ordered_json parametric_to_json(const ParametricObstacle& p);
ParametricObstacle parametric_from_json(const nlohmann::ordered_json& j);

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);

/// Reads <root>/manifest.json and validates it, including file existence.
Manifest load_manifest(const std::filesystem::path& root);
void write_manifest(const std::filesystem::path& root, const Manifest& m);

}  // namespace nspf
