#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nspf/fields.hpp"
#include "nspf/geometry.hpp"
#include "nspf/manifest.hpp"
#include "nspf/solver.hpp"

namespace nspf {

struct GenOptions {
  int n = 10;
  std::vector<int> edges{3, 4, 5, 6, 12};
  std::uint64_t seed = 0;
  ChannelSpec channel{6.0, 3.0, 64, 32};
  /// train, val[, test] fractions; they must sum to 1.
  std::vector<double> split_fractions{0.75, 0.25};
  /// Extra held-out test cases.
  std::vector<ParametricObstacle> parametric;
  StarPolygonOptions polygon;

  std::vector<std::string> violations() const;
  bool operator==(const GenOptions&) const = default;
};

/// Writes geom_<id>.pgm, bnd_<id>.pgm, poly_<id>.json and manifest.json under
/// root. Case k uses seed mix_seed(seed, k) and edges[k % edges.size()];
/// splits come from a seeded permutation.
Manifest generate_dataset(const GenOptions& options, const std::filesystem::path& root);

/// Case ids are zero-padded to 4 digits.
std::string case_id(std::size_t index);

/// Solves every case lacking a converged reference, writes ref_<id>.nsf and
/// the SolveReport into the manifest.
Manifest generate_reference_dataset(const std::filesystem::path& root, const FluidConstants& consts,
                                    const SolverConfig& config, bool force = false);

struct GeometryCase {
  std::string id;
  std::string split;
  GeometryImage geom;
  BoundaryImage bnd;
  std::optional<FieldSet> reference;  // only converged references
};

GeometryCase load_case(const std::filesystem::path& root, const CaseEntry& entry);
std::vector<GeometryCase> load_cases(const std::filesystem::path& root, const Manifest& m);

/// Case assembled in memory from a polygon (no files).
GeometryCase make_case(const std::string& id, const Polygon& poly, const ChannelSpec& spec,
                       const std::string& split = "train");

}  // namespace nspf
