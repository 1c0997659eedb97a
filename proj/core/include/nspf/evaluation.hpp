#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nspf/checkpoint.hpp"
#include "nspf/dataset.hpp"
#include "nspf/manifest.hpp"
#include "nspf/metrics.hpp"

namespace nspf {

struct EvalOptions {
  double vmax_threshold = 6.0;       // stratified report: cases with max_velocity above this
  double histogram_bin_width = 0.5;  // m/s
  int stencil_order = 2;
  bool record_timing = true;         // false writes eval_ms = 0

  std::vector<std::string> violations() const;
  bool operator==(const EvalOptions&) const = default;
};

struct SkippedCase {
  std::string id;
  std::string split;
  std::string reason;
};

struct EvalReport {
  std::vector<CaseMetrics> rows;  // manifest order
  std::vector<SkippedCase> skipped;
};

/// Metrics of one prediction against its reference. `eval_ms` is left to the caller.
CaseMetrics case_metrics(const FieldSet& pred, const GeometryCase& c, const FluidConstants& consts, double h,
                         int stencil_order);

/// Runs the model on every manifest case with a converged reference. Cases
/// without one are listed in `skipped`.
EvalReport evaluate_dataset(const Checkpoint& checkpoint, const std::filesystem::path& root,
                            const Manifest& manifest, const FluidConstants& consts, const EvalOptions& options);

/// Means over a group of rows.
struct GroupSummary {
  std::string split;   // "all", "train", "val" or "test"
  std::string filter;  // "" or "max_velocity>6"
  std::size_t count = 0;
  double rel_l2_u = 0.0;
  double rel_l2_p = 0.0;
  double mean_abs_div = 0.0;
  double mean_abs_mom = 0.0;
  double max_velocity = 0.0;
  double eval_ms = 0.0;
  std::size_t cell_re_flagged = 0;
};

/// Groups for "all" and every split present, each also restricted to
/// max_velocity > threshold. Empty groups are omitted.
std::vector<GroupSummary> summarize(const std::vector<CaseMetrics>& rows, double vmax_threshold);

std::string metrics_to_csv(const std::vector<CaseMetrics>& rows);
std::vector<CaseMetrics> metrics_from_csv(const std::string& text);
std::string summary_to_json(const std::vector<GroupSummary>& groups, const std::vector<SkippedCase>& skipped,
                            const EvalOptions& options);
std::string summaries_to_csv(const std::vector<std::pair<std::string, GroupSummary>>& labelled);
/// max_velocity against rel_l2_u, one line per case.
std::string scatter_to_csv(const std::vector<CaseMetrics>& rows);
/// Counts of max_velocity per bin [k w, (k+1) w) and split.
std::string histogram_to_csv(const std::vector<CaseMetrics>& rows, double bin_width);

/// Writes metrics.csv, summary.json, scatter.csv and histogram.csv into dir.
void write_evaluation(const std::filesystem::path& dir, const EvalReport& report, const EvalOptions& options);

}  // namespace nspf
