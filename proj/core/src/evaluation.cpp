#include "nspf/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "nspf/error.hpp"
#include "nspf/io.hpp"
#include "nspf/model.hpp"
#include "nspf/parallel.hpp"

namespace nspf {

std::vector<std::string> EvalOptions::violations() const {
  std::vector<std::string> v;
  if (!(vmax_threshold >= 0.0)) v.push_back("vmax_threshold: must be >= 0");
  if (!(histogram_bin_width > 0.0)) v.push_back("histogram_bin_width: must be > 0");
  if (stencil_order != 2 && stencil_order != 6) v.push_back("stencil_order: must be 2 or 6");
  return v;
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

const char* kMetricsHeader = "id,split,rel_l2_u,rel_l2_p,mean_abs_div,mean_abs_mom,max_velocity,cell_re_flag,eval_ms";

}  // namespace

CaseMetrics case_metrics(const FieldSet& pred, const GeometryCase& c, const FluidConstants& consts, double h,
                         int stencil_order) {
  if (!c.reference) throw ValidationError("case " + c.id + " has no reference solution");
  CaseMetrics m;
  m.id = c.id;
  m.split = c.split;
  m.rel_l2_u = velocity_rel_l2(pred, *c.reference, c.geom);
  m.rel_l2_p = relative_l2(pred.p, c.reference->p, c.geom);
  const ResidualNorms r = residual_norms(pred, c.bnd, consts, h, stencil_order);
  m.mean_abs_div = r.mean_abs_div;
  m.mean_abs_mom = r.mean_abs_mom;
  // The diagnostic describes the flow itself, so it is taken from the reference.
  const VelocityDiag d = max_velocity_diag(*c.reference, c.geom, consts, h);
  m.max_velocity = d.vmax;
  m.cell_reynolds_exceeded = d.cell_reynolds_exceeded;
  return m;
}

EvalReport evaluate_dataset(const Checkpoint& ck, const std::filesystem::path& root, const Manifest& manifest,
                            const FluidConstants& consts, const EvalOptions& options) {
  if (auto v = options.violations(); !v.empty()) throw ValidationError(v);
  if (ck.config.res_w != manifest.channel.res_w || ck.config.res_h != manifest.channel.res_h) {
    throw ValidationError("checkpoint resolution " + std::to_string(ck.config.res_w) + "x" +
                          std::to_string(ck.config.res_h) + " differs from the dataset resolution " +
                          std::to_string(manifest.channel.res_w) + "x" + std::to_string(manifest.channel.res_h));
  }
  EvalReport report;
  std::vector<const CaseEntry*> todo;
  for (const auto& e : manifest.cases) {
    if (e.has_reference()) {
      todo.push_back(&e);
    } else {
      report.skipped.push_back({e.id, e.split, e.solve_report ? "reference did not converge" : "no reference"});
    }
  }
  const UNet net(ck.config);
  const double h = manifest.channel.h();
  report.rows.resize(todo.size());
  parallel_for(todo.size(), [&](std::size_t k) {
    const GeometryCase c = load_case(root, *todo[k]);
    const auto start = std::chrono::steady_clock::now();
    FieldSet pred = net.forward(ck.params, c.geom);
    enforce_bcs_inplace(pred, c.bnd, consts);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.rows[k] = case_metrics(pred, c, consts, h, options.stencil_order);
    report.rows[k].eval_ms = options.record_timing ? ms : 0.0;
  });
  return report;
}

std::vector<GroupSummary> summarize(const std::vector<CaseMetrics>& rows, double vmax_threshold) {
  std::vector<GroupSummary> out;
  char filter[48];
  std::snprintf(filter, sizeof filter, "max_velocity>%g", vmax_threshold);
  for (const std::string split : {"all", "train", "val", "test"}) {
    for (const bool stratified : {false, true}) {
      GroupSummary g;
      g.split = split;
      g.filter = stratified ? filter : "";
      for (const auto& r : rows) {
        if (split != "all" && r.split != split) continue;
        if (stratified && !(r.max_velocity > vmax_threshold)) continue;
        ++g.count;
        g.rel_l2_u += r.rel_l2_u;
        g.rel_l2_p += r.rel_l2_p;
        g.mean_abs_div += r.mean_abs_div;
        g.mean_abs_mom += r.mean_abs_mom;
        g.max_velocity += r.max_velocity;
        g.eval_ms += r.eval_ms;
        g.cell_re_flagged += r.cell_reynolds_exceeded ? 1 : 0;
      }
      if (g.count == 0) continue;
      const double n = static_cast<double>(g.count);
      g.rel_l2_u /= n;
      g.rel_l2_p /= n;
      g.mean_abs_div /= n;
      g.mean_abs_mom /= n;
      g.max_velocity /= n;
      g.eval_ms /= n;
      out.push_back(g);
    }
  }
  return out;
}

std::string metrics_to_csv(const std::vector<CaseMetrics>& rows) {
  std::ostringstream out;
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.id << ',' << r.split << ',' << num(r.rel_l2_u) << ',' << num(r.rel_l2_p) << ',' << num(r.mean_abs_div)
        << ',' << num(r.mean_abs_mom) << ',' << num(r.max_velocity) << ',' << (r.cell_reynolds_exceeded ? 1 : 0)
        << ',' << num(r.eval_ms) << '\n';
  }
  return out.str();
}

std::vector<CaseMetrics> metrics_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw ValidationError("metrics CSV: expected header '" + std::string(kMetricsHeader) + "'");
  }
  std::vector<CaseMetrics> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 9) throw ValidationError("metrics CSV line " + std::to_string(lineno) + ": expected 9 cells");
    CaseMetrics m;
    try {
      m.id = cells[0];
      m.split = cells[1];
      m.rel_l2_u = std::stod(cells[2]);
      m.rel_l2_p = std::stod(cells[3]);
      m.mean_abs_div = std::stod(cells[4]);
      m.mean_abs_mom = std::stod(cells[5]);
      m.max_velocity = std::stod(cells[6]);
      m.cell_reynolds_exceeded = std::stoi(cells[7]) != 0;
      m.eval_ms = std::stod(cells[8]);
    } catch (const std::exception&) {
      throw ValidationError("metrics CSV line " + std::to_string(lineno) + ": malformed number");
    }
    rows.push_back(std::move(m));
  }
  return rows;
}

namespace {

nlohmann::ordered_json group_json(const GroupSummary& g) {
  nlohmann::ordered_json j;
  j["split"] = g.split;
  j["filter"] = g.filter;
  j["count"] = g.count;
  j["rel_l2_u"] = g.rel_l2_u;
  j["rel_l2_p"] = g.rel_l2_p;
  j["mean_abs_div"] = g.mean_abs_div;
  j["mean_abs_mom"] = g.mean_abs_mom;
  j["max_velocity"] = g.max_velocity;
  j["eval_ms"] = g.eval_ms;
  j["cell_re_flagged"] = g.cell_re_flagged;
  return j;
}

}  // namespace

std::string summary_to_json(const std::vector<GroupSummary>& groups, const std::vector<SkippedCase>& skipped,
                            const EvalOptions& options) {
  nlohmann::ordered_json j;
  j["vmax_threshold"] = options.vmax_threshold;
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : groups) j["groups"].push_back(group_json(g));
  j["skipped"] = nlohmann::ordered_json::array();
  for (const auto& s : skipped) j["skipped"].push_back({{"id", s.id}, {"split", s.split}, {"reason", s.reason}});
  return j.dump(2) + "\n";
}

std::string summaries_to_csv(const std::vector<std::pair<std::string, GroupSummary>>& labelled) {
  std::ostringstream out;
  out << "source,split,filter,count,rel_l2_u,rel_l2_p,mean_abs_div,mean_abs_mom,max_velocity,eval_ms,"
         "cell_re_flagged\n";
  for (const auto& [source, g] : labelled) {
    out << source << ',' << g.split << ',' << g.filter << ',' << g.count << ',' << num(g.rel_l2_u) << ','
        << num(g.rel_l2_p) << ',' << num(g.mean_abs_div) << ',' << num(g.mean_abs_mom) << ','
        << num(g.max_velocity) << ',' << num(g.eval_ms) << ',' << g.cell_re_flagged << '\n';
  }
  return out.str();
}

std::string scatter_to_csv(const std::vector<CaseMetrics>& rows) {
  std::ostringstream out;
  out << "id,split,max_velocity,rel_l2_u\n";
  for (const auto& r : rows) out << r.id << ',' << r.split << ',' << num(r.max_velocity) << ',' << num(r.rel_l2_u) << '\n';
  return out.str();
}

std::string histogram_to_csv(const std::vector<CaseMetrics>& rows, double bin_width) {
  if (!(bin_width > 0.0)) throw ValidationError("histogram bin width must be > 0");
  std::map<long, std::map<std::string, std::size_t>> bins;
  long top = 0;
  for (const auto& r : rows) {
    const long b = static_cast<long>(std::floor(r.max_velocity / bin_width));
    ++bins[b][r.split];
    top = std::max(top, b);
  }
  std::ostringstream out;
  out << "bin_lo,bin_hi,train,val,test\n";
  if (rows.empty()) return out.str();
  for (long b = 0; b <= top; ++b) {
    auto& row = bins[b];
    out << num(static_cast<double>(b) * bin_width) << ',' << num(static_cast<double>(b + 1) * bin_width) << ','
        << row["train"] << ',' << row["val"] << ',' << row["test"] << '\n';
  }
  return out.str();
}

void write_evaluation(const std::filesystem::path& dir, const EvalReport& report, const EvalOptions& options) {
  std::filesystem::create_directories(dir);
  io::write_text(dir / "metrics.csv", metrics_to_csv(report.rows));
  io::write_text(dir / "summary.json",
                 summary_to_json(summarize(report.rows, options.vmax_threshold), report.skipped, options));
  io::write_text(dir / "scatter.csv", scatter_to_csv(report.rows));
  io::write_text(dir / "histogram.csv", histogram_to_csv(report.rows, options.histogram_bin_width));
}

}  // namespace nspf
