#include "nspf/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "nspf/error.hpp"
#include "nspf/io.hpp"
#include "nspf/parallel.hpp"
#include "nspf/random.hpp"

namespace nspf {

std::vector<std::string> GenOptions::violations() const {
  std::vector<std::string> v = channel.violations();
  if (n < 0) v.push_back("n: must be >= 0");
  if (edges.empty()) v.push_back("edges: empty list");
  for (int e : edges) {
    if (e < 3) v.push_back("edges: " + std::to_string(e) + " < 3");
  }
  if (split_fractions.size() < 2 || split_fractions.size() > 3) {
    v.push_back("split_fractions: expected 2 or 3 values");
  } else {
    double s = 0.0;
    for (double f : split_fractions) {
      if (!(f >= 0.0)) v.push_back("split_fractions: negative value");
      s += f;
    }
    if (std::fabs(s - 1.0) > 1e-9) v.push_back("split_fractions: sum is not 1");
  }
  if (!(polygon.min_radius > 0.0 && polygon.max_radius >= polygon.min_radius)) {
    v.push_back("radii: need 0 < min_radius <= max_radius");
  }
  if (polygon.max_attempts < 1) v.push_back("max_attempts: must be >= 1");
  return v;
}

std::string case_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return buf;
}

namespace {

constexpr std::uint64_t split_stream = 0x5350'4c49'54ULL;

void write_case_files(const std::filesystem::path& root, CaseEntry& e, const Polygon& poly,
                      const ChannelSpec& spec) {
  const GeometryImage geom = rasterize(poly, spec);
  const BoundaryImage bnd = encode_boundary(geom);
  e.files["geometry"] = "geom_" + e.id + ".pgm";
  e.files["boundary"] = "bnd_" + e.id + ".pgm";
  e.files["polygon"] = "poly_" + e.id + ".json";
  io::write_geometry(root / e.files["geometry"], geom);
  io::write_boundary(root / e.files["boundary"], bnd);
  io::write_polygon(root / e.files["polygon"], poly);
}

}  // namespace

Manifest generate_dataset(const GenOptions& opt, const std::filesystem::path& root) {
  if (auto v = opt.violations(); !v.empty()) throw ValidationError(v);
  std::filesystem::create_directories(root);
  const auto n = static_cast<std::size_t>(opt.n);

  // Seeded permutation decides the splits.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(opt.seed, split_stream));
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
  std::vector<std::string> split(n, "train");
  const auto n_train = static_cast<std::size_t>(std::llround(opt.split_fractions[0] * static_cast<double>(n)));
  const auto n_val = opt.split_fractions.size() == 3
                         ? static_cast<std::size_t>(std::llround(opt.split_fractions[1] * static_cast<double>(n)))
                         : n - std::min(n, n_train);
  for (std::size_t r = 0; r < n; ++r) {
    split[order[r]] = r < n_train ? "train" : (r < n_train + n_val ? "val" : "test");
  }

  Manifest m;
  m.channel = opt.channel;
  m.cases.resize(n + opt.parametric.size());
  std::vector<Polygon> polys(m.cases.size());
  parallel_for(n, [&](std::size_t k) {
    CaseEntry& e = m.cases[k];
    e.id = case_id(k);
    e.seed = mix_seed(opt.seed, k);
    e.n_edges = opt.edges[k % opt.edges.size()];
    e.split = split[k];
    polys[k] = generate_star_polygon(e.seed, e.n_edges, opt.channel, opt.polygon);
  });
  for (std::size_t q = 0; q < opt.parametric.size(); ++q) {
    CaseEntry& e = m.cases[n + q];
    e.id = case_id(n + q);
    e.seed = 0;
    e.parametric = opt.parametric[q];
    e.split = "test";
    polys[n + q] = generate_parametric_obstacle(opt.parametric[q], 256, opt.channel, opt.polygon.limits);
  }
  for (std::size_t k = 0; k < m.cases.size(); ++k) write_case_files(root, m.cases[k], polys[k], opt.channel);
  write_manifest(root, m);
  return m;
}

Manifest generate_reference_dataset(const std::filesystem::path& root, const FluidConstants& consts,
                                    const SolverConfig& config, bool force) {
  Manifest m = load_manifest(root);
  std::vector<std::size_t> todo;
  for (std::size_t k = 0; k < m.cases.size(); ++k) {
    const auto& c = m.cases[k];
    const bool done = c.has_reference() && std::filesystem::exists(root / c.files.at("reference"));
    if (force || !done) todo.push_back(k);
  }
  parallel_for(todo.size(), [&](std::size_t t) {
    CaseEntry& e = m.cases[todo[t]];
    const GeometryImage geom = io::read_geometry(root / e.files.at("geometry"));
    SolveResult res = solve_discrete_ns(geom, consts, m.channel, config);
    const std::string name = "ref_" + e.id + ".nsf";
    io::write_fieldset(root / name, res.fields);
    e.files["reference"] = name;
    e.solve_report = res.report;
  });
  write_manifest(root, m);
  return m;
}

GeometryCase load_case(const std::filesystem::path& root, const CaseEntry& e) {
  GeometryCase c;
  c.id = e.id;
  c.split = e.split;
  c.geom = io::read_geometry(root / e.files.at("geometry"));
  if (e.files.count("boundary")) {
    c.bnd = io::read_boundary(root / e.files.at("boundary"));
  } else {
    c.bnd = encode_boundary(c.geom);
  }
  if (e.has_reference()) c.reference = io::read_fieldset(root / e.files.at("reference"));
  return c;
}

std::vector<GeometryCase> load_cases(const std::filesystem::path& root, const Manifest& m) {
  std::vector<GeometryCase> out;
  out.reserve(m.cases.size());
  for (const auto& e : m.cases) out.push_back(load_case(root, e));
  return out;
}

GeometryCase make_case(const std::string& id, const Polygon& poly, const ChannelSpec& spec,
                       const std::string& split) {
  GeometryCase c;
  c.id = id;
  c.split = split;
  c.geom = rasterize(poly, spec);
  c.bnd = encode_boundary(c.geom);
  return c;
}

}  // namespace nspf
