#include "nspf/manifest.hpp"

#include <nlohmann/json.hpp>
#include <set>

#include "nspf/error.hpp"
#include "nspf/io.hpp"

namespace nspf {

using ojson = nlohmann::ordered_json;

bool valid_split(const std::string& s) { return s == "train" || s == "val" || s == "test"; }

std::vector<std::string> Manifest::violations(const std::filesystem::path* root) const {
  std::vector<std::string> v = channel.violations();
  std::set<std::string> ids;
  for (const auto& c : cases) {
    if (c.id.empty()) v.push_back("case with empty id");
    if (!ids.insert(c.id).second) v.push_back("duplicate case id " + c.id);
    if (!valid_split(c.split)) v.push_back("case " + c.id + ": invalid split '" + c.split + "'");
    if (root) {
      for (const auto& [role, name] : c.files) {
        if (!std::filesystem::exists(*root / name)) v.push_back("case " + c.id + ": missing " + role + " file " + name);
      }
    }
  }
  return v;
}

const CaseEntry& Manifest::find(const std::string& id) const {
  for (const auto& c : cases) {
    if (c.id == id) return c;
  }
  throw ValidationError("no case with id " + id);
}

namespace {

ojson report_to_json(const SolveReport& r) {
  ojson j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["momentum_residual"] = r.momentum_residual;
  j["divergence_residual"] = r.divergence_residual;
  j["wall_seconds"] = r.wall_seconds;
  j["used_fallback"] = r.used_fallback;
  return j;
}

SolveReport report_from_json(const ojson& j) {
  SolveReport r;
  r.converged = j.at("converged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.momentum_residual = j.at("momentum_residual").get<double>();
  r.divergence_residual = j.at("divergence_residual").get<double>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.used_fallback = j.value("used_fallback", false);
  return r;
}

}  // namespace

ojson parametric_to_json(const ParametricObstacle& p) {
  ojson j;
  j["kind"] = to_string(p.kind);
  j["center"] = {p.center.x, p.center.y};
  j["radius"] = p.radius;
  j["radius_x"] = p.radius_x;
  j["radius_y"] = p.radius_y;
  j["amplitude"] = p.amplitude;
  j["lobes"] = p.lobes;
  return j;
}

ParametricObstacle parametric_from_json(const ojson& j) {
  ParametricObstacle p;
  p.kind = obstacle_kind_from_string(j.at("kind").get<std::string>());
  p.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
  p.radius = j.value("radius", p.radius);
  p.radius_x = j.value("radius_x", p.radius_x);
  p.radius_y = j.value("radius_y", p.radius_y);
  p.amplitude = j.value("amplitude", p.amplitude);
  p.lobes = j.value("lobes", p.lobes);
  return p;
}

std::string manifest_to_json(const Manifest& m) {
  ojson j;
  j["version"] = m.version;
  j["channel"] = {{"width_m", m.channel.width_m},
                  {"height_m", m.channel.height_m},
                  {"res_w", m.channel.res_w},
                  {"res_h", m.channel.res_h}};
  auto cases = ojson::array();
  for (const auto& c : m.cases) {
    ojson e;
    e["id"] = c.id;
    e["seed"] = c.seed;
    if (c.parametric) {
      e["parametric"] = parametric_to_json(*c.parametric);
    } else {
      e["n_edges"] = c.n_edges;
    }
    e["split"] = c.split;
    ojson files = ojson::object();
    for (const auto& [role, name] : c.files) files[role] = name;
    e["files"] = std::move(files);
    if (c.solve_report) e["solve_report"] = report_to_json(*c.solve_report);
    cases.push_back(std::move(e));
  }
  j["cases"] = std::move(cases);
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
  try {
    const auto j = ojson::parse(text);
    Manifest m;
    m.version = j.at("version").get<int>();
    const auto& ch = j.at("channel");
    m.channel.width_m = ch.at("width_m").get<double>();
    m.channel.height_m = ch.at("height_m").get<double>();
    m.channel.res_w = ch.at("res_w").get<int>();
    m.channel.res_h = ch.at("res_h").get<int>();
    for (const auto& e : j.at("cases")) {
      CaseEntry c;
      c.id = e.at("id").get<std::string>();
      c.seed = e.at("seed").get<std::uint64_t>();
      if (e.contains("parametric")) {
        c.parametric = parametric_from_json(e.at("parametric"));
      } else {
        c.n_edges = e.at("n_edges").get<int>();
      }
      c.split = e.at("split").get<std::string>();
      for (const auto& [role, name] : e.at("files").items()) c.files[role] = name.get<std::string>();
      if (e.contains("solve_report")) c.solve_report = report_from_json(e.at("solve_report"));
      m.cases.push_back(std::move(c));
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed manifest: ") + ex.what());
  }
}

Manifest load_manifest(const std::filesystem::path& root) {
  Manifest m = manifest_from_json(io::read_text(root / "manifest.json"));
  if (auto v = m.violations(&root); !v.empty()) throw ValidationError(v);
  return m;
}

void write_manifest(const std::filesystem::path& root, const Manifest& m) {
  io::write_text(root / "manifest.json", manifest_to_json(m));
}

}  // namespace nspf
