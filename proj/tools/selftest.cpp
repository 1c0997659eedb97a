#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "nspf/adam.hpp"
#include "nspf/geometry.hpp"
#include "nspf/losses.hpp"
#include "nspf/manifest.hpp"
#include "nspf/manufactured.hpp"
#include "nspf/metrics.hpp"
#include "nspf/operators.hpp"
#include "nspf/random.hpp"
#include "nspf/residual.hpp"
#include "nspf/stencil.hpp"
#include "nspf/training.hpp"

namespace nspf::cli {

namespace {

Field random_field(int w, int h, Rng& rng) {
  Field f(w, h);
  for (auto& x : f.values()) x = rng.uniform(-1.0, 1.0);
  return f;
}

FieldSet random_fields(int w, int h, Rng& rng) {
  FieldSet f(w, h);
  for (int c = 0; c < 3; ++c) f.channel(c) = random_field(w, h, rng);
  return f;
}

bool stencil_matches_matrix() {
  Rng rng(1);
  for (int n = 4; n <= 12; ++n) {
    const Stencil lap = make_stencil(Derivative::laplacian, 2, 1.0 / n);
    const SparseMatrix a = assemble_stencil(lap, n, n);
    const Field u = random_field(n, n, rng);
    const Field conv = cross_correlate(u, lap);
    const Vector prod = a * as_vector(u);
    const double scale = prod.lpNorm<Eigen::Infinity>();
    if ((as_vector(conv) - prod).lpNorm<Eigen::Infinity>() > 1e-12 * scale) return false;
  }
  return true;
}

bool poiseuille_residual_vanishes() {
  const ChannelSpec spec{6.0, 3.0, 32, 16};
  const FluidConstants consts;
  const FieldSet f = poiseuille_solution(spec, consts, consts.inflow_u);
  GeometryImage geom(spec.res_w, spec.res_h, 1);
  const BoundaryImage bnd = encode_boundary(geom);
  const NsResidual r = ns_residual(f, bnd, consts, spec.h(), 2);
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    if (code::momentum_row(bnd[k]) && (std::fabs(r.mx[k]) > 1e-10 || std::fabs(r.my[k]) > 1e-10)) return false;
    if (code::divergence_row(bnd[k]) && std::fabs(r.d[k]) > 1e-10) return false;
  }
  return true;
}

bool hard_bcs_exact() {
  const ChannelSpec spec{6.0, 3.0, 32, 16};
  const Polygon poly = generate_star_polygon(3, 5, spec);
  const GeometryImage geom = rasterize(poly, spec);
  const BoundaryImage bnd = encode_boundary(geom);
  Rng rng(2);
  const FluidConstants consts;
  const FieldSet f = enforce_bcs(random_fields(spec.res_w, spec.res_h, rng), bnd, consts);
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    if (bnd[k] == code::inflow && (f.u[k] != consts.inflow_u || f.v[k] != 0.0)) return false;
    if (bnd[k] == code::wall && (f.u[k] != 0.0 || f.v[k] != 0.0)) return false;
    if (bnd[k] == code::outflow && f.p[k] != 0.0) return false;
  }
  return true;
}

bool hybrid_loss_decomposes() {
  const ChannelSpec spec{6.0, 3.0, 16, 8};
  GeometryImage geom(spec.res_w, spec.res_h, 1);
  const BoundaryImage bnd = encode_boundary(geom);
  const FluidConstants consts;
  Rng rng(3);
  const FieldSet pred = random_fields(spec.res_w, spec.res_h, rng);
  const FieldSet ref = random_fields(spec.res_w, spec.res_h, rng);
  LossWeights w;
  w.w_data = 0.3;
  w.w_pde = 1.7;
  const double total = hybrid_loss(pred, &ref, bnd, geom, consts, w, spec.h());
  const double parts = 0.3 * data_loss(pred, ref, geom) + 1.7 * physics_loss(pred, bnd, consts, w, spec.h());
  return std::fabs(total - parts) <= 1e-14 * std::fabs(parts);
}

bool gradient_matches_finite_differences() {
  const ChannelSpec spec{1.0, 1.0, 8, 8};
  ModelConfig mc;
  mc.levels = 2;
  mc.base_channels = 2;
  mc.res_w = mc.res_h = 8;
  mc.activation = Activation::swish;
  mc.seed = 4;
  TrainConfig tc;
  const Trainer trainer(mc, tc, FluidConstants{}, spec);
  GeometryCase c;
  c.id = "selftest";
  c.geom = GeometryImage(8, 8, 1);
  c.geom(4, 4) = 0;
  c.bnd = encode_boundary(c.geom);
  const PreparedCase pc = trainer.prepare(c);
  ModelParams params = build_model(mc);
  ModelParams grads = zeros_like(params);
  trainer.loss_gradient(params, pc, &grads);
  Rng rng(5);
  const double step = 1e-5;
  for (int s = 0; s < 20; ++s) {
    Tensor& t = params.tensors[rng.below(params.tensors.size())];
    const std::size_t k = rng.below(t.data.size());
    const double x0 = t.data[k];
    t.data[k] = x0 + step;
    const double lp = trainer.loss_gradient(params, pc, nullptr).total;
    t.data[k] = x0 - step;
    const double lm = trainer.loss_gradient(params, pc, nullptr).total;
    t.data[k] = x0;
    const double fd = (lp - lm) / (2.0 * step);
    const double an = grads.at(t.name).data[k];
    if (std::fabs(fd - an) > 1e-4 * std::max({std::fabs(fd), std::fabs(an), 1e-6})) return false;
  }
  return true;
}

bool adam_solves_quadratic() {
  double x = 1.0;
  double m = 0.0;
  double v = 0.0;
  const AdamConfig cfg{0.1, 0.9, 0.999, 1e-8};
  for (int t = 1; t <= 200; ++t) {
    const double g = x;
    adam_update({&x, 1}, {&g, 1}, {&m, 1}, {&v, 1}, t, cfg);
    if (std::fabs(x) < 0.1) return true;
  }
  return false;
}

bool cell_reynolds_threshold_matches() {
  const FluidConstants consts;
  const ChannelSpec spec;  // 256 x 128
  return std::fabs(cell_reynolds_threshold(consts, spec.h()) - 2.0 * 0.05 / (6.0 / 256.0)) < 1e-15;
}

bool boundary_codes_consistent() {
  const ChannelSpec spec{6.0, 3.0, 64, 32};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GeometryImage geom = rasterize(generate_star_polygon(seed, 6, spec), spec);
    const BoundaryImage bnd = encode_boundary(geom);
    for (int j = 0; j < bnd.height(); ++j) {
      for (int i = 0; i < bnd.width(); ++i) {
        if (!geom.fluid(i, j) && bnd(i, j) != code::wall) return false;
        if (!code::is_one_sided(bnd(i, j))) continue;
        bool dirichlet_neighbor = false;
        for (auto [di, dj] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
          if (bnd.contains(i + di, j + dj) && code::velocity_dirichlet(bnd(i + di, j + dj))) dirichlet_neighbor = true;
        }
        if (!dirichlet_neighbor) return false;
      }
    }
  }
  return true;
}

bool manifest_round_trip_stable() {
  Manifest m;
  m.channel = ChannelSpec{6.0, 3.0, 64, 32};
  CaseEntry e;
  e.id = "0000";
  e.seed = 42;
  e.n_edges = 5;
  e.files["geometry"] = "geom_0000.pgm";
  m.cases.push_back(e);
  const std::string a = manifest_to_json(m);
  return manifest_to_json(manifest_from_json(a)) == a;
}

}  // namespace

int run_selftest(std::ostream& out) {
  const std::pair<const char*, std::function<bool()>> checks[] = {
      {"stencil cross-correlation equals assembled matrix", stencil_matches_matrix},
      {"poiseuille discrete residual vanishes", poiseuille_residual_vanishes},
      {"hard boundary conditions are exact", hard_bcs_exact},
      {"hybrid loss decomposes into data and physics terms", hybrid_loss_decomposes},
      {"model gradient matches central differences", gradient_matches_finite_differences},
      {"adam minimizes a 1-D quadratic", adam_solves_quadratic},
      {"cell reynolds threshold is 2 nu / h", cell_reynolds_threshold_matches},
      {"one-sided codes only next to dirichlet pixels", boundary_codes_consistent},
      {"manifest round trip is byte stable", manifest_round_trip_stable},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      out << "  exception: " << e.what() << "\n";
    }
    out << (ok ? "PASS " : "FAIL ") << name << "\n";
    failures += ok ? 0 : 1;
  }
  return failures;
}

}  // namespace nspf::cli
