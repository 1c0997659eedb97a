#include "nspf/residual.hpp"

#include <map>
#include <utility>

#include "nspf/error.hpp"

namespace nspf {

int NsScheme::add(Stencil s) {
  bank_.push_back(std::move(s));
  return static_cast<int>(bank_.size()) - 1;
}

NsScheme::NsScheme(const BoundaryImage& bnd, double h, int order) : bnd_(bnd), h_(h), order_(order) {
  if (order != 2 && order != 6) throw ValidationError("unsupported stencil order " + std::to_string(order));
  if (!(h > 0.0)) throw ValidationError("grid spacing must be positive");
  const int w = bnd.width();
  const int ht = bnd.height();

  const int c_dx = add(make_stencil(Derivative::dx, 2, h));
  const int c_dy = add(make_stencil(Derivative::dy, 2, h));
  const int c_dxx = add(make_stencil(Derivative::dxx, 2, h));
  const int c_dyy = add(make_stencil(Derivative::dyy, 2, h));
  int s_dx = -1, s_dy = -1, s_dxx = -1, s_dyy = -1;
  if (order == 6) {
    s_dx = add(make_stencil(Derivative::dx, 6, h));
    s_dy = add(make_stencil(Derivative::dy, 6, h));
    s_dxx = add(make_stencil(Derivative::dxx, 6, h));
    s_dyy = add(make_stencil(Derivative::dyy, 6, h));
  }
  const int out_dx = add(make_one_sided_stencil(Derivative::dx, StencilSide::backward, h, 2));
  const int out_dxx = add(make_one_sided_stencil(Derivative::dxx, StencilSide::backward, h));
  // One-sided pressure gradients: [axis][side][accuracy - 1]
  int one_sided[2][2][2];
  for (int axis = 0; axis < 2; ++axis) {
    const Derivative d = axis == 0 ? Derivative::dx : Derivative::dy;
    for (int side = 0; side < 2; ++side) {
      const StencilSide s = side == 0 ? StencilSide::forward : StencilSide::backward;
      for (int acc = 1; acc <= 2; ++acc) one_sided[axis][side][acc - 1] = add(make_one_sided_stencil(d, s, h, acc));
    }
  }

  auto has_pressure = [&](int i, int j) { return bnd.contains(i, j) && code::pressure_defined(bnd(i, j)); };
  auto wide_ok = [&](int i, int j) {
    if (!bnd.contains(i, j)) return false;
    const auto c = bnd(i, j);
    return c == code::interior || c == code::outflow || code::is_one_sided(c);
  };
  auto eligible6 = [&](int i, int j) {
    if (order != 6) return false;
    for (int k = 1; k <= 3; ++k) {
      if (!wide_ok(i - k, j) || !wide_ok(i + k, j) || !wide_ok(i, j - k) || !wide_ok(i, j + k)) return false;
    }
    return true;
  };
  auto gradient = [&](int axis, int i, int j) {
    const int di = axis == 0 ? 1 : 0;
    const int dj = axis == 0 ? 0 : 1;
    const bool minus = has_pressure(i - di, j - dj);
    const bool plus = has_pressure(i + di, j + dj);
    if (minus && plus) return axis == 0 ? c_dx : c_dy;
    if (plus) return one_sided[axis][0][has_pressure(i + 2 * di, j + 2 * dj) ? 1 : 0];
    if (minus) return one_sided[axis][1][has_pressure(i - 2 * di, j - 2 * dj) ? 1 : 0];
    return -1;
  };

  ids_.assign(static_cast<std::size_t>(w) * ht, {-1, -1, -1, -1, -1, -1});
  for (int j = 0; j < ht; ++j) {
    for (int i = 0; i < w; ++i) {
      const auto c = bnd(i, j);
      if (code::momentum_row(c)) ++n_mom_;
      if (code::divergence_row(c)) ++n_div_;
      if (!code::momentum_row(c) && !code::divergence_row(c)) continue;
      auto& id = ids_[static_cast<std::size_t>(j * w + i)];
      auto set = [&](DiffOp op, int v) { id[static_cast<std::size_t>(op)] = static_cast<std::int16_t>(v); };
      if (c == code::outflow) {
        set(DiffOp::dx, out_dx);
        set(DiffOp::dxx, out_dxx);
        set(DiffOp::dy, c_dy);
        set(DiffOp::dyy, c_dyy);
        set(DiffOp::gx, gradient(0, i, j));
        set(DiffOp::gy, gradient(1, i, j));
      } else if (eligible6(i, j)) {
        set(DiffOp::dx, s_dx);
        set(DiffOp::dy, s_dy);
        set(DiffOp::dxx, s_dxx);
        set(DiffOp::dyy, s_dyy);
        set(DiffOp::gx, s_dx);
        set(DiffOp::gy, s_dy);
      } else {
        set(DiffOp::dx, c_dx);
        set(DiffOp::dy, c_dy);
        set(DiffOp::dxx, c_dxx);
        set(DiffOp::dyy, c_dyy);
        set(DiffOp::gx, gradient(0, i, j));
        set(DiffOp::gy, gradient(1, i, j));
      }
    }
  }
}

bool bc_overwritten(std::uint8_t c, int channel) {
  if (code::velocity_dirichlet(c)) return true;
  return channel == 2 && c == code::outflow;
}

namespace {

void require_same_shape(const FieldSet& f, const BoundaryImage& bnd) {
  if (f.u.width() != bnd.width() || f.u.height() != bnd.height() || !f.u.same_shape(f.v) ||
      !f.u.same_shape(f.p)) {
    throw ValidationError("field and boundary image resolutions differ");
  }
}

}  // namespace

void enforce_bcs_inplace(FieldSet& f, const BoundaryImage& bnd, const FluidConstants& consts) {
  require_same_shape(f, bnd);
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    switch (bnd[k]) {
      case code::inflow:
        f.u[k] = consts.inflow_u;
        f.v[k] = 0.0;
        f.p[k] = 0.0;
        break;
      case code::wall:
        f.u[k] = 0.0;
        f.v[k] = 0.0;
        f.p[k] = 0.0;
        break;
      case code::outflow:
        f.p[k] = 0.0;
        break;
      default:
        break;
    }
  }
}

FieldSet enforce_bcs(const FieldSet& fields, const BoundaryImage& bnd, const FluidConstants& consts) {
  FieldSet out = fields;
  enforce_bcs_inplace(out, bnd, consts);
  return out;
}

void enforce_bcs_inplace(FieldSet& f, const BoundaryImage& bnd, const FieldSet& values) {
  require_same_shape(f, bnd);
  require_same_shape(values, bnd);
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    for (int ch = 0; ch < 3; ++ch) {
      if (bc_overwritten(bnd[k], ch)) f.channel(ch)[k] = values.channel(ch)[k];
    }
  }
}

FieldSet enforce_bcs(const FieldSet& fields, const BoundaryImage& bnd, const FieldSet& values) {
  FieldSet out = fields;
  enforce_bcs_inplace(out, bnd, values);
  return out;
}

NsResidual ns_residual(const FieldSet& f, const NsScheme& scheme, double nu) {
  require_same_shape(f, scheme.boundary());
  require_finite(f);
  const int w = scheme.width();
  const int ht = scheme.height();

  // Derivative images, computed once per (channel, stencil) pair actually used.
  std::map<std::pair<int, int>, Field> cache;
  auto deriv = [&](int ch, int id) -> const Field& {
    auto key = std::make_pair(ch, id);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, cross_correlate(f.channel(ch), scheme.bank()[static_cast<std::size_t>(id)])).first;
    }
    return it->second;
  };
  auto at = [&](int ch, DiffOp op, int i, int j) {
    const int id = scheme.stencil_id(op, i, j);
    return id < 0 ? 0.0 : deriv(ch, id)(i, j);
  };

  NsResidual r{Field(w, ht), Field(w, ht), Field(w, ht)};
  for (int j = 0; j < ht; ++j) {
    for (int i = 0; i < w; ++i) {
      const double u = f.u(i, j);
      const double v = f.v(i, j);
      if (scheme.momentum_row(i, j)) {
        r.mx(i, j) = u * at(0, DiffOp::dx, i, j) + v * at(0, DiffOp::dy, i, j) + at(2, DiffOp::gx, i, j) -
                     nu * (at(0, DiffOp::dxx, i, j) + at(0, DiffOp::dyy, i, j));
        r.my(i, j) = u * at(1, DiffOp::dx, i, j) + v * at(1, DiffOp::dy, i, j) + at(2, DiffOp::gy, i, j) -
                     nu * (at(1, DiffOp::dxx, i, j) + at(1, DiffOp::dyy, i, j));
      }
      if (scheme.divergence_row(i, j)) r.d(i, j) = at(0, DiffOp::dx, i, j) + at(1, DiffOp::dy, i, j);
    }
  }
  return r;
}

NsResidual ns_residual(const FieldSet& fields, const BoundaryImage& bnd, const FluidConstants& consts, double h,
                       int order) {
  return ns_residual(fields, NsScheme(bnd, h, order), consts.nu);
}

Field diffusion_residual(const Field& u, const Field& rhs, double h, int order) {
  if (!u.same_shape(rhs)) throw ValidationError("field and right-hand side resolutions differ");
  const Stencil lap = make_stencil(Derivative::laplacian, order, h);
  const Field lu = cross_correlate(u, lap);
  const int r = lap.radius();
  Field out(u.width(), u.height());
  for (int j = r; j < u.height() - r; ++j) {
    for (int i = r; i < u.width() - r; ++i) out(i, j) = lu(i, j) - rhs(i, j);
  }
  return out;
}

}  // namespace nspf
