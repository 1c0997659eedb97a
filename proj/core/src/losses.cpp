#include "nspf/losses.hpp"

#include <cmath>

#include "nspf/error.hpp"

namespace nspf {

std::vector<std::string> LossWeights::violations() const {
  std::vector<std::string> v;
  auto check = [&](const char* name, double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) v.push_back(std::string(name) + ": must be finite and >= 0");
  };
  check("w_momentum", w_momentum);
  check("w_divergence", w_divergence);
  check("w_data", w_data);
  check("w_pde", w_pde);
  if (!(w_data + w_pde > 0.0)) v.push_back("w_data + w_pde: must be > 0");
  return v;
}

std::string to_string(LossScheme s) {
  switch (s) {
    case LossScheme::physics: return "physics";
    case LossScheme::data: return "data";
    case LossScheme::hybrid_exclusive: return "hybrid_exclusive";
    case LossScheme::hybrid_additive: return "hybrid_additive";
  }
  return "?";
}

LossScheme loss_scheme_from_string(const std::string& name) {
  if (name == "physics") return LossScheme::physics;
  if (name == "data") return LossScheme::data;
  if (name == "hybrid_exclusive") return LossScheme::hybrid_exclusive;
  if (name == "hybrid_additive") return LossScheme::hybrid_additive;
  throw ValidationError("unknown loss scheme '" + name +
                        "' (expected physics, data, hybrid_exclusive or hybrid_additive)");
}

LossWeights resolve_weights(LossScheme scheme, const LossWeights& base, bool has_reference) {
  LossWeights w = base;
  const double wd = base.w_data > 0.0 ? base.w_data : 1.0;
  switch (scheme) {
    case LossScheme::physics:
      w.w_data = 0.0;
      break;
    case LossScheme::data:
      if (!has_reference) throw ValidationError("data loss requested for a geometry without reference");
      w.w_pde = 0.0;
      w.w_data = wd;
      break;
    case LossScheme::hybrid_exclusive:
      w.w_pde = has_reference ? 0.0 : base.w_pde;
      w.w_data = has_reference ? wd : 0.0;
      break;
    case LossScheme::hybrid_additive:
      w.w_data = has_reference ? wd : 0.0;
      break;
  }
  return w;
}

double data_loss(const FieldSet& pred, const FieldSet& ref, const GeometryImage& geom) {
  if (!pred.u.same_shape(ref.u) || pred.width() != geom.width() || pred.height() != geom.height()) {
    throw ValidationError("data_loss: resolution mismatch");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < geom.size(); ++k) {
    if (!geom[k]) continue;
    ++n;
    for (int c = 0; c < 3; ++c) {
      const double d = pred.channel(c)[k] - ref.channel(c)[k];
      sum += d * d;
    }
  }
  return n ? sum / (3.0 * static_cast<double>(n)) : 0.0;
}

double physics_loss(const NsResidual& r, const NsScheme& s, const LossWeights& w) {
  double mom = 0.0;
  double div = 0.0;
  for (std::size_t k = 0; k < r.mx.size(); ++k) {
    mom += r.mx[k] * r.mx[k] + r.my[k] * r.my[k];
    div += r.d[k] * r.d[k];
  }
  double out = 0.0;
  if (s.momentum_rows()) out += w.w_momentum * mom / static_cast<double>(s.momentum_rows());
  if (s.divergence_rows()) out += w.w_divergence * div / static_cast<double>(s.divergence_rows());
  return out;
}

double physics_loss(const FieldSet& pred, const BoundaryImage& bnd, const FluidConstants& consts,
                    const LossWeights& w, double h, int order) {
  const NsScheme scheme(bnd, h, order);
  return physics_loss(ns_residual(pred, scheme, consts.nu), scheme, w);
}

double hybrid_loss(const FieldSet& pred, const FieldSet* ref, const BoundaryImage& bnd, const GeometryImage& geom,
                   const FluidConstants& consts, const LossWeights& w, double h, int order) {
  if (w.w_data > 0.0 && !ref) throw ValidationError("w_data > 0 but no reference fields for this geometry");
  double out = 0.0;
  if (w.w_pde != 0.0) out += w.w_pde * physics_loss(pred, bnd, consts, w, h, order);
  if (w.w_data != 0.0) out += w.w_data * data_loss(pred, *ref, geom);
  return out;
}

LossTerms loss_with_gradient(const FieldSet& pred, const FieldSet* ref, const GeometryImage& geom,
                             const NsOperators& ops, double nu, const LossWeights& w, FieldSet* grad) {
  if (w.w_data > 0.0 && !ref) throw ValidationError("w_data > 0 but no reference fields for this geometry");
  const NsScheme& s = ops.scheme();
  const int n = ops.size();
  LossTerms terms;
  if (grad) *grad = FieldSet(pred.width(), pred.height());

  if (w.w_pde != 0.0) {
    const auto u = as_vector(pred.u);
    const auto v = as_vector(pred.v);
    const auto p = as_vector(pred.p);
    const auto r = ops.residual(u, v, p, nu);
    const double nm = s.momentum_rows() ? static_cast<double>(s.momentum_rows()) : 1.0;
    const double nd = s.divergence_rows() ? static_cast<double>(s.divergence_rows()) : 1.0;
    const double mom = (r.mx.squaredNorm() + r.my.squaredNorm()) / nm;
    const double div = r.d.squaredNorm() / nd;
    terms.physics = w.w_momentum * mom + w.w_divergence * div;
    terms.total += w.w_pde * terms.physics;
    if (grad) {
      const double sm = 2.0 * w.w_pde * w.w_momentum / nm;
      const double sd = 2.0 * w.w_pde * w.w_divergence / nd;
      const Vector a = sm * r.mx;
      const Vector b = sm * r.my;
      const Vector c = sd * r.d;
      Vector gu, gv, gp;
      ops.adjoint(u, v, p, a, b, c, nu, gu, gv, gp);
      as_vector(grad->u) += gu;
      as_vector(grad->v) += gv;
      as_vector(grad->p) += gp;
    }
  }
  if (w.w_data != 0.0) {
    terms.data = data_loss(pred, *ref, geom);
    terms.total += w.w_data * terms.data;
    if (grad) {
      std::size_t nf = 0;
      for (std::size_t k = 0; k < geom.size(); ++k) nf += geom[k] ? 1 : 0;
      const double scale = nf ? 2.0 * w.w_data / (3.0 * static_cast<double>(nf)) : 0.0;
      for (std::size_t k = 0; k < geom.size(); ++k) {
        if (!geom[k]) continue;
        for (int ch = 0; ch < 3; ++ch) grad->channel(ch)[k] += scale * (pred.channel(ch)[k] - ref->channel(ch)[k]);
      }
    }
  }
  if (grad) {
    const auto& bnd = s.boundary();
    for (int k = 0; k < n; ++k) {
      for (int ch = 0; ch < 3; ++ch) {
        if (bc_overwritten(bnd[static_cast<std::size_t>(k)], ch)) grad->channel(ch)[static_cast<std::size_t>(k)] = 0.0;
      }
    }
  }
  return terms;
}

}  // namespace nspf
