#include "nspf/metrics.hpp"

#include <cmath>

#include "nspf/error.hpp"

namespace nspf {

namespace {

void require_match(const Field& a, const Field& b, const GeometryImage& g) {
  if (!a.same_shape(b) || a.width() != g.width() || a.height() != g.height()) {
    throw ValidationError("metric operands differ in resolution");
  }
}

}  // namespace

double relative_l2(const Field& pred, const Field& ref, const GeometryImage& geom) {
  require_match(pred, ref, geom);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < geom.size(); ++k) {
    if (!geom[k]) continue;
    const double d = pred[k] - ref[k];
    num += d * d;
    den += ref[k] * ref[k];
  }
  if (!(den > 0.0)) throw ValidationError("relative_l2: reference has zero norm over the fluid pixels");
  return std::sqrt(num / den);
}

double velocity_rel_l2(const FieldSet& pred, const FieldSet& ref, const GeometryImage& geom) {
  require_match(pred.u, ref.u, geom);
  require_match(pred.v, ref.v, geom);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < geom.size(); ++k) {
    if (!geom[k]) continue;
    const double du = pred.u[k] - ref.u[k];
    const double dv = pred.v[k] - ref.v[k];
    num += du * du + dv * dv;
    den += ref.u[k] * ref.u[k] + ref.v[k] * ref.v[k];
  }
  if (!(den > 0.0)) throw ValidationError("velocity_rel_l2: reference has zero norm over the fluid pixels");
  return std::sqrt(num / den);
}

ResidualNorms residual_norms(const NsResidual& r, const BoundaryImage& bnd) {
  ResidualNorms out;
  std::size_t n = 0;
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    const auto c = bnd[k];
    if (c != code::interior && !code::is_one_sided(c)) continue;
    ++n;
    out.mean_abs_div += std::fabs(r.d[k]);
    out.mean_abs_mom += 0.5 * (std::fabs(r.mx[k]) + std::fabs(r.my[k]));
  }
  if (n) {
    out.mean_abs_div /= static_cast<double>(n);
    out.mean_abs_mom /= static_cast<double>(n);
  }
  return out;
}

ResidualNorms residual_norms(const FieldSet& fields, const BoundaryImage& bnd, const FluidConstants& consts,
                             double h, int order) {
  return residual_norms(ns_residual(fields, bnd, consts, h, order), bnd);
}

double cell_reynolds_threshold(const FluidConstants& consts, double h) { return 2.0 * consts.nu / h; }

VelocityDiag max_velocity_diag(const FieldSet& fields, const GeometryImage& geom, const FluidConstants& consts,
                               double h) {
  require_match(fields.u, fields.v, geom);
  VelocityDiag d;
  for (std::size_t k = 0; k < geom.size(); ++k) {
    if (!geom[k]) continue;
    d.vmax = std::max(d.vmax, std::hypot(fields.u[k], fields.v[k]));
  }
  d.cell_reynolds_exceeded = d.vmax * h / consts.nu > 2.0;
  return d;
}

}  // namespace nspf
