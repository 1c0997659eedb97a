#pragma once

#include <string>

#include "nspf/fields.hpp"
#include "nspf/grid.hpp"
#include "nspf/residual.hpp"

namespace nspf {

/// ||pred - ref||_2 / ||ref||_2 over fluid pixels. Throws ValidationError if
/// the reference norm is zero.
double relative_l2(const Field& pred, const Field& ref, const GeometryImage& geom);

/// Relative l2 error of (u, v) stacked into one vector.
double velocity_rel_l2(const FieldSet& pred, const FieldSet& ref, const GeometryImage& geom);

struct ResidualNorms {
  double mean_abs_div = 0.0;
  double mean_abs_mom = 0.0;  // mean of (|Rmx| + |Rmy|) / 2
};

/// Means over interior pixels (codes 0 and >= 4).
ResidualNorms residual_norms(const NsResidual& r, const BoundaryImage& bnd);
ResidualNorms residual_norms(const FieldSet& fields, const BoundaryImage& bnd, const FluidConstants& consts,
                             double h, int order = 2);

struct VelocityDiag {
  double vmax = 0.0;
  bool cell_reynolds_exceeded = false;
};

/// Speed above which the cell Reynolds number |u| h / nu exceeds 2.
double cell_reynolds_threshold(const FluidConstants& consts, double h);

/// Maximum speed over fluid pixels and the cell-Reynolds flag.
VelocityDiag max_velocity_diag(const FieldSet& fields, const GeometryImage& geom, const FluidConstants& consts,
                               double h);

struct CaseMetrics {
  std::string id;
  std::string split;
  double rel_l2_u = 0.0;
  double rel_l2_p = 0.0;
  double mean_abs_div = 0.0;
  double mean_abs_mom = 0.0;
  double max_velocity = 0.0;
  bool cell_reynolds_exceeded = false;
  double eval_ms = 0.0;
};

}  // namespace nspf
