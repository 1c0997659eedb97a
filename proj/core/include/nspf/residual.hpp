#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nspf/fields.hpp"
#include "nspf/grid.hpp"
#include "nspf/stencil.hpp"

namespace nspf {

/// Derivatives appearing in the Navier-Stokes residual. dx..dyy act on the
/// velocity, gx/gy are the pressure gradient.
enum class DiffOp : std::uint8_t { dx = 0, dy, dxx, dyy, gx, gy };
inline constexpr int diff_op_count = 6;

/// Per-pixel choice of stencil for every derivative, derived from the boundary
/// image. Both residual routes (cross-correlation and assembled sparse
/// operators) read their stencils from here.
///
/// Rules:
///  - codes 0 and >= 4 use central stencils; order 6 only where the 7-point
///    cross footprint stays inside the image on codes {0, 3, >= 4};
///  - outflow pixels use backward x-differences for the velocity;
///  - the pressure gradient never reads a pixel without pressure (codes 1, 2,
///    outside the image); it falls back to one-sided second- then first-order
///    differences, and to zero when no side has pressure.
class NsScheme {
 public:
  NsScheme(const BoundaryImage& bnd, double h, int order);

  int width() const { return bnd_.width(); }
  int height() const { return bnd_.height(); }
  double h() const { return h_; }
  int order() const { return order_; }
  const BoundaryImage& boundary() const { return bnd_; }

  const std::vector<Stencil>& bank() const { return bank_; }
  /// Index into bank(), or -1 for a zero operator.
  int stencil_id(DiffOp op, int i, int j) const {
    return ids_[static_cast<std::size_t>(j * width() + i)][static_cast<std::size_t>(op)];
  }
  const Stencil* stencil(DiffOp op, int i, int j) const {
    const int id = stencil_id(op, i, j);
    return id < 0 ? nullptr : &bank_[static_cast<std::size_t>(id)];
  }

  bool momentum_row(int i, int j) const { return code::momentum_row(bnd_(i, j)); }
  bool divergence_row(int i, int j) const { return code::divergence_row(bnd_(i, j)); }
  std::size_t momentum_rows() const { return n_mom_; }
  std::size_t divergence_rows() const { return n_div_; }

 private:
  int add(Stencil s);

  BoundaryImage bnd_;
  double h_;
  int order_;
  std::vector<Stencil> bank_;
  std::vector<std::array<std::int16_t, diff_op_count>> ids_;
  std::size_t n_mom_ = 0;
  std::size_t n_div_ = 0;
};

struct NsResidual {
  Field mx;  // x-momentum
  Field my;  // y-momentum
  Field d;   // divergence
};

/// Overwrites Dirichlet data: inflow (u, v, p) = (inflow_u, 0, 0), walls and
/// solids (0, 0, 0), outflow p = 0. Everything else passes through.
FieldSet enforce_bcs(const FieldSet& fields, const BoundaryImage& bnd, const FluidConstants& consts);
void enforce_bcs_inplace(FieldSet& fields, const BoundaryImage& bnd, const FluidConstants& consts);

/// Same overwrite pattern with boundary values taken from `values` (used for
/// manufactured solutions with non-constant Dirichlet data).
FieldSet enforce_bcs(const FieldSet& fields, const BoundaryImage& bnd, const FieldSet& values);
void enforce_bcs_inplace(FieldSet& fields, const BoundaryImage& bnd, const FieldSet& values);

/// True at pixels whose value enforce_bcs overwrites, per channel (0 u, 1 v, 2 p).
bool bc_overwritten(std::uint8_t c, int channel);

/// Discrete Navier-Stokes residual evaluated by cross-correlating each field
/// with the scheme's stencils and selecting per pixel. Rows without an
/// equation (see code::momentum_row / code::divergence_row) are zero.
/// Throws NumericalError naming the first non-finite input pixel.
NsResidual ns_residual(const FieldSet& fields, const NsScheme& scheme, double nu);
NsResidual ns_residual(const FieldSet& fields, const BoundaryImage& bnd, const FluidConstants& consts, double h,
                       int order = 2);

/// Laplacian(u) - f on pixels where the central stencil fits inside the image,
/// zero on the remaining border pixels.
Field diffusion_residual(const Field& u, const Field& rhs, double h, int order = 2);

}  // namespace nspf
