#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "nspf/residual.hpp"

namespace nspf {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// The scheme's stencils assembled as sparse N x N matrices over pixels in
/// storage order (k = j * w + i). Row k holds the stencil selected for pixel
/// k; taps falling outside the image are dropped, matching the zero padding
/// of cross_correlate. Rows of pixels without an equation are empty.
class NsOperators {
 public:
  explicit NsOperators(const NsScheme& scheme);

  int size() const { return n_; }
  const NsScheme& scheme() const { return scheme_; }

  SparseMatrix dx, dy, lap, gx, gy;
  Vector momentum_mask;    // 1 on momentum rows
  Vector divergence_mask;  // 1 on divergence rows

  struct Residual {
    Vector mx, my, d;
  };
  Residual residual(const Vector& u, const Vector& v, const Vector& p, double nu) const;
  NsResidual residual(const FieldSet& f, double nu) const;

  /// Vector-Jacobian product: given dL/dRmx = a, dL/dRmy = b, dL/dRd = c
  /// (zero off their rows), returns dL/du, dL/dv, dL/dp.
  void adjoint(const Vector& u, const Vector& v, const Vector& p, const Vector& a, const Vector& b,
               const Vector& c, double nu, Vector& gu, Vector& gv, Vector& gp) const;

  /// Full Jacobian of [Rmx; Rmy; Rd] with respect to [u; v; p], 3N x 3N.
  SparseMatrix jacobian(const Vector& u, const Vector& v, double nu) const;

 private:
  NsScheme scheme_;
  int n_;
};

inline Eigen::Map<const Vector> as_vector(const Field& f) {
  return {f.values().data(), static_cast<Eigen::Index>(f.size())};
}
inline Eigen::Map<Vector> as_vector(Field& f) { return {f.values().data(), static_cast<Eigen::Index>(f.size())}; }

/// Sparse matrix of a single stencil over a w x h image (zero padding).
SparseMatrix assemble_stencil(const Stencil& stencil, int width, int height);

}  // namespace nspf
