#pragma once

#include <string>
#include <vector>

#include "nspf/fields.hpp"

namespace nspf {

enum class Derivative { dx, dy, dxx, dyy, laplacian };
enum class StencilSide { central, forward, backward };

std::string to_string(Derivative d);

/// Finite-difference kernel K of size (2r+1) x (2r+1), applied by
/// cross-correlation: (F * K)(i, j) = sum_{m,n} F(i+m, j+n) K(m, n), with m the
/// x offset and n the y offset. Coefficients are stored unscaled; `scale`
/// (1/h or 1/h^2) multiplies them at evaluation.
class Stencil {
 public:
  Stencil(int radius, std::vector<double> coefficients, double scale, Derivative derivative, int order,
          StencilSide side = StencilSide::central);

  int radius() const { return radius_; }
  int size() const { return 2 * radius_ + 1; }
  double scale() const { return scale_; }
  Derivative derivative() const { return derivative_; }
  int order() const { return order_; }
  StencilSide side() const { return side_; }

  double coefficient(int dx, int dy) const { return coeffs_[static_cast<std::size_t>((dy + radius_) * size() + dx + radius_)]; }
  double weight(int dx, int dy) const { return scale_ * coefficient(dx, dy); }

  /// Nonzero taps as (dx, dy, scaled weight).
  struct Tap {
    int dx;
    int dy;
    double w;
  };
  const std::vector<Tap>& taps() const { return taps_; }

 private:
  int radius_;
  std::vector<double> coeffs_;
  double scale_;
  Derivative derivative_;
  int order_;
  StencilSide side_;
  std::vector<Tap> taps_;
};

/// Weights w_{-k..k} of the central difference for the given derivative order
/// (1 or 2) and even accuracy order 2k, solved from polynomial exactness.
std::vector<double> central_difference_weights(int derivative_order, int accuracy_order);

/// Central stencil; order must be 2 or 6. Throws ValidationError otherwise.
Stencil make_stencil(Derivative derivative, int order, double h);

/// One-sided stencil for dx/dy (accuracy 1 or 2) or dxx/dyy (accuracy 1).
/// Forward reads offsets 0, +1, +2; backward reads 0, -1, -2.
Stencil make_one_sided_stencil(Derivative derivative, StencilSide side, double h, int accuracy = 2);

/// Cross-correlation with zero values outside the image. Output has the
/// input's shape.
Field cross_correlate(const Field& field, const Stencil& stencil);

}  // namespace nspf
