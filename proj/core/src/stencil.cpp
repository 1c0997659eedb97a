#include "nspf/stencil.hpp"

#include <cmath>
#include <utility>

#include "nspf/error.hpp"

namespace nspf {

std::string to_string(Derivative d) {
  switch (d) {
    case Derivative::dx: return "dx";
    case Derivative::dy: return "dy";
    case Derivative::dxx: return "dxx";
    case Derivative::dyy: return "dyy";
    case Derivative::laplacian: return "laplacian";
  }
  return "?";
}

Stencil::Stencil(int radius, std::vector<double> coefficients, double scale, Derivative derivative, int order,
                 StencilSide side)
    : radius_(radius), coeffs_(std::move(coefficients)), scale_(scale), derivative_(derivative), order_(order),
      side_(side) {
  if (radius_ < 0 || coeffs_.size() != static_cast<std::size_t>(size() * size())) {
    throw ValidationError("stencil coefficient count does not match radius");
  }
  for (int dy = -radius_; dy <= radius_; ++dy) {
    for (int dx = -radius_; dx <= radius_; ++dx) {
      const double c = coefficient(dx, dy);
      if (c != 0.0) taps_.push_back({dx, dy, scale_ * c});
    }
  }
}

std::vector<double> central_difference_weights(int derivative_order, int accuracy_order) {
  if (accuracy_order < 2 || accuracy_order % 2 != 0) throw ValidationError("accuracy order must be even and >= 2");
  if (derivative_order != 1 && derivative_order != 2) throw ValidationError("derivative order must be 1 or 2");
  const int k = accuracy_order / 2;
  const int n = 2 * k + 1;
  // Vandermonde system: sum_s w_s s^m = m! [m == derivative_order], m = 0..n-1
  std::vector<long double> a(static_cast<std::size_t>(n * (n + 1)));
  auto at = [&](int r, int c) -> long double& { return a[static_cast<std::size_t>(r * (n + 1) + c)]; };
  for (int m = 0; m < n; ++m) {
    for (int s = -k; s <= k; ++s) {
      long double pw = 1.0L;
      for (int e = 0; e < m; ++e) pw *= s;
      at(m, s + k) = pw;
    }
    at(m, n) = (m == derivative_order) ? (derivative_order == 1 ? 1.0L : 2.0L) : 0.0L;
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(at(r, col)) > std::fabs(at(piv, col))) piv = r;
    }
    for (int c = 0; c <= n; ++c) std::swap(at(col, c), at(piv, c));
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = at(r, col) / at(col, col);
      for (int c = col; c <= n; ++c) at(r, c) -= f * at(col, c);
    }
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    long double x = at(r, n) / at(r, r);
    // Snap roundoff from the elimination; the exact weights are simple rationals.
    if (std::fabs(x) < 1e-15L) x = 0.0L;
    w[static_cast<std::size_t>(r)] = static_cast<double>(x);
  }
  return w;
}

namespace {

std::vector<double> place_1d(const std::vector<double>& w, int radius, bool along_x) {
  const int size = 2 * radius + 1;
  std::vector<double> k(static_cast<std::size_t>(size * size), 0.0);
  const int half = static_cast<int>(w.size()) / 2;
  for (int s = -half; s <= half; ++s) {
    const int dx = along_x ? s : 0;
    const int dy = along_x ? 0 : s;
    k[static_cast<std::size_t>((dy + radius) * size + dx + radius)] = w[static_cast<std::size_t>(s + half)];
  }
  return k;
}

}  // namespace

Stencil make_stencil(Derivative derivative, int order, double h) {
  if (order != 2 && order != 6) throw ValidationError("unsupported stencil order " + std::to_string(order));
  if (!(h > 0.0)) throw ValidationError("grid spacing must be positive");
  const int radius = order / 2;
  switch (derivative) {
    case Derivative::dx:
    case Derivative::dy: {
      const auto w = central_difference_weights(1, order);
      return Stencil(radius, place_1d(w, radius, derivative == Derivative::dx), 1.0 / h, derivative, order);
    }
    case Derivative::dxx:
    case Derivative::dyy: {
      const auto w = central_difference_weights(2, order);
      return Stencil(radius, place_1d(w, radius, derivative == Derivative::dxx), 1.0 / (h * h), derivative, order);
    }
    case Derivative::laplacian: {
      const auto w = central_difference_weights(2, order);
      auto kx = place_1d(w, radius, true);
      const auto ky = place_1d(w, radius, false);
      for (std::size_t i = 0; i < kx.size(); ++i) kx[i] += ky[i];
      return Stencil(radius, std::move(kx), 1.0 / (h * h), derivative, order);
    }
  }
  throw ValidationError("unknown derivative");
}

Stencil make_one_sided_stencil(Derivative derivative, StencilSide side, double h, int accuracy) {
  if (side == StencilSide::central) return make_stencil(derivative, 2, h);
  const bool along_x = derivative == Derivative::dx || derivative == Derivative::dxx;
  const bool second = derivative == Derivative::dxx || derivative == Derivative::dyy;
  if (derivative == Derivative::laplacian) throw ValidationError("no one-sided laplacian");
  std::vector<double> fwd;  // weights at offsets 0, 1, 2 for the forward variant
  if (second) {
    fwd = {1.0, -2.0, 1.0};
    accuracy = 1;
  } else if (accuracy == 2) {
    fwd = {-1.5, 2.0, -0.5};
  } else if (accuracy == 1) {
    fwd = {-1.0, 1.0, 0.0};
  } else {
    throw ValidationError("one-sided accuracy must be 1 or 2");
  }
  // Mirroring a forward stencil flips the sign of odd derivatives.
  const double sign = (side == StencilSide::backward && !second) ? -1.0 : 1.0;
  const int radius = 2;
  const int size = 2 * radius + 1;
  std::vector<double> k(static_cast<std::size_t>(size * size), 0.0);
  for (int s = 0; s < 3; ++s) {
    const int off = side == StencilSide::forward ? s : -s;
    const int dx = along_x ? off : 0;
    const int dy = along_x ? 0 : off;
    k[static_cast<std::size_t>((dy + radius) * size + dx + radius)] = sign * fwd[static_cast<std::size_t>(s)];
  }
  const double scale = second ? 1.0 / (h * h) : 1.0 / h;
  return Stencil(radius, std::move(k), scale, derivative, accuracy, side);
}

Field cross_correlate(const Field& field, const Stencil& stencil) {
  const int w = field.width();
  const int h = field.height();
  Field out(w, h, 0.0, field.quantity);
  const double* in = field.values().data();
  double* o = out.values().data();
  for (const auto& tap : stencil.taps()) {
    const int i0 = std::max(0, -tap.dx);
    const int i1 = std::min(w, w - tap.dx);
    const int j0 = std::max(0, -tap.dy);
    const int j1 = std::min(h, h - tap.dy);
    for (int j = j0; j < j1; ++j) {
      const double* src = in + static_cast<std::ptrdiff_t>(j + tap.dy) * w + tap.dx;
      double* dst = o + static_cast<std::ptrdiff_t>(j) * w;
      for (int i = i0; i < i1; ++i) dst[i] += tap.w * src[i];
    }
  }
  return out;
}

}  // namespace nspf
