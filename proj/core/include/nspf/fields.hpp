#pragma once

#include <string>

#include "nspf/grid.hpp"

namespace nspf {

enum class Quantity { u, v, p, generic };

/// Scalar field sampled at pixel centers.
class Field : public PixelGrid<double> {
 public:
  Field() = default;
  Field(int width, int height, double fill = 0.0, Quantity q = Quantity::generic)
      : PixelGrid(width, height, fill), quantity(q) {}

  Quantity quantity = Quantity::generic;

  bool operator==(const Field&) const = default;
};

/// Velocity components (m/s) and kinematic pressure (m^2/s^2).
struct FieldSet {
  Field u;
  Field v;
  Field p;

  FieldSet() = default;
  FieldSet(int width, int height)
      : u(width, height, 0.0, Quantity::u), v(width, height, 0.0, Quantity::v),
        p(width, height, 0.0, Quantity::p) {}

  int width() const { return u.width(); }
  int height() const { return u.height(); }
  Field& channel(int c) { return c == 0 ? u : (c == 1 ? v : p); }
  const Field& channel(int c) const { return c == 0 ? u : (c == 1 ? v : p); }

  bool operator==(const FieldSet&) const = default;
};

struct FluidConstants {
  double nu = 0.05;
  double inflow_u = 3.0;

  bool operator==(const FluidConstants&) const = default;
};

/// Throws NumericalError naming the first non-finite pixel.
void require_finite(const Field& f, const std::string& what);
void require_finite(const FieldSet& fs);

}  // namespace nspf
