#include "nspf/manufactured.hpp"

#include <cmath>
#include <numbers>

#include "nspf/geometry.hpp"

namespace nspf {

FieldSet poiseuille_solution(const ChannelSpec& spec, const FluidConstants& consts, double u0) {
  const double h = spec.h();
  const double a = 0.5 * spec.height_m - 0.5 * h;
  const double c = 2.0 * consts.nu * u0 / (a * a);
  const double x_out = spec.width_m - 0.5 * h;
  FieldSet f(spec.res_w, spec.res_h);
  for (int j = 0; j < spec.res_h; ++j) {
    for (int i = 0; i < spec.res_w; ++i) {
      const Point q = spec.pixel_center(i, j);
      const double eta = (q.y - 0.5 * spec.height_m) / a;
      f.u(i, j) = u0 * (1.0 - eta * eta);
      f.p(i, j) = c * (x_out - q.x);
    }
  }
  return f;
}

double kovasznay_lambda(double re) {
  const double pi = std::numbers::pi;
  return 0.5 * re - std::sqrt(0.25 * re * re + 4.0 * pi * pi);
}

FlowPoint kovasznay_at(double x, double y, double re) {
  const double l = kovasznay_lambda(re);
  const double two_pi = 2.0 * std::numbers::pi;
  const double e = std::exp(l * x);
  return {1.0 - e * std::cos(two_pi * y), l / two_pi * e * std::sin(two_pi * y), 0.5 * (1.0 - e * e)};
}

FieldSet kovasznay_solution(const ChannelSpec& spec, double re, double x0, double y0) {
  FieldSet f(spec.res_w, spec.res_h);
  for (int j = 0; j < spec.res_h; ++j) {
    for (int i = 0; i < spec.res_w; ++i) {
      const Point q = spec.pixel_center(i, j);
      const FlowPoint s = kovasznay_at(q.x + x0, q.y + y0, re);
      f.u(i, j) = s.u;
      f.v(i, j) = s.v;
      f.p(i, j) = s.p;
    }
  }
  return f;
}

FieldSet manufactured_solution(ManufacturedKind kind, const ChannelSpec& spec, const FluidConstants& consts) {
  if (kind == ManufacturedKind::poiseuille) return poiseuille_solution(spec, consts, consts.inflow_u);
  return kovasznay_solution(spec, 1.0 / consts.nu);
}

NsProblem kovasznay_problem(const ChannelSpec& spec, double re) {
  const int w = spec.res_w;
  const int h = spec.res_h;
  NsProblem pb;
  pb.bnd = BoundaryImage(w, h, code::interior);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      if (i == 0 || j == 0 || i == w - 1 || j == h - 1) pb.bnd(i, j) = code::wall;
    }
  }
  for (int j = 1; j < h - 1; ++j) {
    for (int i = 1; i < w - 1; ++i) {
      unsigned mask = 0;
      if (pb.bnd(i - 1, j) == code::wall) mask |= code::minus_x;
      if (pb.bnd(i + 1, j) == code::wall) mask |= code::plus_x;
      if (pb.bnd(i, j - 1) == code::wall) mask |= code::minus_y;
      if (pb.bnd(i, j + 1) == code::wall) mask |= code::plus_y;
      if (mask) pb.bnd(i, j) = code::from_mask(mask);
    }
  }
  pb.boundary_values = kovasznay_solution(spec, re);
  pb.h = spec.h();
  pb.nu = 1.0 / re;
  const int pi = w / 2;
  const int pj = h / 2;
  pb.pressure_pin = NsProblem::Pin{pi, pj, pb.boundary_values.p(pi, pj)};
  return pb;
}

}  // namespace nspf
