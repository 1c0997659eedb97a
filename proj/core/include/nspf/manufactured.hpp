#pragma once

#include <string>

#include "nspf/fields.hpp"
#include "nspf/grid.hpp"
#include "nspf/solver.hpp"

namespace nspf {

enum class ManufacturedKind { poiseuille, kovasznay };

/// Plane Poiseuille flow through the empty channel with zero velocity at the
/// centers of the wall rows and p = 0 at the outflow column centers:
/// u = u0 (1 - ((y - H/2) / a)^2), a = H/2 - h/2, v = 0, p = c (x_out - x),
/// c = 2 nu u0 / a^2. The discrete residual vanishes for order-2 stencils.
FieldSet poiseuille_solution(const ChannelSpec& spec, const FluidConstants& consts, double u0);

/// Kovasznay flow at Reynolds number re = 1/nu, sampled at pixel centers
/// shifted by (x0, y0): u = 1 - e^{lx} cos(2 pi y), v = l/(2 pi) e^{lx} sin(2 pi y),
/// p = (1 - e^{2 l x}) / 2 with l = re/2 - sqrt(re^2/4 + 4 pi^2).
double kovasznay_lambda(double re);
FieldSet kovasznay_solution(const ChannelSpec& spec, double re, double x0 = -0.5, double y0 = -0.5);

/// Point values of the Kovasznay fields (u, v, p).
struct FlowPoint {
  double u, v, p;
};
FlowPoint kovasznay_at(double x, double y, double re);

/// Default parameters: Poiseuille peak = consts.inflow_u; Kovasznay re = 1/nu.
FieldSet manufactured_solution(ManufacturedKind kind, const ChannelSpec& spec, const FluidConstants& consts);

/// All-Dirichlet box: the outer pixel ring is code 2 holding the analytic
/// values, the pressure is pinned at the central pixel.
NsProblem kovasznay_problem(const ChannelSpec& spec, double re);

}  // namespace nspf
