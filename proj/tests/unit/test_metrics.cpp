#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "nspf/error.hpp"
#include "nspf/geometry.hpp"
#include "nspf/manufactured.hpp"
#include "nspf/metrics.hpp"

using namespace nspf;

TEST(RelativeL2, HandComputed) {
  GeometryImage g(2, 2, 1);
  g(1, 1) = 0;
  Field ref(2, 2), pred(2, 2);
  ref(0, 0) = 3.0;
  ref(1, 0) = 4.0;
  ref(0, 1) = 0.0;
  ref(1, 1) = 100.0;  // solid, ignored
  pred = ref;
  pred(0, 1) = 1.0;
  pred(1, 1) = -7.0;
  EXPECT_DOUBLE_EQ(relative_l2(pred, ref, g), 1.0 / 5.0);
  EXPECT_EQ(relative_l2(ref, ref, g), 0.0);
}

TEST(RelativeL2, ZeroReferenceRejected) {
  const GeometryImage g(4, 2, 1);
  EXPECT_THROW(relative_l2(Field(4, 2, 1.0), Field(4, 2), g), ValidationError);
  EXPECT_THROW(relative_l2(Field(4, 2), Field(2, 2), g), ValidationError);
}

TEST(RelativeL2, ScaleInvariantAndTriangle) {
  const GeometryImage g(8, 4, 1);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Field a = test::random_field(8, 4, s);
    const Field b = test::random_field(8, 4, s + 100);
    Field a2 = a, b2 = b;
    for (auto& x : a2.values()) x *= 3.5;
    for (auto& x : b2.values()) x *= 3.5;
    EXPECT_NEAR(relative_l2(a2, b2, g), relative_l2(a, b, g), 1e-13);
    // ||a - b|| <= ||a|| + ||b||, divided by ||b||.
    double na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      na += a[k] * a[k];
      nb += b[k] * b[k];
    }
    EXPECT_LE(relative_l2(a, b, g), 1.0 + std::sqrt(na / nb));
  }
}

TEST(VelocityRelL2, StacksComponents) {
  const GeometryImage g(2, 1, 1);
  FieldSet ref(2, 1), pred(2, 1);
  ref.u(0, 0) = 1.0;
  ref.v(1, 0) = 1.0;
  pred = ref;
  pred.u(1, 0) = 1.0;
  pred.p(0, 0) = 50.0;  // pressure does not enter
  EXPECT_DOUBLE_EQ(velocity_rel_l2(pred, ref, g), std::sqrt(0.5));
}

TEST(ResidualNorms, MeansOverInteriorRows) {
  BoundaryImage bnd(3, 1, code::interior);
  bnd(0, 0) = code::inflow;
  bnd(2, 0) = code::from_mask(code::plus_x);
  NsResidual r{Field(3, 1), Field(3, 1), Field(3, 1)};
  r.d(0, 0) = 100.0;
  r.d(1, 0) = -1.0;
  r.d(2, 0) = 3.0;
  r.mx(1, 0) = 2.0;
  r.my(1, 0) = -4.0;
  r.mx(2, 0) = 1.0;
  const ResidualNorms n = residual_norms(r, bnd);
  EXPECT_DOUBLE_EQ(n.mean_abs_div, 2.0);
  EXPECT_DOUBLE_EQ(n.mean_abs_mom, (3.0 + 0.5) / 2.0);
}

TEST(ResidualNorms, PoiseuilleVanishes) {
  const ChannelSpec spec{6.0, 3.0, 32, 16};
  const FieldSet f = poiseuille_solution(spec, FluidConstants{}, 3.0);
  const ResidualNorms n = residual_norms(f, encode_boundary(GeometryImage(32, 16, 1)), FluidConstants{}, spec.h());
  EXPECT_LT(n.mean_abs_div, 1e-12);
  EXPECT_LT(n.mean_abs_mom, 1e-12);
}

TEST(VelocityDiag, CellReynoldsFlag) {
  const FluidConstants consts;
  const double h = 3.0 / 128.0;
  EXPECT_NEAR(cell_reynolds_threshold(consts, h), 2.0 * 0.05 * 128.0 / 3.0, 1e-12);
  EXPECT_NEAR(cell_reynolds_threshold(consts, h), 4.2667, 1e-4);

  GeometryImage g(4, 2, 1);
  g(3, 1) = 0;
  FieldSet f(4, 2);
  f.u(1, 0) = 3.0;
  f.u(3, 1) = 50.0;  // solid
  VelocityDiag d = max_velocity_diag(f, g, consts, h);
  EXPECT_EQ(d.vmax, 3.0);
  EXPECT_NEAR(d.vmax * h / consts.nu, 1.40625, 1e-12);
  EXPECT_FALSE(d.cell_reynolds_exceeded);

  f.u(2, 1) = 3.0;
  f.v(2, 1) = 4.0;
  d = max_velocity_diag(f, g, consts, h);
  EXPECT_DOUBLE_EQ(d.vmax, 5.0);
  EXPECT_TRUE(d.cell_reynolds_exceeded);
}
