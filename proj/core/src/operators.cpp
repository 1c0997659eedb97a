#include "nspf/operators.hpp"

#include <vector>

namespace nspf {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix assemble_op(const NsScheme& s, DiffOp op) {
  const int w = s.width();
  const int h = s.height();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(w) * h * 5);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const Stencil* st = s.stencil(op, i, j);
      if (!st) continue;
      const int row = j * w + i;
      for (const auto& tap : st->taps()) {
        const int ii = i + tap.dx;
        const int jj = j + tap.dy;
        if (ii < 0 || jj < 0 || ii >= w || jj >= h) continue;
        t.emplace_back(row, jj * w + ii, tap.w);
      }
    }
  }
  SparseMatrix m(w * h, w * h);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

SparseMatrix assemble_stencil(const Stencil& st, int w, int h) {
  std::vector<Triplet> t;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      for (const auto& tap : st.taps()) {
        const int ii = i + tap.dx;
        const int jj = j + tap.dy;
        if (ii < 0 || jj < 0 || ii >= w || jj >= h) continue;
        t.emplace_back(j * w + i, jj * w + ii, tap.w);
      }
    }
  }
  SparseMatrix m(w * h, w * h);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

NsOperators::NsOperators(const NsScheme& scheme) : scheme_(scheme), n_(scheme.width() * scheme.height()) {
  dx = assemble_op(scheme_, DiffOp::dx);
  dy = assemble_op(scheme_, DiffOp::dy);
  lap = assemble_op(scheme_, DiffOp::dxx) + assemble_op(scheme_, DiffOp::dyy);
  gx = assemble_op(scheme_, DiffOp::gx);
  gy = assemble_op(scheme_, DiffOp::gy);
  momentum_mask = Vector::Zero(n_);
  divergence_mask = Vector::Zero(n_);
  for (int j = 0; j < scheme_.height(); ++j) {
    for (int i = 0; i < scheme_.width(); ++i) {
      const int k = j * scheme_.width() + i;
      if (scheme_.momentum_row(i, j)) momentum_mask[k] = 1.0;
      if (scheme_.divergence_row(i, j)) divergence_mask[k] = 1.0;
    }
  }
}

NsOperators::Residual NsOperators::residual(const Vector& u, const Vector& v, const Vector& p, double nu) const {
  const Vector ux = dx * u;
  const Vector vy = dy * v;
  Residual r;
  r.mx = momentum_mask.cwiseProduct(u.cwiseProduct(ux) + v.cwiseProduct(dy * u) + gx * p - nu * (lap * u));
  r.my = momentum_mask.cwiseProduct(u.cwiseProduct(dx * v) + v.cwiseProduct(vy) + gy * p - nu * (lap * v));
  r.d = divergence_mask.cwiseProduct(ux + vy);
  return r;
}

NsResidual NsOperators::residual(const FieldSet& f, double nu) const {
  require_finite(f);
  const auto r = residual(as_vector(f.u), as_vector(f.v), as_vector(f.p), nu);
  NsResidual out{Field(f.width(), f.height()), Field(f.width(), f.height()), Field(f.width(), f.height())};
  as_vector(out.mx) = r.mx;
  as_vector(out.my) = r.my;
  as_vector(out.d) = r.d;
  return out;
}

void NsOperators::adjoint(const Vector& u, const Vector& v, const Vector& p, const Vector& a, const Vector& b,
                          const Vector& c, double nu, Vector& gu, Vector& gv, Vector& gp) const {
  (void)p;
  const Vector ua = u.cwiseProduct(a);
  const Vector va = v.cwiseProduct(a);
  const Vector ub = u.cwiseProduct(b);
  const Vector vb = v.cwiseProduct(b);
  gu = (dx * u).cwiseProduct(a) + (dx * v).cwiseProduct(b) +
       dx.transpose() * (ua + c) + dy.transpose() * va - nu * (lap.transpose() * a);
  gv = (dy * u).cwiseProduct(a) + (dy * v).cwiseProduct(b) +
       dx.transpose() * ub + dy.transpose() * (vb + c) - nu * (lap.transpose() * b);
  gp = gx.transpose() * a + gy.transpose() * b;
}

SparseMatrix NsOperators::jacobian(const Vector& u, const Vector& v, double nu) const {
  const Vector ux = dx * u;
  const Vector uy = dy * u;
  const Vector vx = dx * v;
  const Vector vy = dy * v;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n_) * 40);
  const int n = n_;
  auto add_row = [&](const SparseMatrix& m, int k, int row, int col_off, double scale) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) t.emplace_back(row, col_off + it.col(), scale * it.value());
  };
  for (int k = 0; k < n; ++k) {
    if (momentum_mask[k] != 0.0) {
      // x-momentum
      t.emplace_back(k, k, ux[k]);
      add_row(dx, k, k, 0, u[k]);
      add_row(dy, k, k, 0, v[k]);
      add_row(lap, k, k, 0, -nu);
      t.emplace_back(k, n + k, uy[k]);
      add_row(gx, k, k, 2 * n, 1.0);
      // y-momentum
      t.emplace_back(n + k, k, vx[k]);
      t.emplace_back(n + k, n + k, vy[k]);
      add_row(dx, k, n + k, n, u[k]);
      add_row(dy, k, n + k, n, v[k]);
      add_row(lap, k, n + k, n, -nu);
      add_row(gy, k, n + k, 2 * n, 1.0);
    }
    if (divergence_mask[k] != 0.0) {
      add_row(dx, k, 2 * n + k, 0, 1.0);
      add_row(dy, k, 2 * n + k, n, 1.0);
    }
  }
  SparseMatrix j(3 * n, 3 * n);
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

}  // namespace nspf
