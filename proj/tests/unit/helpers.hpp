#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "nspf/fields.hpp"
#include "nspf/grid.hpp"
#include "nspf/random.hpp"
#include "nspf/residual.hpp"

namespace nspf::test {

inline Field random_field(int w, int h, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Field f(w, h);
  for (auto& x : f.values()) x = rng.uniform(lo, hi);
  return f;
}

inline FieldSet random_fields(int w, int h, std::uint64_t seed) {
  FieldSet f(w, h);
  for (int c = 0; c < 3; ++c) f.channel(c) = random_field(w, h, mix_seed(seed, static_cast<std::uint64_t>(c)));
  return f;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("nspf_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Straightforward per-pixel evaluation of the order-2 residual, written
/// without stencil objects: central differences in the interior, backward
/// x-differences at the outflow, and pressure differences that only read
/// pixels carrying a pressure value.
inline NsResidual loop_residual(const FieldSet& f, const BoundaryImage& bnd, double nu, double h) {
  const int w = bnd.width();
  const int ht = bnd.height();
  NsResidual r{Field(w, ht), Field(w, ht), Field(w, ht)};
  auto at = [&](const Field& g, int i, int j) { return bnd.contains(i, j) ? g(i, j) : 0.0; };
  auto has_p = [&](int i, int j) {
    return bnd.contains(i, j) && bnd(i, j) != code::inflow && bnd(i, j) != code::wall;
  };
  auto pgrad = [&](int i, int j, int di, int dj) {
    const bool minus = has_p(i - di, j - dj);
    const bool plus = has_p(i + di, j + dj);
    const Field& p = f.p;
    if (minus && plus) return (p(i + di, j + dj) - p(i - di, j - dj)) / (2 * h);
    if (plus) {
      if (has_p(i + 2 * di, j + 2 * dj)) return (-3 * p(i, j) + 4 * p(i + di, j + dj) - p(i + 2 * di, j + 2 * dj)) / (2 * h);
      return (p(i + di, j + dj) - p(i, j)) / h;
    }
    if (minus) {
      if (has_p(i - 2 * di, j - 2 * dj)) return (3 * p(i, j) - 4 * p(i - di, j - dj) + p(i - 2 * di, j - 2 * dj)) / (2 * h);
      return (p(i, j) - p(i - di, j - dj)) / h;
    }
    return 0.0;
  };
  for (int j = 0; j < ht; ++j) {
    for (int i = 0; i < w; ++i) {
      const auto c = bnd(i, j);
      if (c == code::inflow || c == code::wall) continue;
      double ux, vx, uxx, vxx;
      if (c == code::outflow) {
        ux = (3 * f.u(i, j) - 4 * at(f.u, i - 1, j) + at(f.u, i - 2, j)) / (2 * h);
        vx = (3 * f.v(i, j) - 4 * at(f.v, i - 1, j) + at(f.v, i - 2, j)) / (2 * h);
        uxx = (f.u(i, j) - 2 * at(f.u, i - 1, j) + at(f.u, i - 2, j)) / (h * h);
        vxx = (f.v(i, j) - 2 * at(f.v, i - 1, j) + at(f.v, i - 2, j)) / (h * h);
      } else {
        ux = (at(f.u, i + 1, j) - at(f.u, i - 1, j)) / (2 * h);
        vx = (at(f.v, i + 1, j) - at(f.v, i - 1, j)) / (2 * h);
        uxx = (at(f.u, i + 1, j) - 2 * f.u(i, j) + at(f.u, i - 1, j)) / (h * h);
        vxx = (at(f.v, i + 1, j) - 2 * f.v(i, j) + at(f.v, i - 1, j)) / (h * h);
      }
      const double uy = (at(f.u, i, j + 1) - at(f.u, i, j - 1)) / (2 * h);
      const double vy = (at(f.v, i, j + 1) - at(f.v, i, j - 1)) / (2 * h);
      const double uyy = (at(f.u, i, j + 1) - 2 * f.u(i, j) + at(f.u, i, j - 1)) / (h * h);
      const double vyy = (at(f.v, i, j + 1) - 2 * f.v(i, j) + at(f.v, i, j - 1)) / (h * h);
      const double u = f.u(i, j);
      const double v = f.v(i, j);
      r.mx(i, j) = u * ux + v * uy + pgrad(i, j, 1, 0) - nu * (uxx + uyy);
      r.my(i, j) = u * vx + v * vy + pgrad(i, j, 0, 1) - nu * (vxx + vyy);
      if (c != code::outflow) r.d(i, j) = ux + vy;
    }
  }
  return r;
}

inline double max_abs(const Field& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace nspf::test
