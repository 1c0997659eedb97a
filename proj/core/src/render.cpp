#include "nspf/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nspf/io.hpp"

namespace nspf {

GrayRange field_range(const Field& f) {
  if (f.size() == 0) return {};
  const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  return {*lo, *hi};
}

std::uint8_t gray_value(double x, const GrayRange& r) {
  if (!(r.hi > r.lo)) return 128;
  const double t = std::clamp((x - r.lo) / (r.hi - r.lo), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(255.0 * t));
}

PixelGrid<std::uint8_t> to_gray(const Field& f, const GrayRange& r) {
  PixelGrid<std::uint8_t> img(f.width(), f.height());
  for (std::size_t k = 0; k < f.size(); ++k) img[k] = gray_value(f[k], r);
  return img;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void blit(PixelGrid<std::uint8_t>& dst, const PixelGrid<std::uint8_t>& src, int col, int row, int rows) {
  // Panel row 0 is drawn at the top, i.e. the largest j.
  const int oi = col * src.width();
  const int oj = (rows - 1 - row) * src.height();
  for (int j = 0; j < src.height(); ++j) {
    for (int i = 0; i < src.width(); ++i) dst(oi + i, oj + j) = src(i, j);
  }
}

}  // namespace

void render_fields(const FieldSet& pred, const FieldSet* target, const std::filesystem::path& dir,
                   const std::string& stem) {
  const char* names[3] = {"u", "v", "p"};
  const int w = pred.width();
  const int h = pred.height();
  const int cols = target ? 3 : 1;
  PixelGrid<std::uint8_t> panel(w * cols, h * 3, 0);
  std::ostringstream ranges;
  for (int c = 0; c < 3; ++c) {
    GrayRange r = field_range(pred.channel(c));
    if (target) {
      const GrayRange t = field_range(target->channel(c));
      r = {std::min(r.lo, t.lo), std::max(r.hi, t.hi)};
    }
    const auto img = to_gray(pred.channel(c), r);
    io::write_pgm(dir / (stem + "_" + names[c] + ".pgm"), img, 255);
    ranges << names[c] << ' ' << fmt(r.lo) << ' ' << fmt(r.hi) << '\n';
    blit(panel, img, 0, c, 3);
    if (target) {
      blit(panel, to_gray(target->channel(c), r), 1, c, 3);
      Field err(w, h);
      double emax = 0.0;
      for (std::size_t k = 0; k < err.size(); ++k) {
        err[k] = std::fabs(pred.channel(c)[k] - target->channel(c)[k]);
        emax = std::max(emax, err[k]);
      }
      PixelGrid<std::uint8_t> eimg(w, h, 0);
      if (emax > 0.0) eimg = to_gray(err, {0.0, emax});
      blit(panel, eimg, 2, c, 3);
      ranges << "err_" << names[c] << " 0 " << fmt(emax) << '\n';
    }
  }
  io::write_pgm(dir / (stem + "_panel.pgm"), panel, 255);
  io::write_text(dir / (stem + "_ranges.txt"), ranges.str());
}

}  // namespace nspf
