#include "nspf/tensor.hpp"

#include <cstring>

namespace nspf {

std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

namespace nn {

void im2col3x3(const Matrix& x, int w, int h, Matrix& cols) {
  const Eigen::Index n = static_cast<Eigen::Index>(w) * h;
  const Eigen::Index c = x.cols();
  cols.setZero(n, 9 * c);
  for (Eigen::Index ci = 0; ci < c; ++ci) {
    const double* src = x.col(ci).data();
    for (int ky = 0; ky < 3; ++ky) {
      const int dy = ky - 1;
      for (int kx = 0; kx < 3; ++kx) {
        const int dx = kx - 1;
        double* dst = cols.col(ci * 9 + ky * 3 + kx).data();
        const int i0 = dx < 0 ? 1 : 0;
        const int i1 = dx > 0 ? w - 1 : w;
        for (int j = 0; j < h; ++j) {
          const int sj = j + dy;
          if (sj < 0 || sj >= h) continue;
          std::memcpy(dst + j * w + i0, src + sj * w + i0 + dx, sizeof(double) * static_cast<std::size_t>(i1 - i0));
        }
      }
    }
  }
}

void col2im3x3(const Matrix& cols, int w, int h, Matrix& dx_out) {
  const Eigen::Index c = cols.cols() / 9;
  for (Eigen::Index ci = 0; ci < c; ++ci) {
    double* dst = dx_out.col(ci).data();
    for (int ky = 0; ky < 3; ++ky) {
      const int dy = ky - 1;
      for (int kx = 0; kx < 3; ++kx) {
        const int dx = kx - 1;
        const double* src = cols.col(ci * 9 + ky * 3 + kx).data();
        const int i0 = dx < 0 ? 1 : 0;
        const int i1 = dx > 0 ? w - 1 : w;
        for (int j = 0; j < h; ++j) {
          const int sj = j + dy;
          if (sj < 0 || sj >= h) continue;
          double* d = dst + sj * w + dx;
          const double* s = src + j * w;
          for (int i = i0; i < i1; ++i) d[i] += s[i];
        }
      }
    }
  }
}

void im2col2x2s2(const Matrix& x, int w, int h, Matrix& cols) {
  const int wo = w / 2;
  const int ho = h / 2;
  const Eigen::Index c = x.cols();
  cols.resize(static_cast<Eigen::Index>(wo) * ho, 4 * c);
  for (Eigen::Index ci = 0; ci < c; ++ci) {
    const double* src = x.col(ci).data();
    for (int ky = 0; ky < 2; ++ky) {
      for (int kx = 0; kx < 2; ++kx) {
        double* dst = cols.col(ci * 4 + ky * 2 + kx).data();
        for (int j = 0; j < ho; ++j) {
          const double* row = src + (2 * j + ky) * w + kx;
          for (int i = 0; i < wo; ++i) dst[j * wo + i] = row[2 * i];
        }
      }
    }
  }
}

void col2im2x2s2(const Matrix& cols, int w, int h, Matrix& dx_out) {
  const int wo = w / 2;
  const int ho = h / 2;
  const Eigen::Index c = cols.cols() / 4;
  for (Eigen::Index ci = 0; ci < c; ++ci) {
    double* dst = dx_out.col(ci).data();
    for (int ky = 0; ky < 2; ++ky) {
      for (int kx = 0; kx < 2; ++kx) {
        const double* src = cols.col(ci * 4 + ky * 2 + kx).data();
        for (int j = 0; j < ho; ++j) {
          double* row = dst + (2 * j + ky) * w + kx;
          for (int i = 0; i < wo; ++i) row[2 * i] += src[j * wo + i];
        }
      }
    }
  }
}

Matrix upsample2(const Matrix& x, int w, int h) {
  const int wf = 2 * w;
  Matrix y(static_cast<Eigen::Index>(wf) * 2 * h, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double* src = x.col(c).data();
    double* dst = y.col(c).data();
    for (int jf = 0; jf < 2 * h; ++jf) {
      const double* row = src + (jf / 2) * w;
      double* out = dst + jf * wf;
      for (int i = 0; i < wf; ++i) out[i] = row[i / 2];
    }
  }
  return y;
}

Matrix upsample2_backward(const Matrix& dy, int w, int h) {
  const int wf = 2 * w;
  Matrix dx = Matrix::Zero(static_cast<Eigen::Index>(w) * h, dy.cols());
  for (Eigen::Index c = 0; c < dy.cols(); ++c) {
    const double* src = dy.col(c).data();
    double* dst = dx.col(c).data();
    for (int jf = 0; jf < 2 * h; ++jf) {
      const double* in = src + jf * wf;
      double* row = dst + (jf / 2) * w;
      for (int i = 0; i < wf; ++i) row[i / 2] += in[i];
    }
  }
  return dx;
}

}  // namespace nn
}  // namespace nspf
