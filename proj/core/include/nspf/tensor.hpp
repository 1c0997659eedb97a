#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace nspf {

/// Named dense tensor, row-major. Convolution weights are (co, ci, ky, kx).
struct Tensor {
  std::string name;
  std::vector<int> shape;
  std::vector<double> data;

  std::size_t size() const { return data.size(); }
  bool operator==(const Tensor&) const = default;
};

std::size_t shape_size(const std::vector<int>& shape);

namespace nn {

/// Feature maps are (pixels x channels) column-major matrices; pixel k of a
/// w x h map is j * w + i. Concatenating channels is a horizontal block join.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;

/// Patch matrix for a 3x3 "same" convolution with zero padding:
/// cols(k, ci * 9 + ky * 3 + kx) = x(i + kx - 1, j + ky - 1, ci).
void im2col3x3(const Matrix& x, int w, int h, Matrix& cols);
/// Adjoint of im2col3x3; accumulates into dx.
void col2im3x3(const Matrix& cols, int w, int h, Matrix& dx);

/// Patch matrix for a 2x2 stride-2 convolution; output is (w/2 * h/2) rows.
/// cols(k, ci * 4 + ky * 2 + kx) = x(2i + kx, 2j + ky, ci).
void im2col2x2s2(const Matrix& x, int w, int h, Matrix& cols);
void col2im2x2s2(const Matrix& cols, int w, int h, Matrix& dx);

/// Nearest-neighbor 2x upsampling of a w x h map.
Matrix upsample2(const Matrix& x, int w, int h);
/// Adjoint of upsample2 (w, h are the coarse dimensions).
Matrix upsample2_backward(const Matrix& dy, int w, int h);

}  // namespace nn
}  // namespace nspf
