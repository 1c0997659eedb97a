#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nspf {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

/// The rectangular channel and its pixel discretization.
///
/// Pixel (i, j) covers [i h, (i+1) h] x [j h, (j+1) h]; i counts along x from
/// the inlet, j counts along y from the lower wall. Its FD node is the center.
struct ChannelSpec {
  double width_m = 6.0;
  double height_m = 3.0;
  int res_w = 256;
  int res_h = 128;

  double h() const { return width_m / res_w; }
  Point pixel_center(int i, int j) const { return {(i + 0.5) * h(), (j + 0.5) * h()}; }

  /// Empty iff resolutions are powers of two and pixels are square.
  std::vector<std::string> violations() const;
  /// Throws ValidationError listing violations().
  void validate() const;

  bool operator==(const ChannelSpec&) const = default;
};

bool is_power_of_two(int n);

/// Dense w x h array indexed by (i, j) = (x, y); storage is row-major by y,
/// so element (i, j) lives at j * w + i.
template <typename T>
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < width_ && j < height_; }
  std::size_t index(int i, int j) const {
    assert(contains(i, j));
    return static_cast<std::size_t>(j) * width_ + i;
  }

  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }
  T& operator[](std::size_t k) { return data_[k]; }
  const T& operator[](std::size_t k) const { return data_[k]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  bool same_shape(const PixelGrid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const PixelGrid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Binary fluid mask: 1 = fluid pixel, 0 = solid.
class GeometryImage : public PixelGrid<std::uint8_t> {
 public:
  using PixelGrid::PixelGrid;
  bool fluid(int i, int j) const { return (*this)(i, j) != 0; }
  std::size_t fluid_count() const;
  bool operator==(const GeometryImage&) const = default;
};

/// Boundary codes. Values 4..18 are one-sided pressure codes: 3 + mask, where
/// the mask bits flag orthogonal neighbors without a pressure unknown.
namespace code {
inline constexpr std::uint8_t interior = 0;
inline constexpr std::uint8_t inflow = 1;
inline constexpr std::uint8_t wall = 2;
inline constexpr std::uint8_t outflow = 3;
inline constexpr std::uint8_t one_sided_base = 3;
inline constexpr std::uint8_t max_code = 18;

inline constexpr unsigned minus_x = 1;
inline constexpr unsigned plus_x = 2;
inline constexpr unsigned minus_y = 4;
inline constexpr unsigned plus_y = 8;

constexpr bool is_one_sided(std::uint8_t c) { return c >= 4; }
constexpr unsigned one_sided_mask(std::uint8_t c) { return c >= 4 ? c - one_sided_base : 0u; }
constexpr std::uint8_t from_mask(unsigned mask) {
  return static_cast<std::uint8_t>(one_sided_base + mask);
}

/// Velocity is prescribed (inflow, wall, obstacle).
constexpr bool velocity_dirichlet(std::uint8_t c) { return c == inflow || c == wall; }
/// Pressure is an unknown of the discrete system or a Dirichlet value (outflow).
constexpr bool pressure_defined(std::uint8_t c) { return !velocity_dirichlet(c); }
/// Pixels carrying momentum residual rows.
constexpr bool momentum_row(std::uint8_t c) { return !velocity_dirichlet(c); }
/// Pixels carrying divergence residual rows.
constexpr bool divergence_row(std::uint8_t c) { return c == interior || c >= 4; }
/// Pixels whose pressure is free (not overwritten by boundary enforcement).
constexpr bool pressure_free(std::uint8_t c) { return c == interior || c >= 4; }
}  // namespace code

class BoundaryImage : public PixelGrid<std::uint8_t> {
 public:
  using PixelGrid::PixelGrid;
  bool operator==(const BoundaryImage&) const = default;
};

}  // namespace nspf
