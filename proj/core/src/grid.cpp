#include "nspf/grid.hpp"

#include <algorithm>
#include <cmath>

#include "nspf/error.hpp"

namespace nspf {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<std::string> ChannelSpec::violations() const {
  std::vector<std::string> out;
  if (!(width_m > 0.0) || !(height_m > 0.0)) out.push_back("channel extents must be positive");
  if (!is_power_of_two(res_w)) out.push_back("res_w " + std::to_string(res_w) + " is not a power of two");
  if (!is_power_of_two(res_h)) out.push_back("res_h " + std::to_string(res_h) + " is not a power of two");
  if (res_w > 0 && res_h > 0 && width_m > 0.0 && height_m > 0.0) {
    const double hx = width_m / res_w;
    const double hy = height_m / res_h;
    if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy)) {
      out.push_back("pixels are not square: " + std::to_string(hx) + " vs " + std::to_string(hy));
    }
  }
  return out;
}

void ChannelSpec::validate() const {
  auto problems = violations();
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::size_t GeometryImage::fluid_count() const {
  return static_cast<std::size_t>(
      std::count_if(values().begin(), values().end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace nspf
