#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "nspf/fields.hpp"

namespace nspf {

struct GrayRange {
  double lo = 0.0;
  double hi = 0.0;
};

GrayRange field_range(const Field& f);

/// round(255 (x - lo) / (hi - lo)), clamped; 128 when the range is empty.
std::uint8_t gray_value(double x, const GrayRange& r);
PixelGrid<std::uint8_t> to_gray(const Field& f, const GrayRange& r);

/// Writes <stem>_{u,v,p}.pgm, a panel <stem>_panel.pgm (rows u, v, p; columns
/// prediction, target, |error| when a target is given) and <stem>_ranges.txt
/// with the min/max used for every tile. Error tiles map |e| / max|e| to
/// gray, so an exact prediction gives a black tile.
void render_fields(const FieldSet& pred, const FieldSet* target, const std::filesystem::path& dir,
                   const std::string& stem);

}  // namespace nspf
