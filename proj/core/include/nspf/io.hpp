#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nspf/fields.hpp"
#include "nspf/geometry.hpp"
#include "nspf/grid.hpp"

namespace nspf::io {

/// ASCII PGM ("P2"). Row 0 of the file is the top of the channel (largest y).
void write_pgm(const std::filesystem::path& path, const PixelGrid<std::uint8_t>& img, int maxval);
PixelGrid<std::uint8_t> read_pgm(const std::filesystem::path& path);

void write_geometry(const std::filesystem::path& path, const GeometryImage& img);
GeometryImage read_geometry(const std::filesystem::path& path);
void write_boundary(const std::filesystem::path& path, const BoundaryImage& img);
BoundaryImage read_boundary(const std::filesystem::path& path);

/// NSF1 container: "NSF1", u32 d, u32 w, u32 h, then d*w*h little-endian f64,
/// channel-major, rows top to bottom as in the PGM images.
void write_nsf(const std::filesystem::path& path, const std::vector<const Field*>& channels);
std::vector<Field> read_nsf(const std::filesystem::path& path);
void write_fieldset(const std::filesystem::path& path, const FieldSet& fs);
FieldSet read_fieldset(const std::filesystem::path& path);

std::string polygon_to_json(const Polygon& poly);
Polygon polygon_from_json(const std::string& text);
void write_polygon(const std::filesystem::path& path, const Polygon& poly);
Polygon read_polygon(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nspf::io
