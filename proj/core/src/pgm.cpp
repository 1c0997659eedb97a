#include <bit>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "nspf/error.hpp"
#include "nspf/io.hpp"

namespace nspf::io {
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "NSF1/NSP1 writers assume a little-endian host");

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_pgm(const fs::path& path, const PixelGrid<std::uint8_t>& img, int maxval) {
  std::ostringstream out;
  out << "P2\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  for (int j = img.height() - 1; j >= 0; --j) {
    for (int i = 0; i < img.width(); ++i) {
      if (i) out << ' ';
      out << static_cast<int>(img(i, j));
    }
    out << '\n';
  }
  write_text(path, out.str());
}

PixelGrid<std::uint8_t> read_pgm(const fs::path& path) {
  std::istringstream in(read_text(path));
  auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError("truncated PGM " + path.string());
  };
  if (next_token() != "P2") throw IoError("not an ASCII PGM (P2): " + path.string());
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) throw IoError("bad PGM header in " + path.string());
  PixelGrid<std::uint8_t> img(w, h);
  for (int j = h - 1; j >= 0; --j) {
    for (int i = 0; i < w; ++i) {
      const int v = std::stoi(next_token());
      if (v < 0 || v > maxval) throw IoError("PGM value out of range in " + path.string());
      img(i, j) = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void write_geometry(const fs::path& path, const GeometryImage& img) { write_pgm(path, img, 1); }

GeometryImage read_geometry(const fs::path& path) {
  auto raw = read_pgm(path);
  GeometryImage img(raw.width(), raw.height());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (raw[k] > 1) throw IoError("geometry image must be binary: " + path.string());
    img[k] = raw[k];
  }
  return img;
}

void write_boundary(const fs::path& path, const BoundaryImage& img) { write_pgm(path, img, code::max_code); }

BoundaryImage read_boundary(const fs::path& path) {
  auto raw = read_pgm(path);
  BoundaryImage img(raw.width(), raw.height());
  for (std::size_t k = 0; k < raw.size(); ++k) img[k] = raw[k];
  return img;
}

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  buf.append(b, 4);
}

std::uint32_t get_u32(const std::string& buf, std::size_t& pos) {
  if (pos + 4 > buf.size()) throw IoError("truncated binary file");
  std::uint32_t v;
  std::memcpy(&v, buf.data() + pos, 4);
  pos += 4;
  return v;
}

}  // namespace

void write_nsf(const fs::path& path, const std::vector<const Field*>& channels) {
  if (channels.empty()) throw ValidationError("NSF1 needs at least one channel");
  const int w = channels.front()->width();
  const int h = channels.front()->height();
  std::string buf = "NSF1";
  put_u32(buf, static_cast<std::uint32_t>(channels.size()));
  put_u32(buf, static_cast<std::uint32_t>(w));
  put_u32(buf, static_cast<std::uint32_t>(h));
  buf.reserve(buf.size() + channels.size() * w * h * 8);
  for (const Field* f : channels) {
    if (f->width() != w || f->height() != h) throw ValidationError("NSF1 channels differ in shape");
    for (int j = h - 1; j >= 0; --j) {
      for (int i = 0; i < w; ++i) {
        const double v = (*f)(i, j);
        char b[8];
        std::memcpy(b, &v, 8);
        buf.append(b, 8);
      }
    }
  }
  write_text(path, buf);
}

std::vector<Field> read_nsf(const fs::path& path) {
  const std::string buf = read_text(path);
  if (buf.size() < 16 || buf.compare(0, 4, "NSF1") != 0) throw IoError("not an NSF1 file: " + path.string());
  std::size_t pos = 4;
  const auto d = get_u32(buf, pos);
  const auto w = static_cast<int>(get_u32(buf, pos));
  const auto h = static_cast<int>(get_u32(buf, pos));
  if (buf.size() != 16 + static_cast<std::size_t>(d) * w * h * 8) throw IoError("NSF1 size mismatch: " + path.string());
  std::vector<Field> out;
  for (std::uint32_t c = 0; c < d; ++c) {
    Field f(w, h);
    for (int j = h - 1; j >= 0; --j) {
      for (int i = 0; i < w; ++i) {
        std::memcpy(&f(i, j), buf.data() + pos, 8);
        pos += 8;
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

void write_fieldset(const fs::path& path, const FieldSet& f) { write_nsf(path, {&f.u, &f.v, &f.p}); }

FieldSet read_fieldset(const fs::path& path) {
  auto ch = read_nsf(path);
  if (ch.size() != 3) throw IoError("expected 3 channels in " + path.string());
  FieldSet out;
  out.u = std::move(ch[0]);
  out.v = std::move(ch[1]);
  out.p = std::move(ch[2]);
  out.u.quantity = Quantity::u;
  out.v.quantity = Quantity::v;
  out.p.quantity = Quantity::p;
  return out;
}

std::string polygon_to_json(const Polygon& poly) {
  nlohmann::ordered_json j;
  j["center"] = {poly.center.x, poly.center.y};
  auto verts = nlohmann::ordered_json::array();
  for (const auto& p : poly.vertices) verts.push_back({p.x, p.y});
  j["vertices"] = std::move(verts);
  return j.dump(2) + "\n";
}

Polygon polygon_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Polygon poly;
    poly.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
    for (const auto& v : j.at("vertices")) poly.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    return poly;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad polygon JSON: ") + e.what());
  }
}

void write_polygon(const fs::path& path, const Polygon& poly) { write_text(path, polygon_to_json(poly)); }
Polygon read_polygon(const fs::path& path) { return polygon_from_json(read_text(path)); }

}  // namespace nspf::io
