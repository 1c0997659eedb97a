#include "nspf/checkpoint.hpp"

#include <cstring>

#include "nspf/config.hpp"
#include "nspf/error.hpp"
#include "nspf/io.hpp"

namespace nspf {

namespace {

void put_u32(std::string& b, std::uint32_t v) {
  char c[4];
  std::memcpy(c, &v, 4);
  b.append(c, 4);
}

std::uint32_t get_u32(const std::string& b, std::size_t& pos) {
  if (pos + 4 > b.size()) throw IoError("truncated NSP1 data");
  std::uint32_t v;
  std::memcpy(&v, b.data() + pos, 4);
  pos += 4;
  return v;
}

}  // namespace

std::string encode_params(const ModelParams& params) {
  std::string b = "NSP1";
  put_u32(b, static_cast<std::uint32_t>(params.tensors.size()));
  for (const auto& t : params.tensors) {
    put_u32(b, static_cast<std::uint32_t>(t.name.size()));
    b += t.name;
    put_u32(b, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) put_u32(b, static_cast<std::uint32_t>(d));
    const std::size_t off = b.size();
    b.resize(off + t.data.size() * sizeof(double));
    std::memcpy(b.data() + off, t.data.data(), t.data.size() * sizeof(double));
  }
  return b;
}

ModelParams decode_params(const std::string& b) {
  if (b.size() < 8 || b.compare(0, 4, "NSP1") != 0) throw IoError("not an NSP1 parameter file");
  std::size_t pos = 4;
  const auto count = get_u32(b, pos);
  ModelParams p;
  for (std::uint32_t k = 0; k < count; ++k) {
    Tensor t;
    const auto len = get_u32(b, pos);
    if (pos + len > b.size()) throw IoError("truncated NSP1 data");
    t.name = b.substr(pos, len);
    pos += len;
    const auto rank = get_u32(b, pos);
    for (std::uint32_t r = 0; r < rank; ++r) t.shape.push_back(static_cast<int>(get_u32(b, pos)));
    t.data.resize(shape_size(t.shape));
    const std::size_t bytes = t.data.size() * sizeof(double);
    if (pos + bytes > b.size()) throw IoError("truncated NSP1 data");
    std::memcpy(t.data.data(), b.data() + pos, bytes);
    pos += bytes;
    p.tensors.push_back(std::move(t));
  }
  if (pos != b.size()) throw IoError("trailing bytes in NSP1 data");
  return p;
}

void write_checkpoint(const std::filesystem::path& dir, const ModelConfig& config, const ModelParams& params) {
  std::filesystem::create_directories(dir);
  io::write_text(dir / "config.json", to_json(config).dump(2) + "\n");
  io::write_text(dir / "params.nsp", encode_params(params));
}

Checkpoint read_checkpoint(const std::filesystem::path& dir) {
  Checkpoint c;
  try {
    c.config = model_config_from_json(nlohmann::ordered_json::parse(io::read_text(dir / "config.json")));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint config: ") + e.what());
  }
  c.params = decode_params(io::read_text(dir / "params.nsp"));
  const ModelParams expected = build_model(c.config);
  if (expected.tensors.size() != c.params.tensors.size()) {
    throw ValidationError("checkpoint tensor count does not match its config");
  }
  for (std::size_t k = 0; k < expected.tensors.size(); ++k) {
    if (expected.tensors[k].name != c.params.tensors[k].name ||
        expected.tensors[k].shape != c.params.tensors[k].shape) {
      throw ValidationError("checkpoint tensor " + c.params.tensors[k].name + " does not match its config");
    }
  }
  return c;
}

}  // namespace nspf
