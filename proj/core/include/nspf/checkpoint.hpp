#pragma once

#include <filesystem>
#include <string>

#include "nspf/model.hpp"

namespace nspf {

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

/// NSP1 tensor container: "NSP1", u32 count, then per tensor u32 name length,
/// name bytes, u32 rank, u32 dims, f64 data (all little-endian).
std::string encode_params(const ModelParams& params);
ModelParams decode_params(const std::string& bytes);

/// Writes <dir>/config.json and <dir>/params.nsp.
void write_checkpoint(const std::filesystem::path& dir, const ModelConfig& config, const ModelParams& params);
/// Reads a checkpoint and checks tensor names and shapes against the config.
Checkpoint read_checkpoint(const std::filesystem::path& dir);

}  // namespace nspf
