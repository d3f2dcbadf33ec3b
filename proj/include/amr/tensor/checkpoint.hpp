#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "amr/tensor/model.hpp"

namespace amr {

/// Checkpoint layout (little-endian): magic "AMRC", u16 version = 1,
/// u64 config hash, u32 array count, then per array: u32 name length,
/// name bytes, u32 rank, rank x u64 dims, f32 values.
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct NamedArray {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::vector<NamedArray> arrays;
};

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

template <typename T>
Checkpoint snapshot(Model<T>& model, std::uint64_t config_hash);

/// Loads values into the model; throws ConsistencyError when the hash,
/// names or shapes do not match.
template <typename T>
void restore(Model<T>& model, const Checkpoint& ckpt, std::uint64_t config_hash);

}  // namespace amr
