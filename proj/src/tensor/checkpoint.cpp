#include "amr/tensor/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "amr/common/binary_io.hpp"
#include "amr/common/error.hpp"

namespace amr {

namespace {
constexpr char kMagic[4] = {'A', 'M', 'R', 'C'};
}

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  os.write(kMagic, 4);
  io::put<std::uint16_t>(os, kCheckpointVersion);
  io::put<std::uint64_t>(os, ckpt.config_hash);
  io::put<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const auto& a : ckpt.arrays) {
    io::put<std::uint32_t>(os, static_cast<std::uint32_t>(a.name.size()));
    os.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    io::put<std::uint32_t>(os, static_cast<std::uint32_t>(a.shape.size()));
    for (std::size_t d : a.shape) io::put<std::uint64_t>(os, d);
    os.write(reinterpret_cast<const char*>(a.values.data()),
             static_cast<std::streamsize>(a.values.size() * sizeof(float)));
  }
  if (!os) throw IoError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& is) {
  char magic[4];
  io::get_bytes(is, magic, 4, "checkpoint magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError(FormatFault::bad_magic, "not a checkpoint (bad magic)");
  const auto version = io::get<std::uint16_t>(is, "checkpoint version");
  if (version != kCheckpointVersion)
    throw FormatError(FormatFault::version_mismatch, "unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.config_hash = io::get<std::uint64_t>(is, "config hash");
  const auto count = io::get<std::uint32_t>(is, "array count");
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedArray a;
    const auto len = io::get<std::uint32_t>(is, "array name length");
    if (len > 4096) throw FormatError(FormatFault::malformed, "implausible array name length");
    a.name.resize(len);
    io::get_bytes(is, a.name.data(), len, "array name");
    const auto rank = io::get<std::uint32_t>(is, "array rank");
    if (rank > 8) throw FormatError(FormatFault::malformed, "implausible array rank");
    for (std::uint32_t d = 0; d < rank; ++d) a.shape.push_back(io::get<std::uint64_t>(is, "array dims"));
    const std::size_t n = shape_size(a.shape);
    if (n > (std::size_t{1} << 32)) throw FormatError(FormatFault::malformed, "implausible array size");
    a.values.resize(n);
    io::get_bytes(is, reinterpret_cast<char*>(a.values.data()), n * sizeof(float), "array values");
    ckpt.arrays.push_back(std::move(a));
  }
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(os, ckpt);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_checkpoint(is);
}

template <typename T>
Checkpoint snapshot(Model<T>& model, std::uint64_t config_hash) {
  Checkpoint c{config_hash, {}};
  for (const auto& p : model.parameters())
    c.arrays.push_back({p.name, p.value->shape, std::vector<float>(p.value->data.begin(), p.value->data.end())});
  return c;
}

template <typename T>
void restore(Model<T>& model, const Checkpoint& ckpt, std::uint64_t config_hash) {
  if (ckpt.config_hash != config_hash) throw ConsistencyError("checkpoint was written for a different config");
  auto params = model.parameters();
  if (params.size() != ckpt.arrays.size())
    throw ConsistencyError("checkpoint holds " + std::to_string(ckpt.arrays.size()) + " arrays, model has " +
                           std::to_string(params.size()));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& a = ckpt.arrays[k];
    if (a.name != params[k].name || a.shape != params[k].value->shape)
      throw ConsistencyError("checkpoint array '" + a.name + "' does not match '" + params[k].name + "'");
  }
  for (std::size_t k = 0; k < params.size(); ++k)
    std::copy(ckpt.arrays[k].values.begin(), ckpt.arrays[k].values.end(), params[k].value->data.begin());
  model.mark_updated();
}

template Checkpoint snapshot(Model<float>&, std::uint64_t);
template Checkpoint snapshot(Model<double>&, std::uint64_t);
template void restore(Model<float>&, const Checkpoint&, std::uint64_t);
template void restore(Model<double>&, const Checkpoint&, std::uint64_t);

}  // namespace amr
