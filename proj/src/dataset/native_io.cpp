#include "amr/dataset/native_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "amr/common/binary_io.hpp"
#include "amr/common/error.hpp"

namespace amr::dataset {

void write_native(const Dataset& ds, std::ostream& os) {
  if (ds.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidInput("too many frames for the native format");
  }
  os.write(kNativeMagic, 4);
  io::put<std::uint16_t>(os, kNativeVersion);
  io::put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.metadata.size()));
  os.write(ds.metadata.data(), static_cast<std::streamsize>(ds.metadata.size()));
  io::put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.size()));
  for (const auto& f : ds.frames) {
    io::put<std::uint8_t>(os, static_cast<std::uint8_t>(f.scheme));
    io::put<std::int8_t>(os, f.snr_db);
    os.write(reinterpret_cast<const char*>(f.iq.data()),
             static_cast<std::streamsize>(f.iq.size() * sizeof(float)));
  }
  if (!os) throw IoError("failed writing native dataset");
}

void write_native(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_native(ds, os);
}

Dataset read_native(std::istream& is) {
  char magic[4];
  io::get_bytes(is, magic, 4, "magic");
  if (std::memcmp(magic, kNativeMagic, 4) != 0) {
    throw FormatError(FormatFault::bad_magic, "not a native AMRD dataset (bad magic)");
  }
  const auto version = io::get<std::uint16_t>(is, "version");
  if (version != kNativeVersion) {
    throw FormatError(FormatFault::version_mismatch,
                      "unsupported AMRD version " + std::to_string(version));
  }
  const auto meta_len = io::get<std::uint32_t>(is, "metadata length");
  if (meta_len > (1u << 26)) throw FormatError(FormatFault::malformed, "metadata length is implausible");
  Dataset ds;
  ds.metadata.resize(meta_len);
  io::get_bytes(is, ds.metadata.data(), meta_len, "metadata");
  const auto count = io::get<std::uint32_t>(is, "frame count");
  // Grow as records arrive so a corrupt count cannot force a huge allocation.
  ds.frames.reserve(std::min<std::uint32_t>(count, 1u << 16));
  for (std::uint32_t i = 0; i < count; ++i) {
    auto& f = ds.frames.emplace_back();
    const auto cls = io::get<std::uint8_t>(is, "frame class");
    const auto m = sigsynth::modulation_from_index(cls);
    if (!m) {
      throw FormatError(FormatFault::malformed,
                        "frame " + std::to_string(i) + " has class index " + std::to_string(cls));
    }
    f.scheme = *m;
    f.snr_db = io::get<std::int8_t>(is, "frame snr");
    io::get_bytes(is, reinterpret_cast<char*>(f.iq.data()), f.iq.size() * sizeof(float), "frame samples");
  }
  return ds;
}

Dataset read_native(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_native(is);
}

}  // namespace amr::dataset
