#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "amr/dataset/dataset.hpp"

namespace amr::dataset {

// Native corpus file, little-endian:
//   "AMRD" | u16 version=1 | u32 metadata length | metadata UTF-8 |
//   u32 frame count | frames: u8 class, i8 snr_db, 256 x f32 (I row, Q row)
inline constexpr char kNativeMagic[4] = {'A', 'M', 'R', 'D'};
inline constexpr std::uint16_t kNativeVersion = 1;
inline constexpr std::size_t kFrameRecordBytes = 2 + 256 * sizeof(float);

void write_native(const Dataset& ds, std::ostream& os);
void write_native(const Dataset& ds, const std::filesystem::path& path);

/// Throws FormatError (bad magic / version mismatch / truncated / malformed);
/// nothing is returned on failure.
Dataset read_native(std::istream& is);
Dataset read_native(const std::filesystem::path& path);

}  // namespace amr::dataset
