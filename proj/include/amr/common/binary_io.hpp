#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "amr/common/error.hpp"

namespace amr::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written with native little-endian stores");

template <typename T>
  requires std::is_trivially_copyable_v<T>
void put(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
T get(std::istream& is, const char* what) {
  T value{};
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw FormatError(FormatFault::truncated, std::string("truncated while reading ") + what);
  }
  return value;
}

inline void get_bytes(std::istream& is, char* dst, std::size_t n, const char* what) {
  if (!is.read(dst, static_cast<std::streamsize>(n))) {
    throw FormatError(FormatFault::truncated, std::string("truncated while reading ") + what);
  }
}

}  // namespace amr::io
