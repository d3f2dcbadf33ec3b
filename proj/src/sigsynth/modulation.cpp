#include "amr/sigsynth/modulation.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace amr::sigsynth {

namespace {

constexpr std::array<std::string_view, kNumModulations> kNames = {
    "WBFM", "AM-DSB", "AM-SSB", "BPSK", "QPSK", "8PSK",
    "QAM16", "QAM64", "PAM4", "GFSK", "CPFSK",
};

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view name(Modulation m) noexcept { return kNames[index_of(m)]; }

std::optional<Modulation> parse_modulation(std::string_view text) noexcept {
  const std::string key = squash(text);
  for (auto m : kAllModulations) {
    if (squash(name(m)) == key) return m;
  }
  if (key == "PSK8") return Modulation::PSK8;
  if (key == "FM") return Modulation::WBFM;
  return std::nullopt;
}

std::optional<Modulation> modulation_from_index(std::size_t index) noexcept {
  if (index >= kNumModulations) return std::nullopt;
  return static_cast<Modulation>(index);
}

ModKind kind(Modulation m) noexcept {
  switch (m) {
    case Modulation::WBFM:
    case Modulation::AM_DSB:
    case Modulation::AM_SSB:
      return ModKind::analog;
    default:
      return ModKind::digital;
  }
}

int bits_per_symbol(Modulation m) noexcept {
  switch (m) {
    case Modulation::BPSK: return 1;
    case Modulation::QPSK: return 2;
    case Modulation::PSK8: return 3;
    case Modulation::QAM16: return 4;
    case Modulation::QAM64: return 6;
    case Modulation::PAM4: return 2;
    case Modulation::GFSK:
    case Modulation::CPFSK: return 1;
    default: return 0;
  }
}

}  // namespace amr::sigsynth
