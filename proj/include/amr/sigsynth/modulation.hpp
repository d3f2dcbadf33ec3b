#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace amr::sigsynth {

/// The eleven benchmark modulation schemes. The underlying value is the class
/// index stored in native dataset files.
enum class Modulation : std::uint8_t {
  WBFM = 0,
  AM_DSB,
  AM_SSB,
  BPSK,
  QPSK,
  PSK8,
  QAM16,
  QAM64,
  PAM4,
  GFSK,
  CPFSK,
};

enum class ModKind { analog, digital };

inline constexpr std::size_t kNumModulations = 11;

inline constexpr std::array<Modulation, kNumModulations> kAllModulations = {
    Modulation::WBFM,  Modulation::AM_DSB, Modulation::AM_SSB, Modulation::BPSK,
    Modulation::QPSK,  Modulation::PSK8,   Modulation::QAM16,  Modulation::QAM64,
    Modulation::PAM4,  Modulation::GFSK,   Modulation::CPFSK,
};

/// Column order used by the per-modulation accuracy table.
inline constexpr std::array<Modulation, kNumModulations> kTableOrder = {
    Modulation::WBFM,  Modulation::AM_DSB, Modulation::BPSK,   Modulation::QPSK,
    Modulation::PSK8,  Modulation::QAM64,  Modulation::CPFSK,  Modulation::AM_SSB,
    Modulation::PAM4,  Modulation::GFSK,   Modulation::QAM16,
};

constexpr std::size_t index_of(Modulation m) noexcept { return static_cast<std::size_t>(m); }

std::string_view name(Modulation m) noexcept;

/// Accepts canonical names ("8PSK", "AM-DSB", ...) and common spellings
/// ("PSK8", "AM_DSB", "QAM-16", lowercase variants).
std::optional<Modulation> parse_modulation(std::string_view text) noexcept;

std::optional<Modulation> modulation_from_index(std::size_t index) noexcept;

ModKind kind(Modulation m) noexcept;

/// Bits carried by one symbol of a digital scheme; 0 for analog schemes.
int bits_per_symbol(Modulation m) noexcept;

}  // namespace amr::sigsynth
