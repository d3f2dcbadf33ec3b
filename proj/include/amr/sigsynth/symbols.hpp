#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amr/sigsynth/modulation.hpp"
#include "amr/sigsynth/waveform.hpp"

namespace amr::sigsynth {

/// Constellation point for every bit pattern of a digital scheme, indexed by
/// the pattern read MSB-first. Unit average energy; GFSK/CPFSK return the
/// two frequency symbols {+1, -1}.
std::vector<cplx> constellation(Modulation scheme);

/// Gray-mapped symbols. `bits` holds one bit per element (0/1), MSB-first
/// within each symbol.
std::vector<cplx> map_symbols(Modulation scheme, std::span<const std::uint8_t> bits);

}  // namespace amr::sigsynth
