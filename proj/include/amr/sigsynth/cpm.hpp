#pragma once

#include <span>

#include "amr/sigsynth/modulation.hpp"
#include "amr/sigsynth/waveform.hpp"

namespace amr::sigsynth {

/// Continuous-phase FSK. The per-sample frequency is the +/-1 symbol stream
/// (Gaussian-filtered with bandwidth-time product `bt` for GFSK) and the
/// phase advances by pi*h per symbol. |s| = 1 for every sample.
Waveform modulate_cpm(Modulation scheme, std::span<const double> freq_symbols, int sps,
                      double h, double bt);

/// Gaussian frequency-pulse filter (sum of taps = 1) spanning +/-2 symbols.
std::vector<double> gaussian_taps(int sps, double bt);

}  // namespace amr::sigsynth
