#pragma once

#include <span>
#include <vector>

#include "amr/common/rng.hpp"
#include "amr/sigsynth/modulation.hpp"
#include "amr/sigsynth/waveform.hpp"

namespace amr::sigsynth {

struct AnalogParams {
  double am_index = 0.5;       // AM-DSB modulation depth k
  double fm_deviation = 0.2;   // WBFM peak deviation, cycles/sample at |m| = 1
  int hilbert_taps = 127;      // odd length quadrature filter for AM-SSB
  bool normalize = true;
};

/// Analog modulation of a real message with max |m| <= 1.
Waveform modulate_analog(Modulation scheme, std::span<const double> message,
                         const AnalogParams& params = {});

/// Windowed FIR Hilbert transformer (odd length, antisymmetric).
std::vector<double> hilbert_taps(int length);

/// Band-limited Gaussian noise: white noise through a windowed-sinc low-pass
/// at `cutoff` cycles/sample, scaled so that max |m| = 1.
std::vector<double> bandlimited_message(std::size_t n, Rng& rng, double cutoff = 0.125);

}  // namespace amr::sigsynth
