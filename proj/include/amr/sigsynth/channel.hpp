#pragma once

#include <cstdint>

#include "amr/sigsynth/waveform.hpp"

namespace amr::sigsynth {

struct ChannelParams {
  double snr_db = 0.0;
  bool enable_cfo = false;
  double cfo_fraction = 0.0;  // cycles/sample
  bool enable_timing_offset = false;
  std::uint64_t rng_seed = 0;
};

/// Per-complex-sample noise variance for a unit-power signal.
double noise_variance(double snr_db) noexcept;

/// Adds circular complex Gaussian noise with variance 10^(-snr/10). The input
/// must be unit-power (within [0.9, 1.1]); this is what makes the SNR exact.
/// Optional impairments, applied before noise: a random fractional-sample
/// delay (linear interpolation) and a carrier frequency offset ramp.
Waveform apply_awgn(const Waveform& waveform, const ChannelParams& channel);

}  // namespace amr::sigsynth
