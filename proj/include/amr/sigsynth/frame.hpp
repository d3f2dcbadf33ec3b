#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "amr/sigsynth/analog.hpp"
#include "amr/sigsynth/modulation.hpp"
#include "amr/sigsynth/waveform.hpp"

namespace amr::sigsynth {

inline constexpr int kFrameLength = 128;

/// 2x128 frame: I row (samples 0..127) then Q row (128..255).
using FrameIQ = std::array<float, 2 * kFrameLength>;

struct SynthParams {
  int sps = 8;
  double rolloff = 0.35;
  int rrc_span = 8;
  double gfsk_h = 0.5;
  double gfsk_bt = 0.35;
  double cpfsk_h = 0.5;
  AnalogParams analog{};
  int guard_symbols = 8;  // extra symbols each side, cropped away with the filter transients
  bool enable_cfo = false;
  double cfo_max = 0.01;  // |cfo| drawn uniformly up to this, cycles/sample
  bool enable_timing_offset = false;
};

/// Noise-free unit-power frame of `scheme`.
Waveform synthesize_clean(Modulation scheme, const SynthParams& params, Rng& rng);

/// Complete labeled-frame payload; deterministic in (scheme, snr_db, seed).
FrameIQ synthesize_frame(Modulation scheme, double snr_db, std::uint64_t seed,
                         const SynthParams& params = {});

/// Clean and noisy versions of the same frame, for calibration checks.
struct FramePair {
  Waveform clean;
  Waveform noisy;
};
FramePair synthesize_frame_pair(Modulation scheme, double snr_db, std::uint64_t seed,
                                const SynthParams& params = {});

/// JSON description of the generator settings and SNR definition.
std::string describe(const SynthParams& params);

}  // namespace amr::sigsynth
