#include "amr/sigsynth/channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "amr/common/error.hpp"
#include "amr/common/rng.hpp"

namespace amr::sigsynth {

double noise_variance(double snr_db) noexcept { return std::pow(10.0, -snr_db / 10.0); }

Waveform apply_awgn(const Waveform& waveform, const ChannelParams& channel) {
  const double p = waveform.mean_power();
  if (!(p >= 0.9 && p <= 1.1)) {
    std::ostringstream msg;
    msg << "apply_awgn expects a unit-power waveform, got mean power " << p;
    throw CalibrationError(msg.str());
  }
  Rng rng(channel.rng_seed);
  Waveform out = waveform;
  const std::size_t n = out.samples.size();

  if (channel.enable_timing_offset && n > 1) {
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const double mu = frac(rng);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      out.samples[i] = (1.0 - mu) * waveform.samples[i] + mu * waveform.samples[i + 1];
    }
  }
  if (channel.enable_cfo) {
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] *= std::polar(1.0, 2.0 * std::numbers::pi * channel.cfo_fraction * static_cast<double>(i));
    }
  }

  const double sigma = std::sqrt(noise_variance(channel.snr_db) / 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& s : out.samples) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    s += cplx(sigma * re, sigma * im);
  }
  return out;
}

}  // namespace amr::sigsynth
