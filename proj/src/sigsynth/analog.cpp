#include "amr/sigsynth/analog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "amr/common/error.hpp"

namespace amr::sigsynth {

namespace {

constexpr double pi = std::numbers::pi;

double blackman(int i, int n) {
  const double x = static_cast<double>(i) / (n - 1);
  return 0.42 - 0.5 * std::cos(2.0 * pi * x) + 0.08 * std::cos(4.0 * pi * x);
}

}  // namespace

std::vector<double> hilbert_taps(int length) {
  if (length < 3 || length % 2 == 0) throw InvalidInput("Hilbert filter length must be odd and >= 3");
  const int center = length / 2;
  std::vector<double> taps(static_cast<std::size_t>(length), 0.0);
  for (int i = 0; i < length; ++i) {
    const int k = i - center;
    if (k % 2 != 0) taps[i] = 2.0 / (pi * k) * blackman(i, length);
  }
  return taps;
}

std::vector<double> bandlimited_message(std::size_t n, Rng& rng, double cutoff) {
  if (!(cutoff > 0.0 && cutoff < 0.5)) throw InvalidInput("cutoff must lie in (0, 0.5)");
  constexpr int kTaps = 65;
  constexpr int kHalf = kTaps / 2;
  std::vector<double> lp(kTaps);
  for (int i = 0; i < kTaps; ++i) {
    const int k = i - kHalf;
    const double sinc = (k == 0) ? 2.0 * cutoff : std::sin(2.0 * pi * cutoff * k) / (pi * k);
    lp[i] = sinc * blackman(i, kTaps);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> white(n + kTaps - 1);
  for (auto& x : white) x = gauss(rng);
  std::vector<double> msg(n, 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < kTaps; ++j) acc += lp[j] * white[i + static_cast<std::size_t>(j)];
    msg[i] = acc;
    peak = std::max(peak, std::abs(acc));
  }
  if (peak > 0.0) {
    for (auto& x : msg) x /= peak;
  }
  return msg;
}

Waveform modulate_analog(Modulation scheme, std::span<const double> message,
                         const AnalogParams& params) {
  if (kind(scheme) != ModKind::analog) {
    throw WrongKind(std::string("modulate_analog needs an analog scheme, got ") +
                    std::string(name(scheme)));
  }
  for (double m : message) {
    if (!(std::abs(m) <= 1.0 + 1e-12)) throw InvalidInput("message exceeds |m| <= 1");
  }
  const std::size_t n = message.size();
  Waveform w;
  w.samples.resize(n);
  switch (scheme) {
    case Modulation::WBFM: {
      double phase = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        phase += 2.0 * pi * params.fm_deviation * message[i];
        w.samples[i] = std::polar(1.0, phase);
      }
      break;
    }
    case Modulation::AM_DSB:
      for (std::size_t i = 0; i < n; ++i) w.samples[i] = cplx(1.0 + params.am_index * message[i], 0.0);
      break;
    case Modulation::AM_SSB: {
      // Analytic signal m + j*H{m}; the in-phase branch is delayed to match the filter.
      const auto taps = hilbert_taps(params.hilbert_taps);
      const long half = static_cast<long>(taps.size() / 2);
      for (long i = 0; i < static_cast<long>(n); ++i) {
        double q = 0.0;
        for (long j = -half; j <= half; ++j) {
          const long k = i - j;
          if (k >= 0 && k < static_cast<long>(n)) q += taps[static_cast<std::size_t>(j + half)] * message[static_cast<std::size_t>(k)];
        }
        w.samples[static_cast<std::size_t>(i)] = cplx(message[static_cast<std::size_t>(i)], q);
      }
      break;
    }
    default:
      break;
  }
  if (params.normalize) normalize_power(w);
  return w;
}

}  // namespace amr::sigsynth
