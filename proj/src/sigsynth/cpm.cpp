#include "amr/sigsynth/cpm.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "amr/common/error.hpp"

namespace amr::sigsynth {

std::vector<double> gaussian_taps(int sps, double bt) {
  if (!(bt > 0.0)) throw InvalidInput("GFSK bandwidth-time product must be positive");
  const int half = 2 * sps;
  // standard deviation of the Gaussian filter, in samples
  const double sigma = std::sqrt(std::log(2.0)) / (2.0 * std::numbers::pi * bt) * sps;
  std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double x = static_cast<double>(i) / sigma;
    const double v = std::exp(-0.5 * x * x);
    taps[static_cast<std::size_t>(i + half)] = v;
    sum += v;
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

Waveform modulate_cpm(Modulation scheme, std::span<const double> freq_symbols, int sps, double h,
                      double bt) {
  if (scheme != Modulation::GFSK && scheme != Modulation::CPFSK) {
    throw WrongKind(std::string("modulate_cpm needs GFSK or CPFSK, got ") + std::string(name(scheme)));
  }
  if (!(h > 0.0)) throw InvalidInput("modulation index h must be positive");
  if (sps < 1) throw InvalidInput("sps must be >= 1");
  for (double a : freq_symbols) {
    if (a != 1.0 && a != -1.0) throw InvalidInput("frequency symbols must be +1 or -1");
  }

  const std::size_t n = freq_symbols.size() * static_cast<std::size_t>(sps);
  std::vector<double> freq(n);
  for (std::size_t i = 0; i < n; ++i) freq[i] = freq_symbols[i / static_cast<std::size_t>(sps)];

  if (scheme == Modulation::GFSK) {
    const auto taps = gaussian_taps(sps, bt);
    const long half = static_cast<long>(taps.size() / 2);
    std::vector<double> filtered(n, 0.0);
    for (long i = 0; i < static_cast<long>(n); ++i) {
      double acc = 0.0;
      for (long j = -half; j <= half; ++j) {
        const long k = i - j;
        if (k >= 0 && k < static_cast<long>(n)) acc += taps[static_cast<std::size_t>(j + half)] * freq[static_cast<std::size_t>(k)];
      }
      filtered[static_cast<std::size_t>(i)] = acc;
    }
    freq.swap(filtered);
  }

  Waveform w;
  w.samples.resize(n);
  const double step = std::numbers::pi * h / sps;
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phase += step * freq[i];
    w.samples[i] = cplx(std::cos(phase), std::sin(phase));
  }
  return w;
}

}  // namespace amr::sigsynth
