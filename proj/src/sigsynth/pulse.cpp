#include "amr/sigsynth/pulse.hpp"

#include <cmath>
#include <numbers>

#include "amr/common/error.hpp"

namespace amr::sigsynth {

namespace {

// RRC impulse response at t (in symbol periods), unnormalized.
double rrc_value(double t, double beta) {
  constexpr double pi = std::numbers::pi;
  if (std::abs(t) < 1e-12) return 1.0 - beta + 4.0 * beta / pi;
  const double singular = 1.0 / (4.0 * beta);
  if (std::abs(std::abs(t) - singular) < 1e-9) {
    return beta / std::sqrt(2.0) *
           ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) +
            (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
  }
  const double num = std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
  const double den = pi * t * (1.0 - 16.0 * beta * beta * t * t);
  return num / den;
}

}  // namespace

std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols) {
  if (sps < 2) throw InvalidInput("sps must be >= 2");
  if (!(rolloff > 0.0 && rolloff < 1.0)) throw InvalidInput("rolloff must lie in (0, 1)");
  if (span_symbols < 2 || span_symbols % 2 != 0) throw InvalidInput("span must be even and >= 2");
  const int n = span_symbols * sps + 1;
  const int center = n / 2;
  std::vector<double> taps(static_cast<std::size_t>(n));
  double energy = 0.0;
  for (int i = 0; i < n; ++i) {
    taps[i] = rrc_value(static_cast<double>(i - center) / sps, rolloff);
    energy += taps[i] * taps[i];
  }
  const double g = 1.0 / std::sqrt(energy);
  for (auto& t : taps) t *= g;
  return taps;
}

Waveform pulse_shape(std::span<const cplx> symbols, int sps, double rolloff, int span_symbols) {
  if (symbols.empty()) throw InvalidInput("pulse_shape needs at least one symbol");
  const auto taps = rrc_taps(sps, rolloff, span_symbols);
  const long delay = static_cast<long>(taps.size() / 2);
  const long out_len = static_cast<long>(symbols.size()) * sps;
  Waveform w;
  w.samples.assign(static_cast<std::size_t>(out_len), cplx{});
  // Output sample n collects symbol k through tap (n - k*sps + delay).
  for (long k = 0; k < static_cast<long>(symbols.size()); ++k) {
    const cplx s = symbols[static_cast<std::size_t>(k)];
    if (s == cplx{}) continue;
    const long first = std::max(0L, k * sps - delay);
    const long last = std::min(out_len - 1, k * sps + delay);
    for (long n = first; n <= last; ++n) {
      w.samples[static_cast<std::size_t>(n)] += s * taps[static_cast<std::size_t>(n - k * sps + delay)];
    }
  }
  normalize_power(w);
  return w;
}

}  // namespace amr::sigsynth
