#pragma once

#include <complex>
#include <vector>

namespace amr::sigsynth {

using cplx = std::complex<double>;

struct Waveform {
  std::vector<cplx> samples;
  double sample_rate = 1.0;  // nominal; only ratios matter

  std::size_t size() const noexcept { return samples.size(); }
  double mean_power() const noexcept;
};

/// Scales to unit mean power. Returns false (and leaves the samples alone)
/// when the waveform has zero power.
bool normalize_power(Waveform& w) noexcept;

}  // namespace amr::sigsynth
