#include "amr/sigsynth/waveform.hpp"

#include <cmath>
#include <numeric>

namespace amr::sigsynth {

double Waveform::mean_power() const noexcept {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : samples) acc += std::norm(s);
  return acc / static_cast<double>(samples.size());
}

bool normalize_power(Waveform& w) noexcept {
  const double p = w.mean_power();
  if (!(p > 0.0)) return false;
  const double g = 1.0 / std::sqrt(p);
  for (auto& s : w.samples) s *= g;
  return true;
}

}  // namespace amr::sigsynth
