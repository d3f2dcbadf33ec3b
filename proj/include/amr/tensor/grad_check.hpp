#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amr/tensor/layer_spec.hpp"

namespace amr {

struct GradCheckOptions {
  std::size_t batch = 2;
  double step = 1e-6;
  /// Denominator floor of the relative error |a - n| / max(|a|, |n|, floor),
  /// so entries whose true gradient is ~0 are compared absolutely.
  double floor = 1e-3;
  std::uint64_t seed = 1;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // "input0[17]" or "<param>[i]"
  std::size_t checked = 0;
};

/// Compares layer_backward against central finite differences of the
/// scalar loss sum(y * r) for random inputs, random parameters and a random
/// upstream weighting r, all in 64-bit. Dropout is checked in train mode
/// with a fixed mask.
GradCheckResult grad_check(const LayerSpec& spec, const std::vector<Shape>& input_shapes,
                           const GradCheckOptions& opt = {});

}  // namespace amr
