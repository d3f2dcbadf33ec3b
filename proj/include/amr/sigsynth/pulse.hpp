#pragma once

#include <span>
#include <vector>

#include "amr/sigsynth/waveform.hpp"

namespace amr::sigsynth {

/// Root-raised-cosine taps, `span_symbols * sps + 1` long, unit energy.
std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols);

/// Upsample by `sps` and filter with an RRC pulse. The filter delay is
/// removed so that symbol k peaks at sample k*sps; output length is
/// symbols.size() * sps. Renormalized to unit power unless all-zero.
Waveform pulse_shape(std::span<const cplx> symbols, int sps, double rolloff,
                     int span_symbols = 8);

}  // namespace amr::sigsynth
