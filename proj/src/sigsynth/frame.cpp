#include "amr/sigsynth/frame.hpp"

#include <nlohmann/json.hpp>

#include "amr/common/error.hpp"
#include "amr/sigsynth/channel.hpp"
#include "amr/sigsynth/cpm.hpp"
#include "amr/sigsynth/pulse.hpp"
#include "amr/sigsynth/symbols.hpp"

namespace amr::sigsynth {

namespace {

Waveform crop(const Waveform& w, std::size_t offset, std::size_t length) {
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(w.samples.begin() + static_cast<long>(offset),
                     w.samples.begin() + static_cast<long>(offset + length));
  return out;
}

}  // namespace

Waveform synthesize_clean(Modulation scheme, const SynthParams& p, Rng& rng) {
  if (kFrameLength % p.sps != 0) throw InvalidSpec("frame length must be a multiple of sps");
  const std::size_t guard = static_cast<std::size_t>(p.guard_symbols) * static_cast<std::size_t>(p.sps);
  const std::size_t n_symbols = static_cast<std::size_t>(kFrameLength / p.sps + 2 * p.guard_symbols);
  Waveform full;

  if (kind(scheme) == ModKind::analog) {
    const auto msg = bandlimited_message(static_cast<std::size_t>(kFrameLength) + 2 * guard, rng);
    AnalogParams ap = p.analog;
    ap.normalize = false;
    full = modulate_analog(scheme, msg, ap);
  } else {
    std::bernoulli_distribution coin(0.5);
    const auto bps = static_cast<std::size_t>(bits_per_symbol(scheme));
    std::vector<std::uint8_t> bits(n_symbols * bps);
    for (auto& b : bits) b = coin(rng) ? 1 : 0;
    const auto symbols = map_symbols(scheme, bits);
    if (scheme == Modulation::GFSK || scheme == Modulation::CPFSK) {
      std::vector<double> freq(symbols.size());
      for (std::size_t i = 0; i < symbols.size(); ++i) freq[i] = symbols[i].real();
      const double h = scheme == Modulation::GFSK ? p.gfsk_h : p.cpfsk_h;
      full = modulate_cpm(scheme, freq, p.sps, h, p.gfsk_bt);
    } else {
      full = pulse_shape(symbols, p.sps, p.rolloff, p.rrc_span);
    }
  }

  Waveform frame = crop(full, guard, static_cast<std::size_t>(kFrameLength));
  normalize_power(frame);
  return frame;
}

FramePair synthesize_frame_pair(Modulation scheme, double snr_db, std::uint64_t seed,
                                const SynthParams& params) {
  Rng rng(derive_seed(seed, "signal"));
  FramePair pair{synthesize_clean(scheme, params, rng), {}};
  ChannelParams ch;
  ch.snr_db = snr_db;
  ch.rng_seed = derive_seed(seed, "channel");
  ch.enable_timing_offset = params.enable_timing_offset;
  ch.enable_cfo = params.enable_cfo;
  if (params.enable_cfo) {
    std::uniform_real_distribution<double> u(-params.cfo_max, params.cfo_max);
    ch.cfo_fraction = u(rng);
  }
  pair.noisy = apply_awgn(pair.clean, ch);
  return pair;
}

FrameIQ synthesize_frame(Modulation scheme, double snr_db, std::uint64_t seed,
                         const SynthParams& params) {
  const auto pair = synthesize_frame_pair(scheme, snr_db, seed, params);
  FrameIQ iq{};
  for (int i = 0; i < kFrameLength; ++i) {
    iq[static_cast<std::size_t>(i)] = static_cast<float>(pair.noisy.samples[static_cast<std::size_t>(i)].real());
    iq[static_cast<std::size_t>(kFrameLength + i)] = static_cast<float>(pair.noisy.samples[static_cast<std::size_t>(i)].imag());
  }
  return iq;
}

std::string describe(const SynthParams& p) {
  nlohmann::json j;
  j["frame"] = {{"rows", 2}, {"length", kFrameLength}, {"layout", "I row then Q row"}};
  j["samples_per_symbol"] = p.sps;
  j["rrc"] = {{"rolloff", p.rolloff}, {"span_symbols", p.rrc_span}};
  j["gfsk"] = {{"h", p.gfsk_h}, {"bt", p.gfsk_bt}};
  j["cpfsk"] = {{"h", p.cpfsk_h}};
  j["analog"] = {{"am_index", p.analog.am_index},
                 {"fm_deviation", p.analog.fm_deviation},
                 {"hilbert_taps", p.analog.hilbert_taps},
                 {"message", "gaussian noise low-passed at 0.125 cycles/sample, peak-normalized"}};
  j["guard_symbols"] = p.guard_symbols;
  j["impairments"] = {{"cfo", p.enable_cfo}, {"cfo_max", p.cfo_max}, {"timing_offset", p.enable_timing_offset}};
  j["snr_definition"] = "per frame: unit mean signal power over complex AWGN variance 10^(-snr_db/10)";
  return j.dump();
}

}  // namespace amr::sigsynth
