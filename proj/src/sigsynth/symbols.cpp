#include "amr/sigsynth/symbols.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "amr/common/error.hpp"

namespace amr::sigsynth {

namespace {

unsigned gray_to_binary(unsigned g) {
  unsigned b = g;
  for (unsigned shift = 1; shift < 8 * sizeof(unsigned); shift <<= 1) b ^= b >> shift;
  return b;
}

// Gray-coded PAM level for an n-bit axis: pattern -> one of {-(L-1), ..., L-1}.
double gray_pam_level(unsigned pattern, int axis_bits) {
  const unsigned levels = 1u << axis_bits;
  const unsigned position = gray_to_binary(pattern);
  return 2.0 * static_cast<double>(position) - static_cast<double>(levels - 1);
}

}  // namespace

std::vector<cplx> constellation(Modulation scheme) {
  if (kind(scheme) != ModKind::digital) {
    throw WrongKind(std::string("no constellation for analog scheme ") + std::string(name(scheme)));
  }
  const int bps = bits_per_symbol(scheme);
  const unsigned n = 1u << bps;
  std::vector<cplx> points(n);
  switch (scheme) {
    case Modulation::BPSK:
    case Modulation::GFSK:
    case Modulation::CPFSK:
      points = {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
      break;
    case Modulation::QPSK: {
      const double a = 1.0 / std::sqrt(2.0);
      for (unsigned p = 0; p < n; ++p) {
        const double re = (p & 2u) ? -a : a;
        const double im = (p & 1u) ? -a : a;
        points[p] = cplx(re, im);
      }
      break;
    }
    case Modulation::PSK8:
      for (unsigned p = 0; p < n; ++p) {
        const double phase = 2.0 * std::numbers::pi * gray_to_binary(p) / 8.0;
        points[p] = std::polar(1.0, phase);
      }
      break;
    case Modulation::PAM4:
      for (unsigned p = 0; p < n; ++p) points[p] = cplx(gray_pam_level(p, 2) / std::sqrt(5.0), 0.0);
      break;
    case Modulation::QAM16:
    case Modulation::QAM64: {
      const int axis = bps / 2;
      // mean energy of the square grid {+-1, +-3, ...}^2 is 2(M-1)/3
      const double scale = 1.0 / std::sqrt(2.0 * (static_cast<double>(n) - 1.0) / 3.0);
      const unsigned mask = (1u << axis) - 1u;
      for (unsigned p = 0; p < n; ++p) {
        const double re = gray_pam_level(p >> axis, axis);
        const double im = gray_pam_level(p & mask, axis);
        points[p] = cplx(re * scale, im * scale);
      }
      break;
    }
    default:
      break;
  }
  return points;
}

std::vector<cplx> map_symbols(Modulation scheme, std::span<const std::uint8_t> bits) {
  if (kind(scheme) != ModKind::digital) {
    throw WrongKind(std::string("map_symbols needs a digital scheme, got ") +
                    std::string(name(scheme)));
  }
  const auto bps = static_cast<std::size_t>(bits_per_symbol(scheme));
  if (bits.size() % bps != 0) {
    throw InvalidInput("bit count " + std::to_string(bits.size()) +
                       " is not a multiple of " + std::to_string(bps));
  }
  const auto points = constellation(scheme);
  std::vector<cplx> out;
  out.reserve(bits.size() / bps);
  for (std::size_t i = 0; i < bits.size(); i += bps) {
    unsigned pattern = 0;
    for (std::size_t b = 0; b < bps; ++b) {
      if (bits[i + b] > 1) throw InvalidInput("bits must be 0 or 1");
      pattern = (pattern << 1) | bits[i + b];
    }
    out.push_back(points[pattern]);
  }
  return out;
}

}  // namespace amr::sigsynth
