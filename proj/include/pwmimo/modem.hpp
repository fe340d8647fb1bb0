#pragma once

#include "pwmimo/numerics.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pwmimo {

/// Hard cap applied to every bit LLR, in either direction.
inline constexpr double kLlrClamp = 50.0;

/// A unit-mean-power symbol alphabet with its bit labeling.
///
/// points[w] is the symbol whose label is the m-bit word w, bits packed
/// MSB-first: w = b1 b2 ... bm with b1 the first bit of the group. So for
/// QPSK, bits 00 map to points[0] = (+1+1i)/sqrt(2).
struct Constellation {
    std::string name;
    int bits_per_symbol = 0;
    std::vector<Complex> points;

    int size() const { return static_cast<int>(points.size()); }
};

/// Registry lookup by name: bpsk, qpsk, 4pam, 16qam, 32qam (alias 32qam-cross).
/// Unknown names are rejected with the list of valid ones.
const Constellation& constellation(std::string_view name);

std::vector<std::string> constellation_names();

/// Per-antenna posterior over the alphabet, kept in log domain.
/// Normalized means log_sum_exp(log_probs) == 0.
struct SymbolPosterior {
    std::vector<double> log_probs;

    void normalize();
    int argmax() const;
};

/// Moment-matched posterior of a Gaussian belief CN(mean, variance) projected
/// onto the alphabet: log_probs[s] ~ -|point_s - mean|^2 / variance, normalized.
SymbolPosterior project_gaussian(const GaussianScalar& belief, const Constellation& c);

/// Map a bit string onto symbols, m bits per symbol, MSB-first within each
/// group. Bits must be 0/1 and the length a multiple of bits_per_symbol.
std::vector<Complex> map_bits(std::span<const std::uint8_t> bits, const Constellation& c);

/// Label word (point index) for each group of m bits.
std::vector<int> bits_to_labels(std::span<const std::uint8_t> bits, const Constellation& c);

/// Per-bit log-likelihood ratios log(P[bit=0]/P[bit=1]) from a normalized
/// posterior, clamped to +/- kLlrClamp. Positive favors bit 0.
std::vector<double> bit_llrs(const SymbolPosterior& posterior, const Constellation& c);

/// Hard bit decisions from LLR signs (llr < 0 decides 1).
std::vector<std::uint8_t> llrs_to_bits(std::span<const double> llrs);

/// CSV table of the labeling: header "label,re,im", label as an m-char
/// binary string, one row per point in label order.
std::string constellation_csv(const Constellation& c);

}  // namespace pwmimo
