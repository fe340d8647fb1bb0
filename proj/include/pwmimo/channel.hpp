#pragma once

#include "pwmimo/modem.hpp"
#include "pwmimo/numerics.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pwmimo {

/// Deterministic random stream keyed by (seed, stream index). Two streams
/// with different keys are independent for simulation purposes; the same key
/// always reproduces the same draw sequence, on any platform. Gaussian draws
/// use an explicit Box-Muller transform rather than std::normal_distribution,
/// whose output sequence the standard leaves implementation-defined.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    double uniform01();  // [0, 1), 53-bit resolution
    std::uint8_t bit();
    Complex standard_complex_gaussian();                // CN(0, 1)
    Complex complex_gaussian(double variance);          // CN(0, variance)

  private:
    std::mt19937_64 engine_;
};

/// One draw of the flat-fading channel: y = h x + n with n ~ CN(0, sigma2 I).
struct ChannelRealization {
    CMat h;  // rx x tx, entries i.i.d. CN(0, 1)
    double sigma2 = 1.0;

    int rx() const { return static_cast<int>(h.rows()); }
    int tx() const { return static_cast<int>(h.cols()); }
};

/// Keys the random stream a frame was generated from, enough to regenerate it.
struct FrameSeed {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

/// Everything one detection works on: the realization, what was sent, and
/// what was received.
struct Frame {
    ChannelRealization channel;
    std::vector<std::uint8_t> tx_bits;  // tx * bits_per_symbol entries
    CVec tx_symbols;                    // tx entries
    CVec received;                      // rx entries
    FrameSeed seed;
    std::string modulation;
};

/// Draws an rx x tx channel with i.i.d. CN(0,1) entries. Requires
/// rx >= tx >= 1 and sigma2 > 0.
ChannelRealization draw_channel(int rx, int tx, double sigma2, RngStream& rng);

/// y = h x + n for a given symbol vector.
CVec transmit(const CVec& x, const ChannelRealization& ch, RngStream& rng);

/// Draws a complete frame (channel, bits, noise) from the stream keyed by
/// the given seed. A fresh channel realization per frame.
Frame make_frame(int rx, int tx, double sigma2, const Constellation& c, FrameSeed seed);

/// One line-delimited JSON record per frame: seed, sigma2, H (row-major
/// re/im pairs), tx bits, received samples. Parseable back by from_jsonl.
std::string frame_to_jsonl(const Frame& f);
Frame frame_from_jsonl(const std::string& line);

}  // namespace pwmimo
