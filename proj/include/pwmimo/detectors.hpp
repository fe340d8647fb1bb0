#pragma once

#include "pwmimo/channel.hpp"
#include "pwmimo/modem.hpp"
#include "pwmimo/pairwise.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pwmimo {

enum class DetectorId { Map, Lmmse, Bp1, Bp2, Bp3, Gbp2, Gbp3 };

std::string detector_name(DetectorId d);
DetectorId parse_detector(std::string_view name);  // accepts "ml" as alias for map

/// Default message-passing depths. Four iterations are enough for the
/// fully-connected pair-wise schedule, six for one-direction-per-sweep on the
/// ring; the Gaussian variants are cheap enough to just run long.
inline constexpr int kDefaultBp1Iterations = 4;
inline constexpr int kDefaultBp2Iterations = 4;
inline constexpr int kDefaultBp3Iterations = 6;
inline constexpr int kDefaultGaussianIterations = 50;

/// Per-iteration snapshot for debugging: the current belief summarized per
/// transmit antenna (posterior mean and the largest log-probability).
struct IterationTrace {
    int iteration = 0;
    std::vector<Complex> belief_mean;
    std::vector<double> top_log_prob;
};

struct DetectionResult {
    std::vector<SymbolPosterior> posteriors;  // one per tx antenna
    std::vector<double> llrs;                 // tx * bits_per_symbol, antenna-major
    std::vector<int> hard_symbols;            // posterior argmax labels
    int iterations_run = 0;
    bool diverged = false;                    // Gaussian watchdog tripped
    long long op_pre = 0;                     // complexity-model counts (real
    long long op_post = 0;                    //   multiplications), 0 if unmodeled
    std::vector<IterationTrace> trace;        // filled only when requested
};

/// Closed-form complexity model: real multiplications split into
/// preprocessing (channel-dependent) and detection (per-frame) counts.
/// Only map (as ML), mmse, bp2 and bp3 are modeled; the rest are rejected.
struct OperationCount {
    long long pre = 0;
    long long post = 0;
    long long total() const { return pre + post; }
};

bool has_op_count_model(DetectorId d);
OperationCount op_count(DetectorId d, int tx, int bits_per_symbol, int iterations);

struct DetectOptions {
    /// 0 selects the detector's default depth. Ignored by map/mmse.
    int iterations = 0;
    /// Ring visiting order for bp3/gbp3; empty means identity.
    std::vector<int> permutation;
    /// Initial message moments for the Gaussian detectors.
    Complex initial_mean{0.0, 0.0};
    double initial_variance = 1.0;
    bool record_trace = false;
};

/// Exact per-antenna posteriors by marginalizing the joint likelihood over
/// all |alphabet|^tx transmit vectors. Refuses problems beyond 2^24
/// hypotheses; the cost is exponential and anything larger is a config error.
DetectionResult detect_map(const Frame& f, const Constellation& c);

/// Linear MMSE filter followed by a per-antenna Gaussian projection onto the
/// alphabet: x_hat_j = h_j^H K^{-1} y with K = sigma2 I + H H^H, posterior
/// CN(x_hat_j, 1 - h_j^H K^{-1} h_j).
DetectionResult detect_lmmse(const Frame& f, const Constellation& c);

/// Classic flooding sum-product over the fully-connected bipartite graph of
/// observation and symbol nodes. Each observation-to-symbol update
/// marginalizes over |alphabet|^(tx-1) combinations, so this is reference
/// material only; refuses beyond 2^16 hypotheses per update.
DetectionResult detect_bp1(const Frame& f, const Constellation& c, const DetectOptions& o = {});

/// Pair-wise sum-product on the fully-connected symbol graph with a
/// synchronous (flooding) schedule.
DetectionResult detect_bp2(const Frame& f, const Constellation& c, const DetectOptions& o = {});

/// Pair-wise sum-product on a ring, sequential forward/backward sweeps; each
/// iteration is one complete turn in each direction. Needs tx >= 3.
DetectionResult detect_bp3(const Frame& f, const Constellation& c, const DetectOptions& o = {});

/// Gaussian-approximated variant of detect_bp2: messages are single complex
/// Gaussians combined by precision weighting. Not guaranteed to converge; a
/// watchdog flags mean magnitudes beyond 1e6 and stops early with
/// diverged = true (posteriors are still produced from the last state).
DetectionResult detect_gbp2(const Frame& f, const Constellation& c, const DetectOptions& o = {});

/// Gaussian-approximated variant of detect_bp3. The mean recursion is an
/// affine contraction, so this converges to a unique fixed point regardless
/// of the initial message moments.
DetectionResult detect_gbp3(const Frame& f, const Constellation& c, const DetectOptions& o = {});

DetectionResult detect(DetectorId d, const Frame& f, const Constellation& c,
                       const DetectOptions& o = {});

/// Verification hooks: the raw (log-domain, normalized) message tables the
/// pair-wise detectors hold after a number of whole iterations. These run
/// the exact production update loops and exist so the updates can be checked
/// against direct transcriptions of the defining equations.
struct Bp2Messages {
    std::vector<std::pair<int, int>> pairs;  // ordered (from, to), one per table
    std::vector<std::vector<double>> pi;     // pi[e]: table over x_to of pairs[e]
};

Bp2Messages bp2_messages(const Frame& f, const Constellation& c, int iterations);

struct Bp3Messages {
    std::vector<int> order;                    // ring visiting order
    std::vector<std::vector<double>> forward;  // [p]: order[p] -> order[p+1]
    std::vector<std::vector<double>> backward; // [p]: order[p] -> order[p-1]
};

Bp3Messages bp3_messages(const Frame& f, const Constellation& c, int iterations,
                         std::span<const int> permutation = {});

}  // namespace pwmimo
