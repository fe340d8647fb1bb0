#pragma once

#include "pwmimo/detectors.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pwmimo {

/// Which detector a sweep runs and how. label overrides the CSV detector
/// column, letting the same detector appear twice (e.g. bp3 at 6 and 12
/// iterations) in one comparison run.
struct DetectorSpec {
    DetectorId id = DetectorId::Bp2;
    int iterations = 0;  // 0 -> detector default
    std::vector<int> permutation;
    std::string label;

    std::string name() const { return label.empty() ? detector_name(id) : label; }
};

struct SweepConfig {
    DetectorSpec detector;
    int tx = 4;
    int rx = 4;
    std::string modulation = "qpsk";
    std::vector<double> snr_db;
    long long min_bit_errors = 500;
    long long max_frames = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
};

enum class StopReason { MinErrors, MaxFrames };

/// One Monte-Carlo point: everything that becomes a CSV row.
struct SnrRecord {
    std::string detector;
    double snr_db = 0.0;
    int iterations = 0;  // resolved depth; 0 for the non-iterative detectors
    long long frames = 0;
    long long bits = 0;
    long long bit_errors = 0;
    long long symbol_errors = 0;
    double ber = 0.0;
    double ser = 0.0;
    double ci_low = 0.0;   // 95% binomial interval on the bit error rate
    double ci_high = 0.0;
    long long op_pre = 0;
    long long op_post = 0;
    double elapsed_ms = 0.0;
    StopReason stop = StopReason::MinErrors;
};

/// SNR is 1/sigma2 in linear scale; grids and axes are in dB.
double snr_db_to_sigma2(double snr_db);

/// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(long long successes, long long trials);

/// Monte-Carlo sweep of one detector over the SNR grid. Per point, frames
/// are drawn and detected until min_bit_errors accumulate or max_frames is
/// hit, in fixed batches whose RNG streams are keyed by (seed, point, frame);
/// the result is bit-identical for any worker count.
std::vector<SnrRecord> run_sweep(const SweepConfig& cfg);

/// Same loop, several detectors sharing the exact same frames (paired runs,
/// for low-variance comparisons). The stop rule waits for every detector to
/// reach min_bit_errors. Returns one record vector per spec, in spec order.
std::vector<std::vector<SnrRecord>> run_comparison(const SweepConfig& cfg,
                                                   std::span<const DetectorSpec> specs);

/// Reruns cfg.detector at each requested iteration depth on identical frame
/// streams. Only meaningful for the iterative detectors; map/mmse are
/// rejected. Returns (iterations, records) pairs.
std::vector<std::pair<int, std::vector<SnrRecord>>> iteration_sweep(
    const SweepConfig& cfg, std::span<const int> iteration_counts);

/// CSV with header detector,M,N,mod,snr_db,iters,frames,bits,bit_errors,
/// ber,ser,ci_low,ci_high,op_pre,op_post,elapsed_ms. Everything except
/// elapsed_ms is deterministic for a given seed and config.
std::string sweep_csv(const SweepConfig& cfg, std::span<const std::vector<SnrRecord>> results);
std::string sweep_csv(const SweepConfig& cfg, const std::vector<SnrRecord>& records);

/// Round-trippable JSON form of a config.
std::string config_to_json(const SweepConfig& cfg);
SweepConfig config_from_json(const std::string& text);

}  // namespace pwmimo
