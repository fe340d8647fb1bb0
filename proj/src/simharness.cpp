#include "pwmimo/simharness.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pwmimo {

namespace {

// Frames per scheduling batch. The stop rule is evaluated only at batch
// boundaries on cumulative integer counts, which is what makes the outcome
// independent of how workers interleave.
constexpr long long kBatchFrames = 256;

constexpr std::uint64_t kFrameIndexBits = 40;

struct PerFrameCounts {
    int bit_errors = 0;
    int symbol_errors = 0;
};

int resolved_iterations(const DetectorSpec& s) {
    if (s.id == DetectorId::Map || s.id == DetectorId::Lmmse)
        return 0;
    if (s.iterations > 0)
        return s.iterations;
    switch (s.id) {
        case DetectorId::Bp1: return kDefaultBp1Iterations;
        case DetectorId::Bp2: return kDefaultBp2Iterations;
        case DetectorId::Bp3: return kDefaultBp3Iterations;
        default: return kDefaultGaussianIterations;
    }
}

void validate(const SweepConfig& cfg, std::span<const DetectorSpec> specs) {
    if (cfg.tx < 1 || cfg.rx < cfg.tx)
        throw std::invalid_argument("sweep: need rx >= tx >= 1");
    if (cfg.snr_db.empty())
        throw std::invalid_argument("sweep: SNR grid is empty");
    if (cfg.min_bit_errors < 0)
        throw std::invalid_argument("sweep: min_bit_errors must be >= 0");
    if (cfg.max_frames < 1 || cfg.max_frames >= (1LL << kFrameIndexBits))
        throw std::invalid_argument("sweep: max_frames out of range");
    if (cfg.workers < 1)
        throw std::invalid_argument("sweep: workers must be >= 1");
    if (specs.empty())
        throw std::invalid_argument("sweep: no detectors given");
    for (const auto& s : specs)
        if (s.iterations < 0)
            throw std::invalid_argument("sweep: iterations must be >= 0");
}

}  // namespace

double snr_db_to_sigma2(double snr_db) {
    return std::pow(10.0, -snr_db / 10.0);
}

std::pair<double, double> wilson_interval(long long successes, long long trials) {
    if (trials <= 0 || successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: need 0 <= successes <= trials, trials > 0");
    constexpr double z = 1.959963984540054;  // 97.5th normal percentile
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<std::vector<SnrRecord>> run_comparison(const SweepConfig& cfg,
                                                   std::span<const DetectorSpec> specs) {
    validate(cfg, specs);
    const auto& c = constellation(cfg.modulation);
    const int n_specs = static_cast<int>(specs.size());
    const long long bits_per_frame =
        static_cast<long long>(cfg.tx) * c.bits_per_symbol;

    std::vector<DetectOptions> opts(n_specs);
    for (int s = 0; s < n_specs; ++s) {
        opts[s].iterations = specs[s].iterations;
        opts[s].permutation = specs[s].permutation;
    }

    std::vector<std::vector<SnrRecord>> results(n_specs);

    for (size_t point = 0; point < cfg.snr_db.size(); ++point) {
        const double sigma2 = snr_db_to_sigma2(cfg.snr_db[point]);
        std::vector<long long> bit_errors(n_specs, 0), symbol_errors(n_specs, 0);
        std::vector<double> elapsed_ms(n_specs, 0.0);
        long long frames_done = 0;

        while (frames_done < cfg.max_frames) {
            const long long batch = std::min(kBatchFrames, cfg.max_frames - frames_done);
            std::vector<PerFrameCounts> counts(static_cast<size_t>(batch) * n_specs);
            std::atomic<long long> cursor{0};
            std::mutex fail_mu;
            std::exception_ptr failure;
            std::vector<std::vector<double>> elapsed_local(
                std::max(1, std::min<int>(cfg.workers, static_cast<int>(batch))),
                std::vector<double>(n_specs, 0.0));

            auto work = [&](int worker) {
                try {
                    while (true) {
                        const long long k = cursor.fetch_add(1);
                        if (k >= batch)
                            return;
                        const std::uint64_t stream =
                            (static_cast<std::uint64_t>(point) << kFrameIndexBits) |
                            static_cast<std::uint64_t>(frames_done + k);
                        const Frame frame =
                            make_frame(cfg.rx, cfg.tx, sigma2, c, {cfg.seed, stream});
                        const auto labels = bits_to_labels(frame.tx_bits, c);
                        for (int s = 0; s < n_specs; ++s) {
                            const auto t0 = std::chrono::steady_clock::now();
                            const auto res = detect(specs[s].id, frame, c, opts[s]);
                            const auto t1 = std::chrono::steady_clock::now();
                            elapsed_local[worker][s] +=
                                std::chrono::duration<double, std::milli>(t1 - t0).count();
                            auto& cnt = counts[static_cast<size_t>(k) * n_specs + s];
                            const auto bits = llrs_to_bits(res.llrs);
                            for (size_t b = 0; b < bits.size(); ++b)
                                cnt.bit_errors += bits[b] != frame.tx_bits[b];
                            for (size_t j = 0; j < labels.size(); ++j)
                                cnt.symbol_errors += res.hard_symbols[j] != labels[j];
                        }
                    }
                } catch (...) {
                    std::lock_guard<std::mutex> lock(fail_mu);
                    if (!failure)
                        failure = std::current_exception();
                }
            };

            const int n_workers = static_cast<int>(elapsed_local.size());
            if (n_workers == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                pool.reserve(n_workers);
                for (int w = 0; w < n_workers; ++w)
                    pool.emplace_back(work, w);
                for (auto& t : pool)
                    t.join();
            }
            if (failure)
                std::rethrow_exception(failure);

            // Deterministic ordered reduction.
            for (long long k = 0; k < batch; ++k)
                for (int s = 0; s < n_specs; ++s) {
                    bit_errors[s] += counts[static_cast<size_t>(k) * n_specs + s].bit_errors;
                    symbol_errors[s] += counts[static_cast<size_t>(k) * n_specs + s].symbol_errors;
                }
            for (const auto& el : elapsed_local)
                for (int s = 0; s < n_specs; ++s)
                    elapsed_ms[s] += el[s];
            frames_done += batch;

            bool all_done = true;
            for (int s = 0; s < n_specs; ++s)
                all_done = all_done && bit_errors[s] >= cfg.min_bit_errors;
            if (all_done)
                break;
        }

        for (int s = 0; s < n_specs; ++s) {
            SnrRecord r;
            r.detector = specs[s].name();
            r.snr_db = cfg.snr_db[point];
            r.iterations = resolved_iterations(specs[s]);
            r.frames = frames_done;
            r.bits = frames_done * bits_per_frame;
            r.bit_errors = bit_errors[s];
            r.symbol_errors = symbol_errors[s];
            r.ber = static_cast<double>(r.bit_errors) / static_cast<double>(r.bits);
            r.ser = static_cast<double>(r.symbol_errors) /
                    static_cast<double>(frames_done * cfg.tx);
            std::tie(r.ci_low, r.ci_high) = wilson_interval(r.bit_errors, r.bits);
            if (has_op_count_model(specs[s].id)) {
                const auto ops =
                    op_count(specs[s].id, cfg.tx, c.bits_per_symbol,
                             std::max(1, r.iterations));
                r.op_pre = ops.pre;
                r.op_post = ops.post;
            }
            r.elapsed_ms = elapsed_ms[s];
            r.stop = bit_errors[s] >= cfg.min_bit_errors ? StopReason::MinErrors
                                                         : StopReason::MaxFrames;
            results[s].push_back(std::move(r));
        }
    }
    return results;
}

std::vector<SnrRecord> run_sweep(const SweepConfig& cfg) {
    const DetectorSpec specs[1] = {cfg.detector};
    return run_comparison(cfg, specs).front();
}

std::vector<std::pair<int, std::vector<SnrRecord>>> iteration_sweep(
    const SweepConfig& cfg, std::span<const int> iteration_counts) {
    const DetectorId d = cfg.detector.id;
    if (d == DetectorId::Map || d == DetectorId::Lmmse)
        throw std::invalid_argument("iteration_sweep: '" + detector_name(d) +
                                    "' takes no iterations");
    if (iteration_counts.empty())
        throw std::invalid_argument("iteration_sweep: no iteration counts given");
    std::vector<DetectorSpec> specs;
    for (int it : iteration_counts) {
        if (it < 1)
            throw std::invalid_argument("iteration_sweep: iteration counts must be >= 1");
        DetectorSpec s = cfg.detector;
        s.iterations = it;
        s.label = detector_name(d) + "@" + std::to_string(it);
        specs.push_back(std::move(s));
    }
    const auto results = run_comparison(cfg, specs);
    std::vector<std::pair<int, std::vector<SnrRecord>>> out;
    for (size_t k = 0; k < specs.size(); ++k)
        out.emplace_back(iteration_counts[k], results[k]);
    return out;
}

namespace {

std::string fmt_general(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string fmt_sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(9) << v;
    return os.str();
}

}  // namespace

std::string sweep_csv(const SweepConfig& cfg, std::span<const std::vector<SnrRecord>> results) {
    std::ostringstream os;
    os << "detector,M,N,mod,snr_db,iters,frames,bits,bit_errors,ber,ser,"
          "ci_low,ci_high,op_pre,op_post,elapsed_ms\n";
    for (const auto& records : results)
        for (const auto& r : records) {
            os << r.detector << ',' << cfg.tx << ',' << cfg.rx << ',' << cfg.modulation << ','
               << fmt_general(r.snr_db) << ',' << r.iterations << ',' << r.frames << ','
               << r.bits << ',' << r.bit_errors << ',' << fmt_sci(r.ber) << ','
               << fmt_sci(r.ser) << ',' << fmt_sci(r.ci_low) << ',' << fmt_sci(r.ci_high) << ','
               << r.op_pre << ',' << r.op_post << ','
               << std::fixed << std::setprecision(3) << r.elapsed_ms << '\n';
            os.unsetf(std::ios::floatfield);
        }
    return os.str();
}

std::string sweep_csv(const SweepConfig& cfg, const std::vector<SnrRecord>& records) {
    const std::vector<std::vector<SnrRecord>> wrapped{records};
    return sweep_csv(cfg, wrapped);
}

std::string config_to_json(const SweepConfig& cfg) {
    nlohmann::json j;
    j["detector"] = detector_name(cfg.detector.id);
    j["iterations"] = cfg.detector.iterations;
    if (!cfg.detector.permutation.empty())
        j["permutation"] = cfg.detector.permutation;
    j["tx"] = cfg.tx;
    j["rx"] = cfg.rx;
    j["mod"] = cfg.modulation;
    j["snr_db"] = cfg.snr_db;
    j["min_bit_errors"] = cfg.min_bit_errors;
    j["max_frames"] = cfg.max_frames;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    return j.dump(2) + "\n";
}

SweepConfig config_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SweepConfig cfg;
    cfg.detector.id = parse_detector(j.at("detector").get<std::string>());
    cfg.detector.iterations = j.value("iterations", 0);
    if (j.contains("permutation"))
        cfg.detector.permutation = j.at("permutation").get<std::vector<int>>();
    cfg.tx = j.at("tx").get<int>();
    cfg.rx = j.at("rx").get<int>();
    cfg.modulation = j.at("mod").get<std::string>();
    cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
    cfg.min_bit_errors = j.value("min_bit_errors", 500LL);
    cfg.max_frames = j.value("max_frames", 100000LL);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.workers = j.value("workers", 1);
    return cfg;
}

}  // namespace pwmimo
