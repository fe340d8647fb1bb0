#include <CLI11.hpp>

#include "pwmimo/simharness.hpp"
#include "pwmimo/verify.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace pwmimo;

std::vector<double> parse_snr_grid(const std::string& text) {
    const auto bad = [&] {
        return CLI::ValidationError("--snr expects a value or lo:step:hi, got '" + text + "'");
    };
    if (text.find(':') == std::string::npos) {
        try {
            return {std::stod(text)};
        } catch (const std::exception&) {
            throw bad();
        }
    }
    std::istringstream in(text);
    std::string part;
    std::vector<double> fields;
    while (std::getline(in, part, ':')) {
        try {
            fields.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw bad();
        }
    }
    if (fields.size() != 3)
        throw bad();
    const double lo = fields[0], step = fields[1], hi = fields[2];
    if (step <= 0.0 || hi < lo)
        throw CLI::ValidationError("--snr range needs step > 0 and hi >= lo");
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-9; v += step) {
        grid.push_back(v);
        if (grid.size() > 10000)
            throw CLI::ValidationError("--snr range produces more than 10000 points");
    }
    return grid;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
}

// Per-iteration belief means of the first frame at each SNR point, to stderr.
void print_debug_trace(const SweepConfig& cfg) {
    const auto& c = constellation(cfg.modulation);
    DetectOptions o;
    o.iterations = cfg.detector.iterations;
    o.permutation = cfg.detector.permutation;
    o.record_trace = true;
    for (size_t p = 0; p < cfg.snr_db.size(); ++p) {
        const Frame f = make_frame(cfg.rx, cfg.tx, snr_db_to_sigma2(cfg.snr_db[p]), c,
                                   {cfg.seed, static_cast<std::uint64_t>(p) << 40});
        const auto res = detect(cfg.detector.id, f, c, o);
        for (const auto& t : res.trace) {
            std::cerr << "# trace detector=" << cfg.detector.name() << " snr_db=" << cfg.snr_db[p]
                      << " iter=" << t.iteration;
            for (size_t j = 0; j < t.belief_mean.size(); ++j)
                std::cerr << " mean" << j << "=(" << t.belief_mean[j].real() << ","
                          << t.belief_mean[j].imag() << ")";
            std::cerr << '\n';
        }
        if (res.trace.empty())
            std::cerr << "# trace detector=" << cfg.detector.name() << " snr_db=" << cfg.snr_db[p]
                      << " (detector records no iterations)\n";
    }
}

void dump_frames(const SweepConfig& cfg, const std::string& path, int limit) {
    const auto& c = constellation(cfg.modulation);
    std::ostringstream out;
    const double sigma2 = snr_db_to_sigma2(cfg.snr_db.front());
    for (int k = 0; k < limit; ++k)
        out << frame_to_jsonl(make_frame(cfg.rx, cfg.tx, sigma2, c,
                                         {cfg.seed, static_cast<std::uint64_t>(k)}))
            << '\n';
    write_text(path, out.str());
}

struct SweepArgs {
    std::string detector = "bp2";
    int tx = 4;
    int rx = 4;
    std::string mod = "qpsk";
    std::string snr = "0:2:12";
    int iters = 0;
    std::vector<int> perm;
    std::uint64_t seed = 1;
    long long min_errors = 500;
    long long max_frames = 100000;
    int workers = 1;
    std::string out;
    std::string emit_config;
    std::string config_path;
    std::string dump_path;
    int dump_limit = 100;
    bool debug_trace = false;
    std::vector<int> iters_list;
};

SweepConfig to_config(const SweepArgs& a) {
    SweepConfig cfg;
    cfg.detector.id = parse_detector(a.detector);
    cfg.detector.iterations = a.iters;
    cfg.detector.permutation = a.perm;
    cfg.tx = a.tx;
    cfg.rx = a.rx;
    cfg.modulation = a.mod;
    cfg.snr_db = parse_snr_grid(a.snr);
    cfg.min_bit_errors = a.min_errors;
    cfg.max_frames = a.max_frames;
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    return cfg;
}

SweepConfig resolve_config(const SweepArgs& a) {
    if (a.config_path.empty())
        return to_config(a);
    std::ifstream in(a.config_path);
    if (!in)
        throw std::runtime_error("cannot read config '" + a.config_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return config_from_json(text.str());
}

void add_common_flags(CLI::App* cmd, SweepArgs& a, bool seed_required) {
    static const std::vector<std::string> detectors = {"map", "ml",  "mmse", "lmmse", "bp1",
                                                       "bp2", "bp3", "gbp2", "gbp3"};
    static const std::vector<std::string> mods = {"bpsk", "qpsk", "4pam", "16qam", "32qam",
                                                  "32qam-cross"};
    cmd->add_option("--detector", a.detector, "Detector to run")
        ->check(CLI::IsMember(detectors));
    cmd->add_option("--tx", a.tx, "Transmit antennas M")->check(CLI::PositiveNumber);
    cmd->add_option("--rx", a.rx, "Receive antennas N")->check(CLI::PositiveNumber);
    cmd->add_option("--mod", a.mod, "Modulation")->check(CLI::IsMember(mods));
    cmd->add_option("--snr", a.snr, "SNR grid in dB: single value or lo:step:hi");
    cmd->add_option("--perm", a.perm, "Ring order as comma-separated antenna indices")
        ->delimiter(',');
    auto* seed = cmd->add_option("--seed", a.seed, "Base RNG seed");
    if (seed_required) {
        // a config file fully defines the run, including the seed; without
        // one the seed and a well-formed grid are usage requirements
        cmd->parse_complete_callback([&a, seed] {
            if (!a.config_path.empty())
                return;
            if (seed->count() == 0)
                throw CLI::RequiredError("--seed");
            parse_snr_grid(a.snr);
        });
    }
    cmd->add_option("--min-errors", a.min_errors, "Bit errors to accumulate per SNR point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-frames", a.max_frames, "Frame cap per SNR point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", a.workers, "Worker threads (never changes results)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", a.out, "Write CSV here instead of stdout");
    cmd->add_flag("--debug-trace", a.debug_trace,
                  "Print per-iteration belief means for the first frame of each point");
}

int run_sweep_cmd(const SweepArgs& a) {
    SweepConfig cfg = resolve_config(a);
    if (!a.emit_config.empty())
        write_text(a.emit_config, config_to_json(cfg));
    if (a.debug_trace)
        print_debug_trace(cfg);
    if (!a.dump_path.empty())
        dump_frames(cfg, a.dump_path, a.dump_limit);
    const auto records = run_sweep(cfg);
    emit(a.out, sweep_csv(cfg, records));
    return 0;
}

int run_iterate_cmd(const SweepArgs& a) {
    SweepConfig cfg = resolve_config(a);
    const auto runs = iteration_sweep(cfg, a.iters_list);
    std::vector<std::vector<SnrRecord>> results;
    results.reserve(runs.size());
    for (const auto& r : runs)
        results.push_back(r.second);
    if (a.debug_trace)
        print_debug_trace(cfg);
    emit(a.out, sweep_csv(cfg, results));
    return 0;
}

int run_verify_cmd(const std::string& suite, long long trials, std::uint64_t seed) {
    std::vector<SuiteResult> results;
    if (suite == "all")
        results = run_all_verification_suites(trials, seed);
    else
        results.push_back(run_verification_suite(suite, trials, seed));
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << r.suite << ": " << r.passed << "/" << r.total << " " << r.detail
                  << (r.ok() ? "" : " [FAIL]") << '\n';
        all_ok = all_ok && r.ok();
    }
    std::cout << (all_ok ? "verification passed" : "verification FAILED") << '\n';
    return all_ok ? 0 : 1;
}

int run_opcount_cmd(const std::string& detector, int tx, const std::string& mod, int iters) {
    const DetectorId id = parse_detector(detector);
    const auto& c = constellation(mod);
    if (iters == 0) {
        if (id == DetectorId::Bp2)
            iters = kDefaultBp2Iterations;
        else if (id == DetectorId::Bp3)
            iters = kDefaultBp3Iterations;
        else
            iters = 1;
    }
    const auto ops = op_count(id, tx, c.bits_per_symbol, iters);
    std::cout << "detector=" << detector_name(id) << " tx=" << tx << " mod=" << mod
              << " iters=" << iters << '\n';
    std::cout << "pre " << ops.pre << '\n';
    std::cout << "post " << ops.post << '\n';
    std::cout << "total " << ops.total() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pair-wise belief-propagation soft MIMO detection toolkit"};
    app.require_subcommand(1);

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo BER/SER sweep over an SNR grid");
    add_common_flags(sweep, sweep_args, true);
    sweep->add_option("--iters", sweep_args.iters,
                      "Message-passing iterations (0 = detector default)");
    sweep->add_option("--emit-config", sweep_args.emit_config,
                      "Write the resolved run config as JSON, then run");
    sweep->add_option("--config", sweep_args.config_path,
                      "Load the run config from JSON (overrides the other flags)");
    sweep->add_option("--dump-frames", sweep_args.dump_path,
                      "Write the first frames of the first SNR point as JSON lines");
    sweep->add_option("--dump-limit", sweep_args.dump_limit, "Frames to dump (default 100)")
        ->check(CLI::PositiveNumber);

    SweepArgs iter_args;
    auto* iterate = app.add_subcommand(
        "iterate", "Rerun one iterative detector at several depths on identical frames");
    add_common_flags(iterate, iter_args, true);
    iterate->add_option("--iters-list", iter_args.iters_list, "Comma-separated iteration depths")
        ->delimiter(',')
        ->required();
    iterate->add_option("--config", iter_args.config_path,
                        "Load the run config from JSON (overrides the other flags)");

    std::string suite = "all";
    long long trials = 100;
    std::uint64_t verify_seed = 1;
    auto* verify = app.add_subcommand("verify", "Run oracle and invariant suites");
    {
        auto names = verification_suite_names();
        names.push_back("all");
        verify->add_option("--suite", suite, "Suite name or 'all'")->check(CLI::IsMember(names));
        verify->add_option("--trials", trials, "Random instances per suite")
            ->check(CLI::PositiveNumber);
        verify->add_option("--seed", verify_seed, "Base RNG seed");
    }

    std::string oc_detector = "bp3", oc_mod = "qpsk";
    int oc_tx = 4, oc_iters = 0;
    auto* opcount = app.add_subcommand("opcount", "Evaluate the real-multiplication cost model");
    opcount->add_option("--detector", oc_detector, "map|ml|mmse|bp2|bp3")
        ->check(CLI::IsMember(std::vector<std::string>{"map", "ml", "mmse", "lmmse", "bp2",
                                                       "bp3"}));
    opcount->add_option("--tx", oc_tx, "Transmit antennas M")->check(CLI::PositiveNumber);
    opcount->add_option("--mod", oc_mod, "Modulation");
    opcount->add_option("--iters", oc_iters, "Iterations (0 = detector default)");

    std::string dc_mod = "qpsk", dc_out;
    auto* dumpc = app.add_subcommand("dump-constellation", "Print a constellation as CSV");
    dumpc->add_option("--mod", dc_mod, "Modulation")->required();
    dumpc->add_option("--out", dc_out, "Write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sweep->parsed())
            return run_sweep_cmd(sweep_args);
        if (iterate->parsed())
            return run_iterate_cmd(iter_args);
        if (verify->parsed())
            return run_verify_cmd(suite, trials, verify_seed);
        if (opcount->parsed())
            return run_opcount_cmd(oc_detector, oc_tx, oc_mod, oc_iters);
        if (dumpc->parsed()) {
            emit(dc_out, constellation_csv(constellation(dc_mod)));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
