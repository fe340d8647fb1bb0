#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Runs the command line tool with stderr folded into stdout.
RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PWMIMO_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf{};
    size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("cli requires a subcommand and rejects unknown flags") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("--bogus").exit_code == 2);
    CHECK(run_cli("sweep --no-such-flag").exit_code == 2);
}

TEST_CASE("cli opcount prints the closed-form counts") {
    auto r = run_cli("opcount --detector bp3 --tx 6 --mod qpsk");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("pre 21648") != std::string::npos);
    CHECK(r.output.find("post 6336") != std::string::npos);
    CHECK(r.output.find("total 27984") != std::string::npos);

    auto mmse = run_cli("opcount --detector mmse --tx 4 --mod 16qam");
    CHECK(mmse.exit_code == 0);
    CHECK(mmse.output.find("total 2216") != std::string::npos);
}

TEST_CASE("cli opcount rejects detectors without a complexity model") {
    auto r = run_cli("opcount --detector gbp2 --tx 4 --mod qpsk");
    CHECK(r.exit_code == 2);

    auto bad = run_cli("opcount --detector nope --tx 4 --mod qpsk");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("cli verify runs a named suite") {
    auto r = run_cli("verify --suite pair-stats --trials 5 --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("pair-stats") != std::string::npos);
    CHECK(r.output.find("verification passed") != std::string::npos);

    auto unknown = run_cli("verify --suite nonsense");
    CHECK(unknown.exit_code == 2);
}

TEST_CASE("cli dump-constellation emits the labeling table") {
    auto r = run_cli("dump-constellation --mod qpsk");
    CHECK(r.exit_code == 0);
    CHECK(count_lines(r.output) == 5);
    CHECK(r.output.rfind("label,re,im", 0) == 0);
}

TEST_CASE("cli sweep demands a seed and validates the grid") {
    CHECK(run_cli("sweep --detector bp2").exit_code == 2);
    CHECK(run_cli("sweep --detector bp2 --seed 1 --snr 8:-2:0").exit_code == 2);
    CHECK(run_cli("sweep --detector walrus --seed 1").exit_code == 2);
}

TEST_CASE("cli sweep writes deterministic csv") {
    const std::string args =
        "sweep --detector mmse --tx 4 --rx 4 --mod qpsk --snr 0:4:4 "
        "--min-errors 100 --max-frames 2000 --seed 11";
    auto a = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(count_lines(a.output) == 3);
    CHECK(a.output.rfind("detector,", 0) == 0);
    CHECK(a.output.find("\nmmse,4,4,qpsk,0,") != std::string::npos);

    auto b = run_cli(args + " --workers 3");
    // all but the timing column must match run for run
    auto strip = [](const std::string& text) {
        std::istringstream in(text);
        std::string line, out;
        while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
        return out;
    };
    CHECK(strip(a.output) == strip(b.output));
}

TEST_CASE("cli sweep writes to a file when asked") {
    const char* path = "cli_sweep_out.csv";
    std::remove(path);
    auto r = run_cli(std::string("sweep --detector bp3 --snr 6 --min-errors 50 "
                                 "--max-frames 500 --seed 2 --out ") +
                     path);
    CHECK(r.exit_code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("detector,", 0) == 0);
    std::remove(path);
}

TEST_CASE("cli iterate compares iteration depths on one stream") {
    auto r = run_cli("iterate --detector bp3 --iters-list 6,12 --snr 6 "
                     "--min-errors 50 --max-frames 500 --seed 5");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("bp3@6,") != std::string::npos);
    CHECK(r.output.find("bp3@12,") != std::string::npos);

    auto bad = run_cli("iterate --detector map --iters-list 1,2 --snr 6 --seed 5");
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("error:") != std::string::npos);
}

TEST_CASE("cli config round trip drives the same run") {
    const char* path = "cli_config.json";
    std::remove(path);
    auto emitted = run_cli(std::string("sweep --detector bp2 --snr 4 --min-errors 50 "
                                       "--max-frames 400 --seed 9 --emit-config ") +
                           path);
    CHECK(emitted.exit_code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());

    auto direct = run_cli("sweep --detector bp2 --snr 4 --min-errors 50 "
                          "--max-frames 400 --seed 9");
    auto from_config = run_cli(std::string("sweep --config ") + path);
    auto strip = [](const std::string& text) {
        std::istringstream in2(text);
        std::string line, out;
        while (std::getline(in2, line)) out += line.substr(0, line.rfind(',')) + "\n";
        return out;
    };
    CHECK(strip(direct.output) == strip(from_config.output));
    std::remove(path);
}
