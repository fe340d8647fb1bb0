#include "pwmimo/channel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pwmimo {

namespace {

// splitmix64 finalizer, the usual seed-expansion mixer.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(mix64(mix64(seed) ^ mix64(stream ^ 0xa5a5a5a5a5a5a5a5ULL))) {}

double RngStream::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint8_t RngStream::bit() {
    return static_cast<std::uint8_t>(engine_() >> 63);
}

Complex RngStream::standard_complex_gaussian() {
    // Box-Muller on two uniforms. The real and imaginary parts each get
    // variance 1/2 so the complex variance is 1.
    double u1 = uniform01();
    const double u2 = uniform01();
    if (u1 <= 0.0)
        u1 = 0x1.0p-53;
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

Complex RngStream::complex_gaussian(double variance) {
    if (!(variance >= 0.0))
        throw std::domain_error("complex_gaussian: variance must be non-negative");
    return std::sqrt(variance) * standard_complex_gaussian();
}

ChannelRealization draw_channel(int rx, int tx, double sigma2, RngStream& rng) {
    if (tx < 1 || rx < tx)
        throw std::invalid_argument("draw_channel: need rx >= tx >= 1, got rx=" +
                                    std::to_string(rx) + " tx=" + std::to_string(tx));
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("draw_channel: sigma2 must be positive");
    ChannelRealization ch;
    ch.sigma2 = sigma2;
    ch.h.resize(rx, tx);
    for (int i = 0; i < rx; ++i)
        for (int j = 0; j < tx; ++j)
            ch.h(i, j) = rng.standard_complex_gaussian();
    return ch;
}

CVec transmit(const CVec& x, const ChannelRealization& ch, RngStream& rng) {
    if (x.size() != ch.tx())
        throw std::invalid_argument("transmit: symbol vector length " + std::to_string(x.size()) +
                                    " does not match tx=" + std::to_string(ch.tx()));
    CVec y = ch.h * x;
    for (int i = 0; i < y.size(); ++i)
        y(i) += rng.complex_gaussian(ch.sigma2);
    return y;
}

Frame make_frame(int rx, int tx, double sigma2, const Constellation& c, FrameSeed seed) {
    RngStream rng(seed.seed, seed.index);
    Frame f;
    f.seed = seed;
    f.modulation = c.name;
    f.channel = draw_channel(rx, tx, sigma2, rng);
    f.tx_bits.resize(static_cast<size_t>(tx) * c.bits_per_symbol);
    for (auto& b : f.tx_bits)
        b = rng.bit();
    const auto symbols = map_bits(f.tx_bits, c);
    f.tx_symbols = Eigen::Map<const CVec>(symbols.data(), tx);
    f.received = transmit(f.tx_symbols, f.channel, rng);
    return f;
}

std::string frame_to_jsonl(const Frame& f) {
    nlohmann::json j;
    j["seed"] = f.seed.seed;
    j["index"] = f.seed.index;
    j["mod"] = f.modulation;
    j["sigma2"] = f.channel.sigma2;
    j["rx"] = f.channel.rx();
    j["tx"] = f.channel.tx();
    auto cplx = [](Complex z) { return nlohmann::json::array({z.real(), z.imag()}); };
    nlohmann::json h = nlohmann::json::array();
    for (int i = 0; i < f.channel.rx(); ++i)
        for (int k = 0; k < f.channel.tx(); ++k)
            h.push_back(cplx(f.channel.h(i, k)));
    j["h"] = std::move(h);
    j["bits"] = f.tx_bits;
    nlohmann::json y = nlohmann::json::array();
    for (int i = 0; i < f.received.size(); ++i)
        y.push_back(cplx(f.received(i)));
    j["y"] = std::move(y);
    return j.dump();
}

Frame frame_from_jsonl(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    Frame f;
    f.seed = {j.at("seed").get<std::uint64_t>(), j.at("index").get<std::uint64_t>()};
    f.modulation = j.at("mod").get<std::string>();
    const int rx = j.at("rx").get<int>();
    const int tx = j.at("tx").get<int>();
    f.channel.sigma2 = j.at("sigma2").get<double>();
    f.channel.h.resize(rx, tx);
    const auto& h = j.at("h");
    for (int i = 0; i < rx; ++i)
        for (int k = 0; k < tx; ++k) {
            const auto& z = h.at(i * tx + k);
            f.channel.h(i, k) = {z.at(0).get<double>(), z.at(1).get<double>()};
        }
    f.tx_bits = j.at("bits").get<std::vector<std::uint8_t>>();
    const auto& c = constellation(f.modulation);
    const auto symbols = map_bits(f.tx_bits, c);
    f.tx_symbols = Eigen::Map<const CVec>(symbols.data(), tx);
    f.received.resize(rx);
    const auto& y = j.at("y");
    for (int i = 0; i < rx; ++i)
        f.received(i) = {y.at(i).at(0).get<double>(), y.at(i).at(1).get<double>()};
    return f;
}

}  // namespace pwmimo
