#include "pwmimo/modem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pwmimo {

namespace {

Constellation make_bpsk() {
    return {"bpsk", 1, {{1.0, 0.0}, {-1.0, 0.0}}};
}

Constellation make_qpsk() {
    const double s = 1.0 / std::sqrt(2.0);
    Constellation c{"qpsk", 2, std::vector<Complex>(4)};
    // First bit selects the real sign, second the imaginary sign, 0 -> +.
    c.points[0b00] = {s, s};
    c.points[0b01] = {s, -s};
    c.points[0b10] = {-s, s};
    c.points[0b11] = {-s, -s};
    return c;
}

// Gray-labeled 4-level amplitude axis used by 4pam directly and by 16qam per
// dimension: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (one bit flips per step).
constexpr std::array<double, 4> kGrayAxis = {-3.0, -1.0, 1.0, 3.0};
constexpr std::array<int, 4> kGrayWord = {0b00, 0b01, 0b11, 0b10};

Constellation make_4pam() {
    const double s = 1.0 / std::sqrt(5.0);
    Constellation c{"4pam", 2, std::vector<Complex>(4)};
    for (int k = 0; k < 4; ++k)
        c.points[kGrayWord[k]] = {kGrayAxis[k] * s, 0.0};
    return c;
}

Constellation make_16qam() {
    const double s = 1.0 / std::sqrt(10.0);
    Constellation c{"16qam", 4, std::vector<Complex>(16)};
    // First two bits label the real axis, last two the imaginary axis.
    for (int i = 0; i < 4; ++i)
        for (int q = 0; q < 4; ++q)
            c.points[(kGrayWord[i] << 2) | kGrayWord[q]] = {kGrayAxis[i] * s, kGrayAxis[q] * s};
    return c;
}

// 32-point cross: the 6x6 grid on odd coordinates {-5,-3,-1,1,3,5}^2 with the
// four corners removed. Labels follow a snake path through the rows, assigned
// the binary-reflected Gray code of the path position, so consecutive path
// steps differ in one bit (quasi-Gray: the four jumps where the row width
// changes are not unit-distance). Mean energy of the raw grid is 20.
Constellation make_32qam_cross() {
    const double s = 1.0 / std::sqrt(20.0);
    Constellation c{"32qam-cross", 5, std::vector<Complex>(32)};
    int pos = 0;
    for (int row = 0; row < 6; ++row) {
        const double y = 5.0 - 2.0 * row;
        std::vector<double> xs;
        for (double x = -5.0; x <= 5.0; x += 2.0) {
            if (std::abs(x) > 4.0 && std::abs(y) > 4.0)
                continue;  // corner
            xs.push_back(x);
        }
        if (row % 2 == 1)
            std::reverse(xs.begin(), xs.end());
        for (double x : xs) {
            const int gray = pos ^ (pos >> 1);
            c.points[gray] = {x * s, y * s};
            ++pos;
        }
    }
    return c;
}

}  // namespace

const Constellation& constellation(std::string_view name) {
    static const std::map<std::string, Constellation, std::less<>> registry = [] {
        std::map<std::string, Constellation, std::less<>> r;
        for (auto c : {make_bpsk(), make_qpsk(), make_4pam(), make_16qam(), make_32qam_cross()})
            r.emplace(c.name, std::move(c));
        return r;
    }();
    auto it = registry.find(name);
    if (it == registry.end() && name == "32qam")
        it = registry.find("32qam-cross");
    if (it == registry.end()) {
        std::string valid;
        for (const auto& [k, v] : registry)
            valid += (valid.empty() ? "" : ", ") + k;
        throw std::invalid_argument("unknown constellation '" + std::string(name) +
                                    "', expected one of: " + valid + " (alias 32qam)");
    }
    return it->second;
}

std::vector<std::string> constellation_names() {
    return {"bpsk", "qpsk", "4pam", "16qam", "32qam-cross"};
}

void SymbolPosterior::normalize() {
    const double z = log_sum_exp(log_probs);
    for (double& p : log_probs)
        p -= z;
}

int SymbolPosterior::argmax() const {
    if (log_probs.empty())
        throw std::logic_error("SymbolPosterior::argmax on empty posterior");
    return static_cast<int>(std::max_element(log_probs.begin(), log_probs.end()) -
                            log_probs.begin());
}

SymbolPosterior project_gaussian(const GaussianScalar& belief, const Constellation& c) {
    if (!(belief.variance > 0.0))
        throw std::domain_error("project_gaussian: belief variance must be positive");
    SymbolPosterior p;
    p.log_probs.resize(c.points.size());
    for (size_t s = 0; s < c.points.size(); ++s)
        p.log_probs[s] = -std::norm(c.points[s] - belief.mean) / belief.variance;
    p.normalize();
    return p;
}

std::vector<int> bits_to_labels(std::span<const std::uint8_t> bits, const Constellation& c) {
    const int m = c.bits_per_symbol;
    if (bits.size() % m != 0)
        throw std::invalid_argument("bit string length " + std::to_string(bits.size()) +
                                    " is not a multiple of bits_per_symbol = " + std::to_string(m));
    std::vector<int> labels(bits.size() / m);
    for (size_t g = 0; g < labels.size(); ++g) {
        int w = 0;
        for (int t = 0; t < m; ++t) {
            const std::uint8_t b = bits[g * m + t];
            if (b > 1)
                throw std::invalid_argument("bits must be 0 or 1");
            w = (w << 1) | b;
        }
        labels[g] = w;
    }
    return labels;
}

std::vector<Complex> map_bits(std::span<const std::uint8_t> bits, const Constellation& c) {
    std::vector<Complex> out;
    for (int w : bits_to_labels(bits, c))
        out.push_back(c.points[w]);
    return out;
}

std::vector<double> bit_llrs(const SymbolPosterior& posterior, const Constellation& c) {
    const int m = c.bits_per_symbol;
    if (posterior.log_probs.size() != c.points.size())
        throw std::invalid_argument("posterior size does not match constellation order");
    std::vector<double> llrs(m);
    for (int t = 0; t < m; ++t) {
        const int mask = 1 << (m - 1 - t);
        LseAccumulator zero, one;
        for (size_t s = 0; s < c.points.size(); ++s)
            ((static_cast<int>(s) & mask) ? one : zero).add(posterior.log_probs[s]);
        const double llr = zero.value() - one.value();
        llrs[t] = std::clamp(llr, -kLlrClamp, kLlrClamp);
    }
    return llrs;
}

std::vector<std::uint8_t> llrs_to_bits(std::span<const double> llrs) {
    std::vector<std::uint8_t> bits(llrs.size());
    for (size_t i = 0; i < llrs.size(); ++i)
        bits[i] = llrs[i] < 0.0 ? 1 : 0;
    return bits;
}

std::string constellation_csv(const Constellation& c) {
    std::ostringstream os;
    os.precision(17);
    os << "label,re,im\n";
    for (size_t w = 0; w < c.points.size(); ++w) {
        for (int t = c.bits_per_symbol - 1; t >= 0; --t)
            os << ((w >> t) & 1);
        os << ',' << c.points[w].real() << ',' << c.points[w].imag() << '\n';
    }
    return os.str();
}

}  // namespace pwmimo
