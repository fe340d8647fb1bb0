#include "pwmimo/modem.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

using namespace pwmimo;

namespace {

int hamming(int a, int b) { return __builtin_popcount(a ^ b); }

double mean_power(const Constellation& c) {
    double acc = 0.0;
    for (Complex p : c.points) acc += std::norm(p);
    return acc / c.size();
}

}  // namespace

TEST_CASE("registry rejects unknown names and lists known ones") {
    CHECK_THROWS_AS(constellation("nope"), std::invalid_argument);
    for (const auto& name : constellation_names()) CHECK(constellation(name).size() > 0);
    // the cross alias resolves to the same table
    CHECK(constellation("32qam").points == constellation("32qam-cross").points);
}

TEST_CASE("bpsk labeling") {
    const auto& c = constellation("bpsk");
    CHECK(c.bits_per_symbol == 1);
    CHECK(std::abs(c.points[0] - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(c.points[1] - Complex(-1, 0)) < 1e-15);
}

TEST_CASE("qpsk labeling puts 00 in the first quadrant") {
    const auto& c = constellation("qpsk");
    CHECK(c.bits_per_symbol == 2);
    const double s = 0.7071067811865475;
    CHECK(std::abs(c.points[0] - Complex(s, s)) < 1e-15);
    CHECK(mean_power(c) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("4pam is a Gray-labeled unit-power axis") {
    const auto& c = constellation("4pam");
    CHECK(c.bits_per_symbol == 2);
    const double s = 0.4472135954999579;
    std::vector<double> expect = {-3 * s, -s, s, 3 * s};
    // labels 00,01,11,10 walk the axis left to right
    std::vector<int> order = {0, 1, 3, 2};
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(c.points[order[i]].real() - expect[i]) < 1e-14);
        CHECK(std::abs(c.points[order[i]].imag()) < 1e-14);
    }
    CHECK(mean_power(c) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("16qam has unit power, distinct points, Gray neighbours") {
    const auto& c = constellation("16qam");
    CHECK(c.size() == 16);
    CHECK(mean_power(c) == doctest::Approx(1.0).epsilon(1e-12));
    std::set<std::pair<double, double>> uniq;
    for (Complex p : c.points) uniq.insert({p.real(), p.imag()});
    CHECK(uniq.size() == 16);

    // nearest geometric neighbours differ in exactly one label bit
    double dmin = 1e9;
    for (int a = 0; a < 16; ++a)
        for (int b = a + 1; b < 16; ++b)
            dmin = std::min(dmin, std::abs(c.points[a] - c.points[b]));
    for (int a = 0; a < 16; ++a)
        for (int b = a + 1; b < 16; ++b)
            if (std::abs(c.points[a] - c.points[b]) < dmin * 1.01)
                CHECK(hamming(a, b) == 1);
}

TEST_CASE("32qam cross shape") {
    const auto& c = constellation("32qam");
    CHECK(c.size() == 32);
    CHECK(c.bits_per_symbol == 5);
    CHECK(mean_power(c) == doctest::Approx(1.0).epsilon(1e-12));
    std::set<std::pair<double, double>> uniq;
    for (Complex p : c.points) uniq.insert({p.real(), p.imag()});
    CHECK(uniq.size() == 32);
}

TEST_CASE("map_bits walks groups MSB-first") {
    const auto& c = constellation("qpsk");
    std::vector<std::uint8_t> bits = {0, 0, 1, 0, 0, 1, 1, 1};
    auto syms = map_bits(bits, c);
    REQUIRE(syms.size() == 4);
    CHECK(std::abs(syms[0] - c.points[0]) < 1e-15);
    CHECK(std::abs(syms[1] - c.points[2]) < 1e-15);
    CHECK(std::abs(syms[2] - c.points[1]) < 1e-15);
    CHECK(std::abs(syms[3] - c.points[3]) < 1e-15);

    auto labels = bits_to_labels(bits, c);
    CHECK(labels == std::vector<int>{0, 2, 1, 3});

    std::vector<std::uint8_t> ragged = {0, 1, 0};
    CHECK_THROWS_AS(map_bits(ragged, c), std::invalid_argument);
    std::vector<std::uint8_t> junk = {0, 2};
    CHECK_THROWS_AS(map_bits(junk, c), std::invalid_argument);
}

TEST_CASE("SymbolPosterior normalize and argmax") {
    SymbolPosterior p{{-1.0, -2.0, -0.5, -3.0}};
    p.normalize();
    double mass = 0.0;
    for (double lp : p.log_probs) mass += std::exp(lp);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.argmax() == 2);
}

TEST_CASE("bit_llrs on a uniform posterior are zero") {
    const auto& c = constellation("16qam");
    SymbolPosterior p{std::vector<double>(16, 0.0)};
    p.normalize();
    for (double llr : bit_llrs(p, c)) CHECK(llr == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("bit_llrs on a point mass hit the clamp with the right signs") {
    const auto& c = constellation("qpsk");
    for (int label = 0; label < 4; ++label) {
        SymbolPosterior p{std::vector<double>(4, -1e9)};
        p.log_probs[label] = 0.0;
        p.normalize();
        auto llrs = bit_llrs(p, c);
        REQUIRE(llrs.size() == 2);
        // MSB-first: bit k of the label is 1 iff llr[k] is negative
        CHECK(llrs[0] == doctest::Approx((label & 2) ? -kLlrClamp : kLlrClamp));
        CHECK(llrs[1] == doctest::Approx((label & 1) ? -kLlrClamp : kLlrClamp));
        CHECK(llrs_to_bits(llrs) ==
              std::vector<std::uint8_t>{std::uint8_t((label >> 1) & 1),
                                        std::uint8_t(label & 1)});
    }
}

TEST_CASE("point-mass demap recovers labels for every constellation") {
    for (const auto& name : constellation_names()) {
        const auto& c = constellation(name);
        for (int label = 0; label < c.size(); ++label) {
            SymbolPosterior p{std::vector<double>(c.size(), -1e9)};
            p.log_probs[label] = 0.0;
            p.normalize();
            auto bits = llrs_to_bits(bit_llrs(p, c));
            int word = 0;
            for (std::uint8_t b : bits) word = (word << 1) | b;
            CHECK(word == label);
        }
    }
}

TEST_CASE("scalar bpsk LLR has the matched-filter closed form") {
    // y = x + n with x in {+1,-1}: the posterior route must reproduce
    // log p(y|+1)/p(y|-1) = (|y+1|^2 - |y-1|^2)/sigma2 = 4 Re(y)/sigma2.
    const auto& c = constellation("bpsk");
    const double sigma2 = 1.0;
    const Complex y{0.5, 0.0};
    SymbolPosterior p{{-std::norm(y - c.points[0]) / sigma2, -std::norm(y - c.points[1]) / sigma2}};
    p.normalize();
    auto llrs = bit_llrs(p, c);
    CHECK(llrs[0] == doctest::Approx(4.0 * y.real() / sigma2).epsilon(1e-12));
}

TEST_CASE("project_gaussian prefers the nearest point and validates variance") {
    const auto& c = constellation("qpsk");
    auto p = project_gaussian({c.points[3] * 1.05, 0.1}, c);
    CHECK(p.argmax() == 3);
    double mass = 0.0;
    for (double lp : p.log_probs) mass += std::exp(lp);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(project_gaussian({{0.0, 0.0}, 0.0}, c), std::domain_error);
}

TEST_CASE("constellation_csv is one header plus one row per point") {
    const auto& c = constellation("qpsk");
    std::istringstream in(constellation_csv(c));
    std::string line;
    std::getline(in, line);
    CHECK(line == "label,re,im");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.substr(0, 2).find_first_not_of("01") == std::string::npos);
        ++rows;
    }
    CHECK(rows == c.size());
}
