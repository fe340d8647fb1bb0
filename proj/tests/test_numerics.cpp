#include "pwmimo/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

using namespace pwmimo;

namespace {

// Plain complex Gaussian elimination with partial pivoting, used as an
// independent check on the Cholesky path.
CVec eliminate(CMat a, CVec b) {
    const int n = static_cast<int>(a.rows());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        a.row(col).swap(a.row(pivot));
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < n; ++r) {
            const Complex factor = a(r, col) / a(col, col);
            a.row(r) -= factor * a.row(col);
            b[r] -= factor * b[col];
        }
    }
    CVec x = CVec::Zero(n);
    for (int r = n - 1; r >= 0; --r) {
        Complex acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
        x[r] = acc / a(r, r);
    }
    return x;
}

CMat random_hpd(int n, std::mt19937& gen) {
    std::normal_distribution<double> dist(0.0, 1.0);
    CMat g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = Complex(dist(gen), dist(gen));
    CMat a = g * g.adjoint();
    a += 0.1 * CMat::Identity(n, n);
    return a;
}

}  // namespace

TEST_CASE("log_sum_exp handles extreme magnitudes without overflow") {
    std::vector<double> v = {-1000.0, -1001.0};
    CHECK(log_sum_exp(v) == doctest::Approx(-999.6867383124818).epsilon(1e-14));

    std::vector<double> huge = {1000.0, 1000.0};
    CHECK(log_sum_exp(huge) == doctest::Approx(1000.0 + 0.6931471805599453).epsilon(1e-14));
}

TEST_CASE("log_sum_exp basics") {
    std::vector<double> one = {0.0};
    CHECK(log_sum_exp(one) == doctest::Approx(0.0));

    std::vector<double> pair = {0.3, 0.3};
    CHECK(log_sum_exp(pair) == doctest::Approx(0.3 + std::log(2.0)).epsilon(1e-14));

    std::vector<double> empty;
    CHECK_THROWS_AS(log_sum_exp(empty), std::invalid_argument);

    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> gone = {ninf, ninf};
    CHECK(log_sum_exp(gone) == ninf);
}

TEST_CASE("log_sum_exp MaxOnly mode returns the running maximum") {
    std::vector<double> v = {-2.0, 1.5, 0.0};
    CHECK(log_sum_exp(v, LseMode::MaxOnly) == doctest::Approx(1.5));
}

TEST_CASE("LseAccumulator matches the two-pass result") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(-500.0, 500.0);
    std::vector<double> terms(64);
    LseAccumulator acc;
    for (double& t : terms) {
        t = dist(gen);
        acc.add(t);
    }
    CHECK(acc.value() == doctest::Approx(log_sum_exp(terms)).epsilon(1e-12));

    LseAccumulator fresh;
    CHECK(fresh.empty());
    CHECK_THROWS_AS(fresh.value(), std::logic_error);
}

TEST_CASE("log_cn_density reference point and domain guard") {
    CHECK(log_cn_density({0.0, 0.0}, {0.0, 0.0}, 1.0) ==
          doctest::Approx(-1.1447298858494002).epsilon(1e-14));
    // integrating to one is approximated by a coarse grid sum
    double mass = 0.0;
    const double step = 0.05;
    for (double re = -6.0; re < 6.0; re += step)
        for (double im = -6.0; im < 6.0; im += step)
            mass += std::exp(log_cn_density({re, im}, {0.5, -0.25}, 0.7)) * step * step;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));

    CHECK_THROWS_AS(log_cn_density({0.0, 0.0}, {0.0, 0.0}, 0.0), std::domain_error);
    CHECK_THROWS_AS(log_cn_density({0.0, 0.0}, {0.0, 0.0}, -1.0), std::domain_error);
}

TEST_CASE("gaussian_product closed forms") {
    GaussianScalar unit{{0.0, 0.0}, 1.0};
    auto p = gaussian_product(unit, unit);
    CHECK(p.density.mean.real() == doctest::Approx(0.0));
    CHECK(p.density.mean.imag() == doctest::Approx(0.0));
    CHECK(p.density.variance == doctest::Approx(0.5).epsilon(1e-14));

    GaussianScalar a{{1.0, 0.0}, 1.0};
    GaussianScalar b{{3.0, 0.0}, 1.0};
    auto q = gaussian_product(a, b);
    CHECK(q.density.mean.real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(q.density.variance == doctest::Approx(0.5).epsilon(1e-14));
    // scale is the density of one mean under the other with summed variance
    CHECK(q.log_scale == doctest::Approx(-3.8378770664093453).epsilon(1e-14));

    // same-density product halves the variance and keeps the mean
    GaussianScalar c{{0.7, -1.2}, 0.3};
    auto r = gaussian_product(c, c);
    CHECK(r.density.mean.real() == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(r.density.mean.imag() == doctest::Approx(-1.2).epsilon(1e-14));
    CHECK(r.density.variance == doctest::Approx(0.15).epsilon(1e-14));
}

TEST_CASE("gaussian_product is commutative") {
    GaussianScalar a{{0.3, -0.8}, 0.9};
    GaussianScalar b{{-1.1, 0.2}, 2.5};
    auto ab = gaussian_product(a, b);
    auto ba = gaussian_product(b, a);
    CHECK(std::abs(ab.density.mean - ba.density.mean) < 1e-12);
    CHECK(ab.density.variance == doctest::Approx(ba.density.variance).epsilon(1e-12));
    CHECK(ab.log_scale == doctest::Approx(ba.log_scale).epsilon(1e-12));
}

TEST_CASE("HermitianFactor validates its input") {
    CMat rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(HermitianFactor{rect}, std::invalid_argument);

    CMat skew(2, 2);
    skew << Complex(1, 0), Complex(0, 1), Complex(0, 1), Complex(1, 0);
    CHECK_THROWS_AS(HermitianFactor{skew}, std::invalid_argument);

    CMat negdef = -CMat::Identity(3, 3);
    CHECK_THROWS_AS(HermitianFactor{negdef}, std::domain_error);
}

TEST_CASE("HermitianFactor solves a small system exactly") {
    CMat k(2, 2);
    k << Complex(2, 0), Complex(0, 1), Complex(0, -1), Complex(2, 0);
    CVec b(2);
    b << Complex(1, 0), Complex(0, 0);
    CVec x = HermitianFactor(k).solve(b);
    CHECK(std::abs(x[0] - Complex(2.0 / 3.0, 0.0)) < 1e-14);
    CHECK(std::abs(x[1] - Complex(0.0, 1.0 / 3.0)) < 1e-14);
}

TEST_CASE("HermitianFactor agrees with Gaussian elimination on random systems") {
    std::mt19937 gen(11);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int n : {2, 4, 8, 16}) {
        CMat a = random_hpd(n, gen);
        CVec b(n);
        for (int r = 0; r < n; ++r) b[r] = Complex(dist(gen), dist(gen));
        CVec chol = HermitianFactor(a).solve(b);
        CVec ref = eliminate(a, b);
        for (int r = 0; r < n; ++r) CHECK(std::abs(chol[r] - ref[r]) < 1e-10);
    }
}

TEST_CASE("hermitian_solve one-shot helper") {
    CVec b(2);
    b << Complex(1, 1), Complex(2, 0);
    CVec id = hermitian_solve(CMat::Identity(2, 2), b);
    CHECK(std::abs(id[0] - b[0]) < 1e-15);
    CHECK(std::abs(id[1] - b[1]) < 1e-15);

    CMat d = CMat::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    CVec rhs(2);
    rhs << Complex(2, 0), Complex(4, 0);
    CVec x = hermitian_solve(d, rhs);
    CHECK(std::abs(x[0] - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(x[1] - Complex(1, 0)) < 1e-15);
}
