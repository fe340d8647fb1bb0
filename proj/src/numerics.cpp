#include "pwmimo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pwmimo {

double log_cn_density(Complex x, Complex mu, double variance) {
    if (!(variance > 0.0))
        throw std::domain_error("log_cn_density: variance must be positive, got " +
                                std::to_string(variance));
    return -std::norm(x - mu) / variance - std::log(std::numbers::pi * variance);
}

HermitianFactor::HermitianFactor(const CMat& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("HermitianFactor: matrix is " + std::to_string(a.rows()) +
                                    "x" + std::to_string(a.cols()) + ", expected square");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("HermitianFactor: matrix is not Hermitian (max |A - A^H| = " +
                                    std::to_string(asym) + ")");
    llt_.compute(a);
    if (llt_.info() != Eigen::Success)
        throw std::domain_error("HermitianFactor: matrix is not positive definite "
                                "(Cholesky pivot failure; check that the noise variance is > 0)");
}

CVec HermitianFactor::solve(const CVec& b) const {
    if (b.size() != dim())
        throw std::invalid_argument("HermitianFactor::solve: rhs has length " +
                                    std::to_string(b.size()) + ", factor is " +
                                    std::to_string(dim()) + "x" + std::to_string(dim()));
    return llt_.solve(b);
}

CVec hermitian_solve(const CMat& a, const CVec& b) {
    return HermitianFactor(a).solve(b);
}

GaussianProduct gaussian_product(const GaussianScalar& a, const GaussianScalar& b) {
    if (!(a.variance > 0.0) || !(b.variance > 0.0))
        throw std::domain_error("gaussian_product: variances must be positive");
    const double w1 = 1.0 / a.variance;
    const double w2 = 1.0 / b.variance;
    const double v = 1.0 / (w1 + w2);
    GaussianProduct out;
    out.density.mean = v * (a.mean * w1 + b.mean * w2);
    out.density.variance = v;
    out.log_scale = log_cn_density(a.mean, b.mean, a.variance + b.variance);
    return out;
}

double log_sum_exp(std::span<const double> values, LseMode mode) {
    if (values.empty())
        throw std::invalid_argument("log_sum_exp: empty input");
    const double m = *std::max_element(values.begin(), values.end());
    if (mode == LseMode::MaxOnly)
        return m;
    if (std::isinf(m) && m < 0.0)
        return m;  // all terms are exactly zero probability
    double s = 0.0;
    for (double v : values)
        s += std::exp(v - m);
    return m + std::log(s);
}

void LseAccumulator::add(double log_term) {
    if (!seeded_) {
        max_ = log_term;
        sum_ = 1.0;
        seeded_ = true;
        return;
    }
    if (log_term <= max_) {
        sum_ += std::exp(log_term - max_);
    } else {
        sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
        max_ = log_term;
    }
}

double LseAccumulator::value() const {
    if (!seeded_)
        throw std::logic_error("LseAccumulator::value: no terms were added");
    if (std::isinf(max_) && max_ < 0.0)
        return max_;
    return max_ + std::log(sum_);
}

}  // namespace pwmimo
