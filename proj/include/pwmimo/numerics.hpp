#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace pwmimo {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Scalar circularly-symmetric complex Gaussian CN(mean, variance),
/// density exp(-|x - mean|^2 / variance) / (pi * variance).
struct GaussianScalar {
    Complex mean{0.0, 0.0};
    double variance{1.0};
};

/// log of the CN density above, evaluated at x.
double log_cn_density(Complex x, Complex mu, double variance);

/// Cholesky factorization of a Hermitian positive definite matrix.
/// Throws std::invalid_argument if the input is not square or not Hermitian
/// (tolerance 1e-12 relative to the largest entry), std::domain_error if the
/// matrix is not positive definite.
class HermitianFactor {
  public:
    explicit HermitianFactor(const CMat& a);

    CVec solve(const CVec& b) const;
    Eigen::Index dim() const { return llt_.matrixL().rows(); }

  private:
    Eigen::LLT<CMat> llt_;
};

/// One-shot solve of a x = b for Hermitian positive definite a.
CVec hermitian_solve(const CMat& a, const CVec& b);

/// Product of two scalar complex Gaussian densities, which is again an
/// (unnormalized) complex Gaussian:
///   CN(x; m1, v1) * CN(x; m2, v2) = scale * CN(x; m, v)
/// with 1/v = 1/v1 + 1/v2, m = v * (m1/v1 + m2/v2) and
/// scale = CN(m1; m2, v1 + v2). Returned scale is in log domain.
struct GaussianProduct {
    GaussianScalar density;
    double log_scale;
};

GaussianProduct gaussian_product(const GaussianScalar& a, const GaussianScalar& b);

/// log(sum(exp(v))) without overflow: shifts by the max before exponentiating.
/// The MaxOnly mode returns just the shift term max(v), the usual max-log
/// approximation. Empty input is rejected.
enum class LseMode { Exact, MaxOnly };

double log_sum_exp(std::span<const double> values, LseMode mode = LseMode::Exact);

/// Streaming variant of log_sum_exp for accumulating one term at a time.
/// Keeps a running maximum and a sum of exponentials rescaled to it, so the
/// result matches the two-pass version up to roundoff.
class LseAccumulator {
  public:
    void add(double log_term);
    bool empty() const { return !seeded_; }
    double value() const;  // throws std::logic_error if nothing was added

  private:
    double max_ = 0.0;
    double sum_ = 0.0;  // sum of exp(term - max_) over all terms seen so far
    bool seeded_ = false;
};

}  // namespace pwmimo
