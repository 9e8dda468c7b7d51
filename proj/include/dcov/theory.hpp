#pragma once

#include "dcov/sample.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dcov {

// C(d, alpha) = 2 pi^{d/2} Gamma(1 - alpha/2) / (alpha 2^alpha
// Gamma((d+alpha)/2)); for alpha = 1 this is the weight constant c_d.
double constant_C(int d, double alpha);

// Distance correlation of a standard bivariate normal pair at correlation
// rho, from the closed form; R(0) = 0, R(+-1) = 1.
double bvn_dcor(double rho);

struct BvnCurve {
    std::vector<double> rho_grid;
    std::vector<double> r_values;
};

// Symmetric grid of `points` values of rho on [-1, 1].
BvnCurve bvn_curve(int points = 201);

std::string bvn_curve_csv(const BvnCurve& curve);

// Covariance kernel of the Brownian field used for the coincidence check:
// K(t, s) = |t| + |s| - |t - s| (Euclidean norms in R^d).
struct BrownianKernel {
    int dimension = 1;

    double operator()(const Eigen::RowVectorXd& t,
                      const Eigen::RowVectorXd& s) const {
        return t.norm() + s.norm() - (t - s).norm();
    }
};

Eigen::MatrixXd brownian_gram(const Eigen::MatrixXd& points);

// Lower-triangular factor of the Brownian Gram matrix with escalating
// diagonal jitter. `jitter_used` records the final amount.
struct GramFactor {
    Eigen::MatrixXd chol;  // L with L L^T = K + jitter I
    double jitter_used = 0.0;
    bool zero = false;  // degenerate all-zero Gram
};

GramFactor factor_brownian_gram(const Eigen::MatrixXd& points);

// Zero-mean Gaussian vector with the Brownian Gram covariance at `points`.
Eigen::VectorXd gp_sample(const Eigen::MatrixXd& points, std::uint64_t seed);

struct McResult {
    double estimate = 0.0;
    double mc_se = 0.0;
    long draws = 0;
};

// Monte Carlo estimate of the Brownian covariance at the empirical
// distribution of (x, y): per draw, sample independent fields over the x-
// and y-points, center each over the sample, and square the mean product.
McResult brownian_cov_mc(const Sample& x, const Sample& y, long draws,
                         std::uint64_t seed, int threads = 1);

// Plug-in evaluation of the pairwise-expectation identity
// S1 + S2 - 2 S3 at the empirical measure (same arithmetic as the T-route).
double pairwise_expectation_form(const Sample& x, const Sample& y);

}  // namespace dcov
