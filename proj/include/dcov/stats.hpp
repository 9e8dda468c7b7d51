#pragma once

#include "dcov/sample.hpp"

#include <cstdint>
#include <string>

namespace dcov {

// Distance matrix after double centering: entries(k,l) =
// a_kl - rowmean_k - colmean_l + grand_mean.
struct CenteredMatrix {
    Eigen::MatrixXd entries;
    Eigen::VectorXd row_means;
    Eigen::VectorXd col_means;
    double grand_mean = 0.0;

    Eigen::Index n() const { return entries.rows(); }
};

CenteredMatrix double_center(const DistanceMatrix& dm);

enum class Variant { plain, affine, rank };

std::string variant_name(Variant v);

struct DCovSummary {
    double dcov_sq = 0.0;
    double dcor_sq = 0.0;
    double dvar_x_sq = 0.0;
    double dvar_y_sq = 0.0;
    Eigen::Index n = 0;
    double alpha = 1.0;
    Variant variant = Variant::plain;
};

// V_n^2 = (1/n^2) sum A_kl B_kl and the standardization to R_n^2.
// Tiny negative roundoff (within 1e-12 of the T2 scale) is clamped to 0;
// anything more negative throws, since the quantity is nonnegative.
DCovSummary dcov_stats(const CenteredMatrix& cx, const CenteredMatrix& cy,
                       double alpha = 1.0, Variant variant = Variant::plain);

// Convenience: distances at alpha, center, summarize.
DCovSummary dcov_of(const Sample& x, const Sample& y, double alpha = 1.0,
                    Variant variant = Variant::plain);

// The alternate route over raw distances: V_n^2 = T1 + T2 - 2 T3.
struct TParts {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double dcov_sq = 0.0;
};

TParts dcov_via_T(const DistanceMatrix& dmx, const DistanceMatrix& dmy);

// Normalized test statistic n V_n^2 / T2. T2 = 0 (both samples constant)
// throws: the statistic is undefined there.
double normalized_statistic(const CenteredMatrix& cx,
                            const CenteredMatrix& cy);

// Whitens the sample: X* = X S^{-1/2} with S the n-1 divisor covariance,
// symmetric matrix root. Throws when S is singular or near-singular.
Sample affine_rescale(const Sample& s);

// Ranks 1..n of a d=1 sample; ties broken uniformly at random from seed.
Sample rank_transform(const Sample& s, std::uint64_t seed);

double pearson_correlation(const Sample& x, const Sample& y);

}  // namespace dcov
