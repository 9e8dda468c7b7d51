#pragma once

#include "dcov/sample.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dcov {

// n i.i.d. pairs with standard normal marginals and correlation rho.
std::pair<Sample, Sample> gen_bvn(long n, double rho, std::uint64_t seed);

// X standard normal, Y = phi(X), the standard normal density at X.
std::pair<Sample, Sample> gen_density_model(long n, std::uint64_t seed);

// Gumbel's bivariate exponential, sampled through the conditional CDF
// F(y|x) = 1 - (1 + theta y) exp(-(1 + theta x) y); theta in [0, 1].
std::pair<Sample, Sample> gen_gumbel_bve(long n, double theta,
                                         std::uint64_t seed);

// Conditional CDF and density of the Gumbel family, exposed so the
// antiderivative can be validated against quadrature.
double gumbel_conditional_cdf(double y, double x, double theta);
double gumbel_conditional_pdf(double y, double x, double theta);

// OLS residuals of Y on [1, X]; residual columns are uncorrelated with
// every X column.
Sample linear_residuals(const Sample& x, const Sample& y);

enum class SimModel { bvn, density, gumbel };

struct PowerModel {
    SimModel kind = SimModel::bvn;
    double param = 0.0;   // rho for bvn, theta for gumbel
    bool residualize = false;  // run tests on (X, OLS residual) instead
};

struct PowerCurve {
    PowerModel model;
    std::vector<long> sample_sizes;
    double level = 0.10;
    std::vector<std::string> tests;
    // power[t][s] = rejection fraction of tests[t] at sample_sizes[s]
    std::vector<std::vector<double>> power;
    long runs_per_cell = 0;
    std::uint64_t seed = 0;
};

struct PowerOptions {
    long runs = 2000;
    double level = 0.10;
    long dcov_replicates = 299;  // permutation replicates per dcov test
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
};

// Monte Carlo rejection rates. Known test names: dcov_perm, pearson_t,
// spearman, rank_dcov.
PowerCurve power_study(const PowerModel& model,
                       const std::vector<long>& sample_sizes,
                       const std::vector<std::string>& tests,
                       const PowerOptions& opts);

std::string power_curve_csv(const PowerCurve& curve);

std::string model_name(const PowerModel& m);

}  // namespace dcov
