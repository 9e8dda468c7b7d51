#pragma once

namespace dcov {

// Inverse of erf on (-1, 1), |result - true| <= 1e-14 absolute.
double erf_inverse(double y);

// (1 - p) quantile is chi2_quantile_1df(1 - p); argument is the CDF level.
// Quantile of the chi-square distribution with 1 degree of freedom.
double chi2_quantile_1df(double p);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of a Student t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Standard normal density.
double normal_pdf(double x);

}  // namespace dcov
