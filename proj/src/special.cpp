#include "dcov/special.hpp"

#include <cmath>
#include <stdexcept>

namespace dcov {

double erf_inverse(double y) {
    if (!(y > -1.0 && y < 1.0)) {
        throw std::invalid_argument("erf_inverse argument must be in (-1,1)");
    }
    if (y == 0.0) return 0.0;
    const double sign = y < 0.0 ? -1.0 : 1.0;
    y = std::fabs(y);

    // Crude starting point, then bisection + Newton polish.
    double lo = 0.0, hi = 6.5;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::erf(mid) < y ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double f = std::erf(x) - y;
        const double fp = 2.0 / std::sqrt(M_PI) * std::exp(-x * x);
        if (fp == 0.0) break;
        x -= f / fp;
    }
    return sign * x;
}

double chi2_quantile_1df(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("chi2 quantile level must be in (0,1)");
    }
    // F(x) = erf(sqrt(x/2)) for 1 df.
    const double z = erf_inverse(p);
    return 2.0 * z * z;
}

namespace {

// Continued fraction for the incomplete beta, modified Lentz.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction failed");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) {
        throw std::invalid_argument("incomplete beta x must be in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                            std::lgamma(b) + a * std::log(x) +
                            b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("df must be positive");
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

}  // namespace dcov
