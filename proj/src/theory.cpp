#include "dcov/theory.hpp"

#include "dcov/parallel.hpp"
#include "dcov/rng.hpp"
#include "dcov/stats.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dcov {

double constant_C(int d, double alpha) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::invalid_argument("alpha must be in (0, 2)");
    }
    // Evaluate in log space; Gamma(1 - alpha/2) blows up near alpha = 2.
    const double log_num = std::log(2.0) + 0.5 * d * std::log(M_PI) +
                           std::lgamma(1.0 - alpha / 2.0);
    const double log_den = std::log(alpha) + alpha * std::log(2.0) +
                           std::lgamma((d + alpha) / 2.0);
    return std::exp(log_num - log_den);
}

double bvn_dcor(double rho) {
    if (std::fabs(rho) > 1.0 + 1e-12) {
        throw std::invalid_argument("|rho| must be <= 1");
    }
    rho = std::clamp(rho, -1.0, 1.0);
    const double a = std::clamp(rho, -1.0, 1.0);
    const double half = std::clamp(rho / 2.0, -1.0, 1.0);
    const double numer = rho * std::asin(a) + std::sqrt(1.0 - rho * rho) -
                         rho * std::asin(half) -
                         std::sqrt(4.0 - rho * rho) + 1.0;
    const double denom = 1.0 + M_PI / 3.0 - std::sqrt(3.0);
    return std::sqrt(std::max(0.0, numer / denom));
}

BvnCurve bvn_curve(int points) {
    if (points < 2) throw std::invalid_argument("need at least 2 points");
    BvnCurve c;
    c.rho_grid.reserve(points);
    c.r_values.reserve(points);
    for (int i = 0; i < points; ++i) {
        const double rho =
            -1.0 + 2.0 * static_cast<double>(i) / (points - 1);
        c.rho_grid.push_back(rho);
        c.r_values.push_back(bvn_dcor(rho));
    }
    return c;
}

std::string bvn_curve_csv(const BvnCurve& curve) {
    std::ostringstream out;
    out.precision(12);
    out << "rho,dcor\n";
    for (std::size_t i = 0; i < curve.rho_grid.size(); ++i) {
        out << curve.rho_grid[i] << "," << curve.r_values[i] << "\n";
    }
    return out.str();
}

Eigen::MatrixXd brownian_gram(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    BrownianKernel kernel{static_cast<int>(points.cols())};
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = kernel(points.row(i), points.row(j));
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    return gram;
}

GramFactor factor_brownian_gram(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    const Eigen::MatrixXd gram = brownian_gram(points);
    const double scale = gram.trace() / static_cast<double>(n);

    GramFactor f;
    if (scale <= 0.0) {
        // All points at the origin: the field is identically 0 there.
        f.chol = Eigen::MatrixXd::Zero(n, n);
        f.zero = true;
        return f;
    }
    // The Gram matrix is PSD but often rank-deficient; escalate jitter.
    for (double jitter = 1e-12; jitter <= 1e-8 * 1.0000001;
         jitter *= 100.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(
            gram + jitter * scale *
                       Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            f.chol = llt.matrixL();
            f.jitter_used = jitter * scale;
            return f;
        }
    }
    throw std::runtime_error(
        "Brownian Gram factorization failed at maximum jitter; "
        "matrix is too ill-conditioned");
}

Eigen::VectorXd gp_sample(const Eigen::MatrixXd& points, std::uint64_t seed) {
    const GramFactor f = factor_brownian_gram(points);
    Rng rng(seed);
    Eigen::VectorXd z(points.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    if (f.zero) return Eigen::VectorXd::Zero(points.rows());
    return f.chol * z;
}

McResult brownian_cov_mc(const Sample& x, const Sample& y, long draws,
                         std::uint64_t seed, int threads) {
    const Eigen::Index n = x.n();
    if (n != y.n()) throw std::invalid_argument("sample size mismatch");
    if (n < 2) throw std::invalid_argument("need n >= 2");
    if (draws < 2) throw std::invalid_argument("need at least 2 draws");

    // A constant sample means the field is evaluated at one point for every
    // k, so the centered values vanish identically.
    const auto all_rows_equal = [](const Eigen::MatrixXd& m) {
        for (Eigen::Index i = 1; i < m.rows(); ++i) {
            if (m.row(i) != m.row(0)) return false;
        }
        return true;
    };
    if (all_rows_equal(x.values) || all_rows_equal(y.values)) {
        return {0.0, 0.0, draws};
    }

    const GramFactor fx = factor_brownian_gram(x.values);
    const GramFactor fy = factor_brownian_gram(y.values);
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> stats(static_cast<std::size_t>(draws));
    parallel_for(stats.size(), threads, [&](std::size_t m) {
        Rng rng(seed, static_cast<std::uint64_t>(m) + 1);
        Eigen::VectorXd zx(n), zy(n);
        for (Eigen::Index i = 0; i < n; ++i) zx(i) = rng.normal();
        for (Eigen::Index i = 0; i < n; ++i) zy(i) = rng.normal();
        Eigen::VectorXd u =
            fx.zero ? Eigen::VectorXd::Zero(n).eval() : (fx.chol * zx).eval();
        Eigen::VectorXd v =
            fy.zero ? Eigen::VectorXd::Zero(n).eval() : (fy.chol * zy).eval();
        u.array() -= u.mean();
        v.array() -= v.mean();
        const double m1 = u.dot(v) * inv_n;
        stats[m] = m1 * m1;
    });

    double mean = 0.0;
    for (double s : stats) mean += s;
    mean /= static_cast<double>(draws);
    double ss = 0.0;
    for (double s : stats) {
        const double d = s - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(draws - 1));
    return {mean, sd / std::sqrt(static_cast<double>(draws)), draws};
}

double pairwise_expectation_form(const Sample& x, const Sample& y) {
    return dcov_via_T(distance_matrix(x, 1.0), distance_matrix(y, 1.0))
        .dcov_sq;
}

}  // namespace dcov
