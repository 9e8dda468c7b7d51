#include "dcov/sims.hpp"

#include "dcov/inference.hpp"
#include "dcov/parallel.hpp"
#include "dcov/rng.hpp"
#include "dcov/special.hpp"
#include "dcov/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dcov {

std::pair<Sample, Sample> gen_bvn(long n, double rho, std::uint64_t seed) {
    if (std::fabs(rho) > 1.0) throw std::invalid_argument("|rho| must be <= 1");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    Rng rng(seed);
    Eigen::MatrixXd x(n, 1), y(n, 1);
    const double tail = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    for (long i = 0; i < n; ++i) {
        const double u = rng.normal();
        const double z = rng.normal();
        x(i, 0) = u;
        y(i, 0) = rho * u + tail * z;
    }
    return {Sample(std::move(x), {"x"}), Sample(std::move(y), {"y"})};
}

std::pair<Sample, Sample> gen_density_model(long n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    Rng rng(seed);
    Eigen::MatrixXd x(n, 1), y(n, 1);
    for (long i = 0; i < n; ++i) {
        const double u = rng.normal();
        x(i, 0) = u;
        y(i, 0) = normal_pdf(u);
    }
    return {Sample(std::move(x), {"x"}), Sample(std::move(y), {"y"})};
}

double gumbel_conditional_pdf(double y, double x, double theta) {
    if (y < 0.0) return 0.0;
    const double c = 1.0 + theta * x;
    return std::exp(-c * y) * (c * (1.0 + theta * y) - theta);
}

double gumbel_conditional_cdf(double y, double x, double theta) {
    if (y <= 0.0) return 0.0;
    const double c = 1.0 + theta * x;
    return 1.0 - (1.0 + theta * y) * std::exp(-c * y);
}

namespace {

// Inverts F(.|x) at u by bracketed bisection; F is monotone in y.
double gumbel_conditional_quantile(double u, double x, double theta) {
    double hi = 1.0;
    while (gumbel_conditional_cdf(hi, x, theta) < u) hi *= 2.0;
    double lo = 0.0;
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (gumbel_conditional_cdf(mid, x, theta) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::pair<Sample, Sample> gen_gumbel_bve(long n, double theta,
                                         std::uint64_t seed) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("theta must be in [0, 1]");
    }
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    Rng rng(seed);
    Eigen::MatrixXd x(n, 1), y(n, 1);
    for (long i = 0; i < n; ++i) {
        const double xv = rng.exponential();
        double u;
        do {
            u = rng.uniform();
        } while (u <= 0.0);
        x(i, 0) = xv;
        y(i, 0) = gumbel_conditional_quantile(u, xv, theta);
    }
    return {Sample(std::move(x), {"x"}), Sample(std::move(y), {"y"})};
}

Sample linear_residuals(const Sample& x, const Sample& y) {
    const Eigen::Index n = x.n();
    if (n != y.n()) throw std::invalid_argument("sample size mismatch");
    if (n <= x.dim() + 1) {
        throw std::invalid_argument("need n > d_x + 1 for regression");
    }
    Eigen::MatrixXd design(n, x.dim() + 1);
    design.col(0).setOnes();
    design.rightCols(x.dim()) = x.values;

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        throw std::runtime_error("rank-deficient design matrix");
    }
    const Eigen::MatrixXd beta = qr.solve(y.values);
    Eigen::MatrixXd resid = y.values - design * beta;

    std::vector<std::string> names;
    for (const auto& nm : y.column_names) names.push_back(nm + "_resid");
    return Sample(std::move(resid), std::move(names));
}

std::string model_name(const PowerModel& m) {
    std::ostringstream out;
    switch (m.kind) {
        case SimModel::bvn: out << "bvn(" << m.param << ")"; break;
        case SimModel::density: out << "density_model"; break;
        case SimModel::gumbel: out << "gumbel(" << m.param << ")"; break;
    }
    if (m.residualize) out << "+residuals";
    return out.str();
}

namespace {

std::pair<Sample, Sample> generate(const PowerModel& m, long n,
                                   std::uint64_t seed) {
    std::pair<Sample, Sample> data;
    switch (m.kind) {
        case SimModel::bvn: data = gen_bvn(n, m.param, seed); break;
        case SimModel::density: data = gen_density_model(n, seed); break;
        case SimModel::gumbel: data = gen_gumbel_bve(n, m.param, seed); break;
    }
    if (m.residualize) {
        data.second = linear_residuals(data.first, data.second);
    }
    return data;
}

bool pearson_t_reject(const Sample& x, const Sample& y, double level) {
    const Eigen::Index n = x.n();
    const double r = pearson_correlation(x, y);
    if (std::fabs(r) >= 1.0) return true;
    const double df = static_cast<double>(n - 2);
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return student_t_two_sided_p(t, df) <= level;
}

// Ordinal ranks with index-order tie breaking; inputs here are continuous
// so ties have probability zero.
Sample ordinal_ranks(const Sample& s) {
    const Eigen::Index n = s.n();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (s.values(a, 0) != s.values(b, 0)) {
            return s.values(a, 0) < s.values(b, 0);
        }
        return a < b;
    });
    Eigen::MatrixXd r(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        r(order[i], 0) = static_cast<double>(i + 1);
    }
    return Sample(std::move(r), {"rank"});
}

bool spearman_reject(const Sample& x, const Sample& y, double level) {
    return pearson_t_reject(ordinal_ranks(x), ordinal_ranks(y), level);
}

}  // namespace

PowerCurve power_study(const PowerModel& model,
                       const std::vector<long>& sample_sizes,
                       const std::vector<std::string>& tests,
                       const PowerOptions& opts) {
    if (opts.runs < 100) {
        throw std::invalid_argument("need at least 100 runs per cell");
    }
    for (const auto& t : tests) {
        if (t != "dcov_perm" && t != "pearson_t" && t != "spearman" &&
            t != "rank_dcov") {
            throw std::invalid_argument("unknown test name: " + t);
        }
    }

    PowerCurve curve;
    curve.model = model;
    curve.sample_sizes = sample_sizes;
    curve.level = opts.level;
    curve.tests = tests;
    curve.runs_per_cell = opts.runs;
    curve.seed = opts.seed;
    curve.power.assign(tests.size(),
                       std::vector<double>(sample_sizes.size(), 0.0));

    for (std::size_t si = 0; si < sample_sizes.size(); ++si) {
        const long n = sample_sizes[si];
        // rejects[run][test]
        std::vector<std::vector<char>> rejects(
            static_cast<std::size_t>(opts.runs),
            std::vector<char>(tests.size(), 0));

        parallel_for(
            static_cast<std::size_t>(opts.runs), opts.threads,
            [&](std::size_t run) {
                Rng stream(opts.seed,
                           (static_cast<std::uint64_t>(si) << 32) ^ run);
                const std::uint64_t data_seed = stream();
                const std::uint64_t test_seed = stream();
                const auto [xs, ys] = generate(model, n, data_seed);
                for (std::size_t ti = 0; ti < tests.size(); ++ti) {
                    const auto& name = tests[ti];
                    bool rej = false;
                    if (name == "dcov_perm") {
                        const TestReport r = permutation_test(
                            xs, ys, opts.dcov_replicates, test_seed);
                        rej = *r.p_value <= opts.level;
                    } else if (name == "pearson_t") {
                        rej = pearson_t_reject(xs, ys, opts.level);
                    } else if (name == "spearman") {
                        rej = spearman_reject(xs, ys, opts.level);
                    } else {  // rank_dcov
                        const TestReport r =
                            rank_test(xs, ys, opts.level, test_seed);
                        rej = *r.reject;
                    }
                    rejects[run][ti] = rej ? 1 : 0;
                }
            });

        for (std::size_t ti = 0; ti < tests.size(); ++ti) {
            long count = 0;
            for (long run = 0; run < opts.runs; ++run) {
                count += rejects[static_cast<std::size_t>(run)][ti];
            }
            curve.power[ti][si] =
                static_cast<double>(count) / static_cast<double>(opts.runs);
        }
    }
    return curve;
}

std::string power_curve_csv(const PowerCurve& curve) {
    std::ostringstream out;
    out.precision(10);
    out << "model,n,test,power,runs,level,seed\n";
    for (std::size_t ti = 0; ti < curve.tests.size(); ++ti) {
        for (std::size_t si = 0; si < curve.sample_sizes.size(); ++si) {
            out << model_name(curve.model) << "," << curve.sample_sizes[si]
                << "," << curve.tests[ti] << "," << curve.power[ti][si] << ","
                << curve.runs_per_cell << "," << curve.level << ","
                << curve.seed << "\n";
        }
    }
    return out.str();
}

}  // namespace dcov
