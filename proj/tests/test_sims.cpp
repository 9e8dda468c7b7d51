#include "dcov/sims.hpp"

#include "dcov/special.hpp"
#include "dcov/stats.hpp"
#include "dcov/theory.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

using namespace dcov;

namespace {

std::vector<double> col(const Sample& s) {
    return {s.values.col(0).data(), s.values.col(0).data() + s.n()};
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double exp1_cdf(double y) { return y <= 0 ? 0.0 : 1.0 - std::exp(-y); }

// Composite Simpson rule on [0, b].
double simpson(const std::function<double(double)>& f, double b, int panels) {
    const double h = b / (2 * panels);
    double s = f(0.0) + f(b);
    for (int i = 1; i < 2 * panels; ++i) {
        s += f(i * h) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

double sample_corr(const Sample& x, const Sample& y) {
    return pearson_correlation(x, y);
}

}  // namespace

TEST_CASE("bvn generator: rho = 1 duplicates the X column") {
    const auto [x, y] = gen_bvn(200, 1.0, 5);
    CHECK((x.values - y.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bvn generator: marginals are standard normal (KS)") {
    for (double rho : {0.0, 0.5, -0.8}) {
        const auto [x, y] = gen_bvn(4000, rho, 17);
        CHECK(testutil::ks_statistic(col(x), std_normal_cdf) <
              1.63 / std::sqrt(4000.0));
        CHECK(testutil::ks_statistic(col(y), std_normal_cdf) <
              1.63 / std::sqrt(4000.0));
    }
}

TEST_CASE("bvn generator: empirical correlation tracks rho") {
    for (double rho : {-0.7, 0.0, 0.3, 0.9}) {
        const auto [x, y] = gen_bvn(20000, rho, 23);
        // se of r is about (1 - rho^2) / sqrt(n)
        const double se = (1.0 - rho * rho) / std::sqrt(20000.0) + 1e-6;
        CHECK(std::fabs(sample_corr(x, y) - rho) < 4.0 * se);
    }
}

TEST_CASE("bvn generator: dcor approaches the closed form at rho = 0.5") {
    const auto [x, y] = gen_bvn(1500, 0.5, 29);
    const double r = std::sqrt(dcov_of(x, y).dcor_sq);
    CHECK(r == doctest::Approx(bvn_dcor(0.5)).epsilon(0.08));
}

TEST_CASE("density model: Y = phi(X) pointwise") {
    const auto [x, y] = gen_density_model(500, 31);
    for (long i = 0; i < 500; ++i) {
        CHECK(y.values(i, 0) ==
              doctest::Approx(normal_pdf(x.values(i, 0))).epsilon(1e-14));
        CHECK(y.values(i, 0) > 0.0);
        CHECK(y.values(i, 0) <= 0.3989422804014327 + 1e-15);
    }
}

TEST_CASE("density model: Pearson correlation is near zero by symmetry") {
    const auto [x, y] = gen_density_model(50000, 37);
    CHECK(std::fabs(sample_corr(x, y)) < 0.02);
    // ... while the dependence is total, so dcor is solidly positive
    const auto [xs, ys] = gen_density_model(300, 41);
    CHECK(dcov_of(xs, ys).dcor_sq > 0.1);
}

TEST_CASE("Gumbel conditional CDF is the integral of the density") {
    for (double theta : {0.0, 0.25, 0.5, 1.0}) {
        for (double x : {0.0, 0.3, 1.5, 4.0}) {
            for (double y : {0.1, 0.5, 1.0, 2.5, 6.0}) {
                const double quad = simpson(
                    [&](double t) {
                        return gumbel_conditional_pdf(t, x, theta);
                    },
                    y, 4000);
                CHECK(gumbel_conditional_cdf(y, x, theta) ==
                      doctest::Approx(quad).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("Gumbel conditional CDF endpoints and monotonicity") {
    for (double theta : {0.0, 0.6, 1.0}) {
        for (double x : {0.0, 0.8, 3.0}) {
            CHECK(gumbel_conditional_cdf(0.0, x, theta) == 0.0);
            CHECK(gumbel_conditional_cdf(50.0, x, theta) ==
                  doctest::Approx(1.0).epsilon(1e-12));
            double prev = 0.0;
            for (double y = 0.1; y < 8.0; y += 0.1) {
                const double f = gumbel_conditional_cdf(y, x, theta);
                CHECK(f >= prev);
                prev = f;
            }
        }
    }
}

TEST_CASE("Gumbel generator: theta = 0 gives independent exponentials") {
    const auto [x, y] = gen_gumbel_bve(5000, 0.0, 43);
    CHECK(testutil::ks_statistic(col(x), exp1_cdf) < 1.63 / std::sqrt(5000.0));
    CHECK(testutil::ks_statistic(col(y), exp1_cdf) < 1.63 / std::sqrt(5000.0));
    CHECK(std::fabs(sample_corr(x, y)) < 0.05);
}

TEST_CASE("Gumbel generator: marginals stay standard exponential at theta = 1") {
    const auto [x, y] = gen_gumbel_bve(5000, 1.0, 47);
    CHECK(testutil::ks_statistic(col(x), exp1_cdf) < 1.63 / std::sqrt(5000.0));
    CHECK(testutil::ks_statistic(col(y), exp1_cdf) < 1.63 / std::sqrt(5000.0));
}

TEST_CASE("Gumbel generator: probability integral transform is uniform") {
    const double theta = 0.7;
    const auto [x, y] = gen_gumbel_bve(5000, theta, 53);
    std::vector<double> u(5000);
    for (long i = 0; i < 5000; ++i) {
        u[i] = gumbel_conditional_cdf(y.values(i, 0), x.values(i, 0), theta);
    }
    CHECK(testutil::ks_statistic(
              u, [](double t) { return std::clamp(t, 0.0, 1.0); }) <
          1.63 / std::sqrt(5000.0));
}

TEST_CASE("Gumbel generator: correlation at theta = 1 is about -0.404") {
    const auto [x, y] = gen_gumbel_bve(100000, 1.0, 59);
    CHECK(sample_corr(x, y) == doctest::Approx(-0.40365).epsilon(0.02));
}

TEST_CASE("linear residuals: exact fit leaves zero residuals") {
    std::mt19937 rng(61);
    const Sample x = testutil::random_sample(rng, 50, 2);
    const Eigen::MatrixXd yv = (1.5 + 2.0 * x.values.col(0).array() -
                                0.7 * x.values.col(1).array())
                                   .matrix();
    const Sample resid = linear_residuals(x, Sample(yv));
    CHECK(resid.values.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("linear residuals are uncorrelated with the regressors") {
    std::mt19937 rng(67);
    const Sample x = testutil::random_sample(rng, 200, 3);
    const Sample y = testutil::random_sample(rng, 200, 1);
    const Sample resid = linear_residuals(x, y);
    CHECK(std::fabs(resid.values.col(0).mean()) < 1e-10);
    for (int j = 0; j < 3; ++j) {
        const Sample xj(x.values.col(j).eval());
        CHECK(std::fabs(pearson_correlation(xj, resid)) < 1e-9);
    }
}

TEST_CASE("linear residuals reject rank-deficient regressors") {
    Eigen::MatrixXd xv(6, 2);
    xv.col(0) << 1, 2, 3, 4, 5, 6;
    xv.col(1) = 2.0 * xv.col(0);  // collinear
    std::mt19937 rng(71);
    CHECK_THROWS_AS(
        linear_residuals(Sample(xv), testutil::random_sample(rng, 6, 1)),
        std::runtime_error);
}

TEST_CASE("residualized quadratic dependence: dcov test keeps power") {
    PowerModel model;
    model.kind = SimModel::density;
    model.residualize = true;
    PowerOptions opts;
    opts.runs = 200;
    opts.dcov_replicates = 199;
    opts.seed = 303;
    const PowerCurve curve =
        power_study(model, {60}, {"dcov_perm", "pearson_t"}, opts);
    // the linear fit strips the (null) linear signal; dcov still sees the
    // deterministic dependence while the correlation t-test is blind to it
    CHECK(curve.power[0][0] > 0.95);
    CHECK(curve.power[1][0] < 0.25);
}

TEST_CASE("power study: reproducible and thread-count independent") {
    PowerModel model;
    model.kind = SimModel::bvn;
    model.param = 0.4;
    PowerOptions opts;
    opts.runs = 100;
    opts.dcov_replicates = 99;
    opts.seed = 77;
    opts.threads = 1;
    const PowerCurve a = power_study(model, {20, 40}, {"dcov_perm", "spearman"},
                                     opts);
    opts.threads = 4;
    const PowerCurve b = power_study(model, {20, 40}, {"dcov_perm", "spearman"},
                                     opts);
    CHECK(a.power == b.power);
    CHECK(a.power[0][0] < a.power[0][1]);  // more data, more power
}

TEST_CASE("power study: size respects the nominal level under the null") {
    PowerModel model;
    model.kind = SimModel::bvn;
    model.param = 0.0;
    PowerOptions opts;
    opts.runs = 500;
    opts.dcov_replicates = 199;
    opts.seed = 83;
    const PowerCurve curve = power_study(
        model, {30}, {"dcov_perm", "pearson_t", "spearman", "rank_dcov"}, opts);
    for (std::size_t t = 0; t < curve.tests.size(); ++t) {
        // 0.10 nominal; +-4 binomial sigmas at 500 runs is about 0.054
        CHECK(curve.power[t][0] > 0.04);
        CHECK(curve.power[t][0] < 0.16);
    }
}

TEST_CASE("power curve CSV layout") {
    PowerModel model;
    model.kind = SimModel::gumbel;
    model.param = 0.5;
    PowerOptions opts;
    opts.runs = 100;
    opts.dcov_replicates = 49;
    opts.seed = 89;
    const PowerCurve curve = power_study(model, {10, 20}, {"pearson_t"}, opts);
    const std::string csv = power_curve_csv(curve);
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "model,n,test,power,runs,level,seed");
    long rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.find(model_name(model)) == 0);
        ++rows;
    }
    CHECK(rows == 2);
}
