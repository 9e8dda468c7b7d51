// Acceptance gate: one test case per criterion, each printing a single
// machine-greppable pass/fail line. Tolerances are pinned here.

#include "dcov/inference.hpp"
#include "dcov/jackknife.hpp"
#include "dcov/rng.hpp"
#include "dcov/sample.hpp"
#include "dcov/sims.hpp"
#include "dcov/stats.hpp"
#include "dcov/theory.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dcov;

namespace {

void verdict(int criterion, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s%s%s\n", criterion, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion ", criterion, ": ", detail);
}

void skip_notice(int criterion, const std::string& why) {
    std::printf("criterion %d: SKIP -- %s\n", criterion, why.c_str());
    std::fflush(stdout);
}

}  // namespace

TEST_CASE("criterion_1 statistic equals the raw-distance T-route") {
    std::mt19937 rng(1001);
    std::uniform_int_distribution<int> nd(2, 50), pd(1, 5);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const Sample x = testutil::random_sample(rng, nd(rng), pd(rng));
        const Sample y = testutil::random_sample(rng, x.n(), pd(rng));
        const double direct = dcov_of(x, y).dcov_sq;
        const double via_t =
            dcov_via_T(distance_matrix(x), distance_matrix(y)).dcov_sq;
        worst = std::max(worst, std::fabs(direct - via_t) /
                                    std::max(1.0, std::fabs(direct)));
    }
    std::ostringstream d;
    d << "max relative gap " << worst << " over 500 samples, bound 1e-10";
    verdict(1, worst <= 1e-10, d.str());
}

TEST_CASE("criterion_2 hand-checkable values") {
    const Sample s012 = make_scalar_sample({0, 1, 2});
    const double dvar = dcov_of(s012, s012).dcov_sq;
    const Sample x2 = make_scalar_sample({0, 3});
    const Sample y2 = make_scalar_sample({5, 1});
    const double v2 = dcov_of(x2, y2).dcov_sq;  // a b / 4 with a = 3, b = 4
    const bool ok = std::fabs(dvar - 40.0 / 81.0) <= 1e-14 && v2 == 3.0;
    std::ostringstream d;
    d << "dvar^2(0,1,2) = " << dvar << " (target 40/81), n=2 value = " << v2
      << " (target 3)";
    verdict(2, ok, d.str());
}

TEST_CASE("criterion_3 bivariate normal closed form") {
    const double at0 = bvn_dcor(0.0);
    const double at1 = std::fabs(bvn_dcor(1.0) - 1.0);
    const double ratio = bvn_dcor(1e-6) / 1e-6;
    bool bounded = true;
    const BvnCurve curve = bvn_curve(201);
    for (std::size_t i = 0; i < curve.rho_grid.size(); ++i) {
        bounded &= curve.r_values[i] <= std::fabs(curve.rho_grid[i]) + 1e-12;
    }
    const bool ok =
        at0 == 0.0 && at1 <= 1e-12 && std::fabs(ratio - 0.89066) <= 1e-4 &&
        bounded;
    std::ostringstream d;
    d << "R(0) = " << at0 << ", |R(1)-1| = " << at1 << ", small-rho ratio "
      << ratio << " (target 0.89066 +- 1e-4), R <= |rho| on grid: "
      << (bounded ? "yes" : "no");
    verdict(3, ok, d.str());
}

TEST_CASE("criterion_4 alpha = 2 collapses to product-moment quantities") {
    std::mt19937 rng(1004);
    std::uniform_int_distribution<int> nd(3, 40);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = nd(rng);
        const Sample x = testutil::random_sample(rng, n, 1, 2.0);
        const Sample y = testutil::random_sample(rng, n, 1, 0.5);
        const DCovSummary s = dcov_of(x, y, 2.0);
        const double r = pearson_correlation(x, y);
        const double mx = x.values.mean(), my = y.values.mean();
        const double cov_n =
            ((x.values.array() - mx) * (y.values.array() - my)).mean();
        worst = std::max(worst,
                         std::fabs(std::sqrt(s.dcor_sq) - std::fabs(r)));
        worst = std::max(worst, std::fabs(std::sqrt(s.dcov_sq) -
                                          2.0 * std::fabs(cov_n)));
    }
    std::ostringstream d;
    d << "max |dcor^(2) - |rho|| / |dcov^(2) - 2|cov|| gap " << worst
      << " over 100 samples, bound 1e-10";
    verdict(4, worst <= 1e-10, d.str());
}

TEST_CASE("criterion_5 exact rank-test enumeration reproduces the table") {
    struct Row {
        int n;
        double level, cv, asl;
    };
    const std::vector<Row> rows = {
        {5, 0.10, 3.685, 0.100}, {5, 0.05, 4.211, 0.050},
        {6, 0.10, 3.917, 0.097}, {6, 0.05, 4.699, 0.047},
        {7, 0.10, 4.215, 0.098}, {7, 0.05, 4.858, 0.047},
    };
    bool ok = true;
    std::ostringstream d;
    for (const Row& row : rows) {
        const auto [cv, asl] = exact_rank_critical(row.n, row.level);
        const bool cv_ok = std::fabs(cv - row.cv) <= 5e-4;
        const bool asl_ok = std::fabs(asl - row.asl) <= 5e-4;
        ok &= cv_ok && asl_ok;
        d << "n=" << row.n << "@" << row.level << ": " << cv << "/" << asl
          << (cv_ok && asl_ok ? " " : " MISMATCH ");
    }
    verdict(5, ok, d.str());
}

TEST_CASE("criterion_6 Brownian covariance coincides with the statistic") {
    std::mt19937 rng(1006);
    std::uniform_int_distribution<int> nd(4, 15), pd(1, 3);
    bool ok = true;
    double worst_z = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Sample x = testutil::random_sample(rng, nd(rng), pd(rng));
        const Sample y = testutil::random_sample(rng, x.n(), pd(rng));
        const double exact = dcov_of(x, y).dcov_sq;
        const McResult mc =
            brownian_cov_mc(x, y, 100000, 2000 + trial, 0);
        const double z = std::fabs(mc.estimate - exact) / mc.mc_se;
        worst_z = std::max(worst_z, z);
        ok &= z <= 3.0;
    }
    std::ostringstream d;
    d << "worst |estimate - statistic| / mc_se = " << worst_z
      << " over 10 samples at 1e5 draws, bound 3";
    verdict(6, ok, d.str());
}

TEST_CASE("criterion_7 Gumbel bivariate exponential sampler") {
    const auto [x, y] = gen_gumbel_bve(1000000, 1.0, 1007);
    const double corr = pearson_correlation(x, y);
    double worst = 0.0;
    for (double theta : {0.0, 0.3, 0.7, 1.0}) {
        for (double xc : {0.0, 0.5, 2.0}) {
            for (double yc : {0.2, 1.0, 3.0, 7.0}) {
                // composite Simpson quadrature of the conditional density
                const int m = 4000;
                const double h = yc / (2 * m);
                double s = gumbel_conditional_pdf(0.0, xc, theta) +
                           gumbel_conditional_pdf(yc, xc, theta);
                for (int i = 1; i < 2 * m; ++i) {
                    s += gumbel_conditional_pdf(i * h, xc, theta) *
                         (i % 2 ? 4.0 : 2.0);
                }
                worst = std::max(
                    worst, std::fabs(s * h / 3.0 -
                                     gumbel_conditional_cdf(yc, xc, theta)));
            }
        }
    }
    const bool ok =
        std::fabs(corr - (-0.40365)) <= 0.01 && worst <= 1e-10;
    std::ostringstream d;
    d << "corr at theta=1, n=1e6: " << corr
      << " (target -0.40365 +- 0.01); max CDF-vs-quadrature gap " << worst
      << ", bound 1e-10";
    verdict(7, ok, d.str());
}

TEST_CASE("criterion_8 power orderings at desk scale") {
    PowerOptions opts;
    opts.runs = 2000;
    opts.level = 0.10;
    opts.dcov_replicates = 299;
    opts.seed = 1008;
    opts.threads = 0;

    PowerModel density;
    density.kind = SimModel::density;
    const PowerCurve fig3 =
        power_study(density, {100}, {"dcov_perm", "pearson_t"}, opts);
    const double dcov100 = fig3.power[0][0];
    const double pear100 = fig3.power[1][0];

    PowerModel gumbel;
    gumbel.kind = SimModel::gumbel;
    gumbel.param = 0.5;
    const PowerCurve fig6a =
        power_study(gumbel, {50}, {"dcov_perm", "pearson_t"}, opts);
    const double dcov_g = fig6a.power[0][0];
    const double pear_g = fig6a.power[1][0];

    PowerModel resid = gumbel;
    resid.residualize = true;
    const PowerCurve fig6b =
        power_study(resid, {30, 60, 100}, {"dcov_perm"}, opts);
    const bool trend = fig6b.power[0][0] < fig6b.power[0][1] &&
                       fig6b.power[0][1] < fig6b.power[0][2];

    const bool gap = dcov100 >= 0.9 && pear100 <= 0.2;
    const bool ordering = pear_g > dcov_g;
    std::ostringstream d;
    d << "density n=100: dcov " << dcov100 << " (>= 0.9), pearson " << pear100
      << " (<= 0.2); gumbel(0.5) n=50: pearson " << pear_g << " > dcov "
      << dcov_g << ": " << (ordering ? "yes" : "no")
      << "; residual-dcov trend " << fig6b.power[0][0] << " -> "
      << fig6b.power[0][1] << " -> " << fig6b.power[0][2]
      << " increasing: " << (trend ? "yes" : "no");
    verdict(8, gap && ordering && trend, d.str());
}

TEST_CASE("criterion_9 chi-squared bound size on Bernoulli pairs") {
    const double level = 0.10;
    const long runs = 2000;
    long rejections = 0;
    for (long run = 0; run < runs; ++run) {
        Rng rng(1009, static_cast<std::uint64_t>(run));
        const int n = 50;
        Eigen::MatrixXd xv(n, 1), yv(n, 1);
        for (int i = 0; i < n; ++i) {
            xv(i, 0) = rng.uniform() < 0.5 ? 0.0 : 1.0;
            yv(i, 0) = rng.uniform() < 0.5 ? 0.0 : 1.0;
        }
        const TestReport r = chi2_bound_test(Sample(xv), Sample(yv), level);
        rejections += *r.reject ? 1 : 0;
    }
    const double rate = static_cast<double>(rejections) / runs;
    const double bound =
        level + 3.0 * std::sqrt(level * (1.0 - level) / runs);
    std::ostringstream d;
    d << "empirical size " << rate << " at nominal " << level << ", bound "
      << bound << " over " << runs << " runs";
    verdict(9, rate <= bound, d.str());
}

TEST_CASE("criterion_10 Eckerle4 reference values (dataset-gated)") {
    // Looks for the NIST StRD Eckerle4.dat next to the repository data/
    // directory, or at the path in ECKERLE4_PATH. See README for how to
    // fetch it; it is not bundled.
    std::string path = DCOV_SOURCE_DIR "/data/Eckerle4.dat";
    if (const char* env = std::getenv("ECKERLE4_PATH")) path = env;
    std::ifstream in(path);
    if (!in) {
        skip_notice(10, "dataset not found at " + path +
                            " (set ECKERLE4_PATH or see README)");
        return;
    }
    // NIST .dat layout: free text, then a "Data:  y  x" marker, then 35
    // rows of (transmittance, wavelength).
    std::vector<double> ys, xs;
    std::string line;
    bool in_data = false;
    while (std::getline(in, line)) {
        if (!in_data) {
            std::istringstream ls(line);
            std::string first, second, third;
            ls >> first >> second >> third;
            in_data = first == "Data:" && second == "y" && third == "x";
            continue;
        }
        std::istringstream ls(line);
        double yv, xv;
        if (ls >> yv >> xv) {
            ys.push_back(yv);
            xs.push_back(xv);
        }
    }
    if (ys.size() != 35) {
        verdict(10, false,
                "expected 35 data rows, parsed " + std::to_string(ys.size()));
        return;
    }
    const Sample x = make_scalar_sample(xs), y = make_scalar_sample(ys);
    const DCovSummary s = dcov_of(x, y);
    const double dcor = std::sqrt(s.dcor_sq);
    const double nv2 = 35.0 * s.dcov_sq;

    // residuals of the certified NIST fit y = (b1/b2) exp(-(x-b3)^2/(2 b2^2))
    const double b1 = 1.5543827178, b2 = 4.0888321754, b3 = 451.54121844;
    std::vector<double> res(35);
    for (int i = 0; i < 35; ++i) {
        const double fit =
            b1 / b2 * std::exp(-(xs[i] - b3) * (xs[i] - b3) / (2 * b2 * b2));
        res[i] = ys[i] - fit;
    }
    const double dcor_res =
        std::sqrt(dcov_of(y, make_scalar_sample(res)).dcor_sq);

    const bool ok = std::fabs(dcor - 0.4275431) <= 1e-6 &&
                    std::fabs(nv2 - 8.1337) <= 1e-3 &&
                    std::fabs(dcor_res - 0.4285534) <= 1e-3;
    std::ostringstream d;
    d << "dcor " << dcor << " (target 0.4275431 +- 1e-6), nV^2 " << nv2
      << " (target 8.1337 +- 1e-3), residual-vs-response dcor " << dcor_res
      << " (target 0.4285534 +- 1e-3)";
    verdict(10, ok, d.str());
}

TEST_CASE("criterion_11 jackknife deletion consistency") {
    std::mt19937 rng(1011);
    double worst = 0.0;
    for (int n = 3; n <= 12; ++n) {
        const auto xr = testutil::random_rows(rng, n, 2);
        const auto yr = testutil::random_rows(rng, n, 1);
        const JackknifeReport rep =
            jackknife(distance_matrix(testutil::to_sample(xr)),
                      distance_matrix(testutil::to_sample(yr)));
        for (int i = 0; i < n; ++i) {
            auto xd = xr, yd = yr;
            xd.erase(xd.begin() + i);
            yd.erase(yd.begin() + i);
            const double full =
                dcov_of(testutil::to_sample(xd), testutil::to_sample(yd))
                    .dcov_sq;
            worst = std::max(worst,
                             std::fabs(rep.replicates_dcov_sq[i] - full) /
                                 std::max(1.0, std::fabs(full)));
        }
    }
    std::ostringstream d;
    d << "max relative gap " << worst
      << " over exhaustive deletions, n = 3..12, bound 1e-12";
    verdict(11, worst <= 1e-12, d.str());
}

TEST_CASE("criterion_12 invariance suite") {
    std::mt19937 rng(1012);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> nd(5, 25), pd(1, 4);
    std::uniform_real_distribution<double> bd(0.2, 4.0);
    double worst_scale = 0.0, worst_affine = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = nd(rng), p = pd(rng), q = pd(rng);
        const Sample x = testutil::random_sample(rng, n, p);
        const Sample y = testutil::random_sample(rng, n, q);
        const double base = dcov_of(x, y).dcov_sq;

        // scale/rotation law: a + b C x with C orthonormal multiplies the
        // squared statistic by |b1 b2|
        const auto orthonormal = [&](int d) {
            Eigen::MatrixXd m(d, d);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) m(i, j) = g(rng);
            }
            return Eigen::HouseholderQR<Eigen::MatrixXd>(m)
                .householderQ() *
                Eigen::MatrixXd::Identity(d, d);
        };
        const double b1 = bd(rng), b2 = bd(rng);
        const Eigen::MatrixXd c1 = orthonormal(p), c2 = orthonormal(q);
        const Sample xt(
            ((b1 * x.values * c1.transpose()).rowwise() +
             Eigen::RowVectorXd::Constant(p, 0.7).eval())
                .eval());
        const Sample yt(
            ((b2 * y.values * c2.transpose()).rowwise() +
             Eigen::RowVectorXd::Constant(q, -1.3).eval())
                .eval());
        const double transformed = dcov_of(xt, yt).dcov_sq;
        worst_scale = std::max(
            worst_scale, std::fabs(transformed - b1 * b2 * base) /
                             std::max(1.0, b1 * b2 * base));

        // affine variant: invariant under arbitrary invertible affine maps
        const auto invertible = [&](int d) {
            Eigen::MatrixXd m(d, d);
            do {
                for (int i = 0; i < d; ++i) {
                    for (int j = 0; j < d; ++j) m(i, j) = g(rng);
                }
            } while (std::fabs(m.determinant()) < 0.1);
            return m;
        };
        const double ref =
            dcov_of(affine_rescale(x), affine_rescale(y)).dcor_sq;
        const Sample xa((x.values * invertible(p).transpose()).eval());
        const Sample ya((y.values * invertible(q).transpose()).eval());
        const double mapped =
            dcov_of(affine_rescale(xa), affine_rescale(ya)).dcor_sq;
        worst_affine = std::max(worst_affine, std::fabs(mapped - ref));
    }
    std::ostringstream d;
    d << "max scale/rotation-law gap " << worst_scale
      << ", max affine-invariance gap " << worst_affine
      << " over 100 cases, bounds 1e-9";
    verdict(12, worst_scale <= 1e-9 && worst_affine <= 1e-9, d.str());
}
