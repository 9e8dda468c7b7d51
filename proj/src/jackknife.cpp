#include "dcov/jackknife.hpp"

#include "dcov/parallel.hpp"
#include "dcov/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace dcov {

namespace {

Eigen::MatrixXd drop_row_col(const Eigen::MatrixXd& m, Eigen::Index i) {
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd out(n - 1, n - 1);
    for (Eigen::Index k = 0, ko = 0; k < n; ++k) {
        if (k == i) continue;
        for (Eigen::Index l = 0, lo = 0; l < n; ++l) {
            if (l == i) continue;
            out(ko, lo) = m(k, l);
            ++lo;
        }
        ++ko;
    }
    return out;
}

}  // namespace

JackknifeReport jackknife(const DistanceMatrix& dmx,
                          const DistanceMatrix& dmy, int threads) {
    const Eigen::Index n = dmx.n();
    if (n != dmy.n()) throw std::invalid_argument("sample size mismatch");
    if (n < 3) {
        throw std::invalid_argument("jackknife needs n >= 3");
    }

    JackknifeReport rep;
    rep.n = n;
    rep.replicates_dcov_sq.resize(n);
    rep.replicates_dcor_sq.resize(n);

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        DistanceMatrix sub_x{drop_row_col(dmx.entries,
                                          static_cast<Eigen::Index>(i)),
                             dmx.exponent};
        DistanceMatrix sub_y{drop_row_col(dmy.entries,
                                          static_cast<Eigen::Index>(i)),
                             dmy.exponent};
        const DCovSummary s =
            dcov_stats(double_center(sub_x), double_center(sub_y));
        rep.replicates_dcov_sq[i] = s.dcov_sq;
        rep.replicates_dcor_sq[i] = s.dcor_sq;
    });

    // Delete-one jackknife variance of R: se^2 = ((n-1)/n) sum (R_i - Rbar)^2.
    double mean = 0.0;
    for (double r2 : rep.replicates_dcor_sq) mean += std::sqrt(r2);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double r2 : rep.replicates_dcor_sq) {
        const double d = std::sqrt(r2) - mean;
        ss += d * d;
    }
    rep.se_dcor =
        std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    return rep;
}

std::vector<double> studentize(const JackknifeReport& report) {
    if (report.se_dcor <= 0.0) {
        throw std::runtime_error("no variation among jackknife replicates");
    }
    std::vector<double> out;
    out.reserve(report.replicates_dcor_sq.size());
    for (double r2 : report.replicates_dcor_sq) {
        out.push_back(std::sqrt(r2) / report.se_dcor);
    }
    return out;
}

}  // namespace dcov
