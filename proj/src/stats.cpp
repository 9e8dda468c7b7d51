#include "dcov/stats.hpp"

#include "dcov/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dcov {

CenteredMatrix double_center(const DistanceMatrix& dm) {
    CenteredMatrix cm;
    cm.row_means = dm.entries.rowwise().mean();
    cm.col_means = dm.entries.colwise().mean();
    cm.grand_mean = dm.entries.mean();
    cm.entries = dm.entries;
    cm.entries.colwise() -= cm.row_means;
    cm.entries.rowwise() -= cm.col_means.transpose();
    cm.entries.array() += cm.grand_mean;
    return cm;
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::plain: return "plain";
        case Variant::affine: return "affine";
        case Variant::rank: return "rank";
    }
    return "plain";
}

namespace {

double clamp_nonnegative(double v, double scale, const char* what) {
    if (v >= 0.0) return v;
    const double tol = 1e-12 * std::max(scale, 1.0);
    if (v >= -tol) return 0.0;
    throw std::runtime_error(std::string("internal consistency: ") + what +
                             " = " + std::to_string(v) + " is negative");
}

}  // namespace

DCovSummary dcov_stats(const CenteredMatrix& cx, const CenteredMatrix& cy,
                       double alpha, Variant variant) {
    const Eigen::Index n = cx.n();
    if (n != cy.n()) {
        throw std::invalid_argument("sample size mismatch: " +
                                    std::to_string(n) + " vs " +
                                    std::to_string(cy.n()));
    }
    const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
    const double t2 = cx.grand_mean * cy.grand_mean;

    DCovSummary s;
    s.n = n;
    s.alpha = alpha;
    s.variant = variant;
    s.dcov_sq = clamp_nonnegative(
        inv_n2 * cx.entries.cwiseProduct(cy.entries).sum(), t2, "dcov_sq");
    s.dvar_x_sq = clamp_nonnegative(
        inv_n2 * cx.entries.array().square().sum(),
        cx.grand_mean * cx.grand_mean, "dvar_x_sq");
    s.dvar_y_sq = clamp_nonnegative(
        inv_n2 * cy.entries.array().square().sum(),
        cy.grand_mean * cy.grand_mean, "dvar_y_sq");

    const double denom = std::sqrt(s.dvar_x_sq * s.dvar_y_sq);
    s.dcor_sq = denom > 0.0 ? std::min(1.0, s.dcov_sq / denom) : 0.0;
    return s;
}

DCovSummary dcov_of(const Sample& x, const Sample& y, double alpha,
                    Variant variant) {
    return dcov_stats(double_center(distance_matrix(x, alpha)),
                      double_center(distance_matrix(y, alpha)), alpha,
                      variant);
}

TParts dcov_via_T(const DistanceMatrix& dmx, const DistanceMatrix& dmy) {
    const Eigen::Index n = dmx.n();
    if (n != dmy.n()) {
        throw std::invalid_argument("sample size mismatch");
    }
    const double nn = static_cast<double>(n);
    TParts t;
    t.t1 = dmx.entries.cwiseProduct(dmy.entries).sum() / (nn * nn);
    const Eigen::VectorXd rx = dmx.entries.rowwise().sum();
    const Eigen::VectorXd ry = dmy.entries.rowwise().sum();
    t.t2 = (rx.sum() / (nn * nn)) * (ry.sum() / (nn * nn));
    t.t3 = rx.dot(ry) / (nn * nn * nn);
    t.dcov_sq = t.t1 + t.t2 - 2.0 * t.t3;
    return t;
}

double normalized_statistic(const CenteredMatrix& cx,
                            const CenteredMatrix& cy) {
    const double t2 = cx.grand_mean * cy.grand_mean;
    if (t2 <= 0.0) {
        throw std::runtime_error(
            "normalized statistic undefined: T2 = 0 (constant sample)");
    }
    const DCovSummary s = dcov_stats(cx, cy);
    return static_cast<double>(s.n) * s.dcov_sq / t2;
}

Sample affine_rescale(const Sample& s) {
    const Eigen::Index n = s.n();
    const Eigen::Index d = s.dim();
    if (n <= d) {
        throw std::invalid_argument("affine rescale needs n > d");
    }
    const Eigen::RowVectorXd mean = s.values.colwise().mean();
    const Eigen::MatrixXd centered = s.values.rowwise() - mean;
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition failed");
    }
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double ev_max = ev.maxCoeff();
    if (ev.minCoeff() < 1e-12 * ev_max || ev_max <= 0.0) {
        std::string cols;
        for (const auto& nm : s.column_names) {
            cols += cols.empty() ? nm : ("," + nm);
        }
        throw std::runtime_error(
            "sample covariance singular or near-singular for block [" + cols +
            "]");
    }
    const Eigen::MatrixXd inv_root =
        eig.eigenvectors() * ev.array().rsqrt().matrix().asDiagonal() *
        eig.eigenvectors().transpose();
    return Sample(s.values * inv_root, s.column_names);
}

Sample rank_transform(const Sample& s, std::uint64_t seed) {
    if (s.dim() != 1) {
        throw std::invalid_argument("rank transform requires a 1-D sample");
    }
    const Eigen::Index n = s.n();
    if (n < 2) throw std::invalid_argument("need n >= 2");

    Rng rng(seed);
    std::vector<double> tiebreak(n);
    for (auto& t : tiebreak) t = rng.uniform();

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) {
                  const double va = s.values(a, 0), vb = s.values(b, 0);
                  if (va != vb) return va < vb;
                  return tiebreak[a] < tiebreak[b];
              });

    Eigen::MatrixXd ranks(n, 1);
    for (Eigen::Index r = 0; r < n; ++r) {
        ranks(order[r], 0) = static_cast<double>(r + 1);
    }
    return Sample(std::move(ranks), {s.column_names[0] + "_rank"});
}

double pearson_correlation(const Sample& x, const Sample& y) {
    if (x.dim() != 1 || y.dim() != 1) {
        throw std::invalid_argument("pearson correlation is bivariate");
    }
    const Eigen::Index n = x.n();
    if (n != y.n() || n < 2) {
        throw std::invalid_argument("need matched samples with n >= 2");
    }
    const Eigen::VectorXd xc = x.values.col(0).array() - x.values.col(0).mean();
    const Eigen::VectorXd yc = y.values.col(0).array() - y.values.col(0).mean();
    const double denom = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
    return denom > 0.0 ? xc.dot(yc) / denom : 0.0;
}

}  // namespace dcov
