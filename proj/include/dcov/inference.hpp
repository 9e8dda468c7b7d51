#pragma once

#include "dcov/sample.hpp"
#include "dcov/stats.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dcov {

struct TestReport {
    std::string statistic_name;   // nV2, nV2_over_T2, nR2_rank
    double statistic_value = 0.0;
    std::optional<double> p_value;  // absent for the chi2 bound mode
    std::string method;           // permutation, chi2_bound, rank_table,
                                  // rank_exact
    long replicates = 0;
    std::uint64_t seed = 0;
    double dcor = 0.0;
    std::optional<bool> reject;
    std::optional<double> threshold;
    double level = 0.0;
    Eigen::Index n = 0;
};

// Critical values of n R_n^2(rank, rank); exact ASL recorded for n <= 10.
struct CriticalTable {
    struct Row {
        int n;
        double cv10;
        double cv5;
        double asl10;  // NaN for Monte Carlo rows
        double asl5;
    };
    std::vector<Row> rows;

    // Step rule: the largest tabled n <= sample n.
    const Row& lookup(Eigen::Index n) const;
};

const CriticalTable& critical_table();

// Serialized form of the embedded table (columns n,cv10,cv5,asl10,asl5).
std::string critical_table_csv();

// Permutation test of independence on the statistic n V_n^2 (or
// n V_n^2 / T2 when normalized). Y's distance matrix is permuted by index;
// distances are computed once. Replicate r draws from RNG stream (seed, r),
// so the p-value does not depend on the thread count.
TestReport permutation_test(const Sample& x, const Sample& y,
                            long replicates, std::uint64_t seed,
                            bool normalized = false, double alpha = 1.0,
                            int threads = 1);

// Same test starting from prebuilt distance matrices.
TestReport permutation_test_dm(const DistanceMatrix& dmx,
                               const DistanceMatrix& dmy, long replicates,
                               std::uint64_t seed, bool normalized = false,
                               int threads = 1);

// Conservative asymptotic test: reject when n V_n^2 / T2 >= chi2_{1-level}(1).
// Valid for level in (0, 0.215].
TestReport chi2_bound_test(const Sample& x, const Sample& y, double level,
                           double alpha = 1.0);

enum class RankTestMode { table, exact };

// Distribution-free test on n R_n^2(rank x, rank y); both samples must be
// 1-D. Table mode uses the embedded critical values; exact mode (n <= 10)
// enumerates all n! rank permutations.
TestReport rank_test(const Sample& x, const Sample& y, double level,
                     std::uint64_t seed,
                     RankTestMode mode = RankTestMode::table);

// All n! values of n R_n^2 over permutations of y-ranks against fixed
// x-ranks 1..n. Requires n <= 10.
std::vector<double> exact_rank_statistics(int n);

// Critical value and achieved significance level of the upper-tail
// rejection region of size at most `level` over the exact distribution.
struct ExactCritical {
    double critical_value;
    double asl;
};
ExactCritical exact_rank_critical(int n, double level);

}  // namespace dcov
