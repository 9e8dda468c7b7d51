#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace dcov {

// n x d block of finite reals, rows are observations.
struct Sample {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;

    Sample() = default;
    Sample(Eigen::MatrixXd v, std::vector<std::string> names);
    explicit Sample(Eigen::MatrixXd v);

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index dim() const { return values.cols(); }
};

// Makes a d=1 Sample from a flat vector.
Sample make_scalar_sample(const std::vector<double>& v,
                          const std::string& name = "x");

// Column selection by explicit names or by an inclusive 0-based index
// range. Parsed from strings like "a,b,c" or "0-2" or "3"; names win when
// a token matches a header name.
struct ColumnSelector {
    std::vector<std::string> names;  // empty when range-based
    Eigen::Index lo = -1, hi = -1;   // inclusive, used when names empty

    static ColumnSelector parse(const std::string& text);
    std::vector<Eigen::Index> resolve(
        const std::vector<std::string>& header) const;
};

enum class MissingPolicy { error, drop_rows };

struct LoadResult {
    Sample x;
    Sample y;
    long dropped = 0;
};

// Reads an RFC-4180-style CSV with a header row; empty cells and "NA" are
// missing. Throws std::runtime_error on parse/selector problems.
LoadResult load_csv(const std::string& path, const ColumnSelector& x_cols,
                    const ColumnSelector& y_cols,
                    MissingPolicy policy = MissingPolicy::drop_rows);

// Same, but also extracts a non-numeric label column (may be empty name ->
// labels left empty).
LoadResult load_csv_labeled(const std::string& path,
                            const ColumnSelector& x_cols,
                            const ColumnSelector& y_cols,
                            const std::string& label_col,
                            std::vector<std::string>& labels_out,
                            MissingPolicy policy = MissingPolicy::drop_rows);

// Symmetric n x n matrix of |row_k - row_l|^alpha, Euclidean norm.
struct DistanceMatrix {
    Eigen::MatrixXd entries;
    double exponent = 1.0;

    Eigen::Index n() const { return entries.rows(); }
};

// alpha must lie in (0, 2].
DistanceMatrix distance_matrix(const Sample& s, double alpha = 1.0);

}  // namespace dcov
