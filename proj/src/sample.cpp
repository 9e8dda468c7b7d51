#include "dcov/sample.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dcov {

namespace {

void check_finite(const Eigen::MatrixXd& v) {
    if (!v.allFinite()) {
        throw std::runtime_error("sample contains non-finite values");
    }
}

void check_unique_names(const std::vector<std::string>& names) {
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (!seen.insert(n).second) {
            throw std::runtime_error("duplicate column name: " + n);
        }
    }
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// One CSV record, handling quoted fields and embedded newlines.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            fields.push_back(field);
            return true;
        } else if (c == '\n') {
            fields.push_back(field);
            return true;
        } else {
            field.push_back(static_cast<char>(c));
        }
    }
    if (!any) return false;
    fields.push_back(field);
    return true;
}

bool is_missing(const std::string& cell) {
    const std::string t = trim(cell);
    return t.empty() || t == "NA";
}

double parse_cell(const std::string& cell, long row,
                  const std::string& col) {
    const std::string t = trim(cell);
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != t.size() || t.empty()) {
        throw std::runtime_error("unparseable numeric cell \"" + t +
                                 "\" at data row " + std::to_string(row) +
                                 ", column " + col);
    }
    return v;
}

}  // namespace

Sample::Sample(Eigen::MatrixXd v, std::vector<std::string> names)
    : values(std::move(v)), column_names(std::move(names)) {
    if (static_cast<Eigen::Index>(column_names.size()) != values.cols()) {
        throw std::runtime_error("column name count does not match width");
    }
    check_finite(values);
    check_unique_names(column_names);
}

Sample::Sample(Eigen::MatrixXd v) : values(std::move(v)) {
    column_names.reserve(values.cols());
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        column_names.push_back("c" + std::to_string(j));
    }
    check_finite(values);
}

Sample make_scalar_sample(const std::vector<double>& v,
                          const std::string& name) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        m(static_cast<Eigen::Index>(i), 0) = v[i];
    }
    return Sample(std::move(m), {name});
}

ColumnSelector ColumnSelector::parse(const std::string& text) {
    ColumnSelector sel;
    const std::string t = trim(text);
    if (t.empty()) throw std::runtime_error("empty column selector");

    // Pure index range "lo-hi" or single index "k".
    const auto all_digits_dash = [&] {
        bool digit = false;
        for (char c : t) {
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digit = true;
            } else if (c != '-') {
                return false;
            }
        }
        return digit;
    };
    if (all_digits_dash()) {
        const auto dash = t.find('-');
        if (dash == std::string::npos) {
            sel.lo = sel.hi = std::stol(t);
        } else {
            sel.lo = std::stol(t.substr(0, dash));
            sel.hi = std::stol(t.substr(dash + 1));
        }
        if (sel.lo < 0 || sel.hi < sel.lo) {
            throw std::runtime_error("bad index range selector: " + t);
        }
        return sel;
    }

    std::stringstream ss(t);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) sel.names.push_back(tok);
    }
    if (sel.names.empty()) {
        throw std::runtime_error("empty column selector");
    }
    return sel;
}

std::vector<Eigen::Index> ColumnSelector::resolve(
    const std::vector<std::string>& header) const {
    std::vector<Eigen::Index> idx;
    if (!names.empty()) {
        for (const auto& nm : names) {
            const auto it = std::find(header.begin(), header.end(), nm);
            if (it == header.end()) {
                throw std::runtime_error("column not found: " + nm);
            }
            idx.push_back(it - header.begin());
        }
        return idx;
    }
    if (hi >= static_cast<Eigen::Index>(header.size())) {
        throw std::runtime_error("column index out of range: " +
                                 std::to_string(hi));
    }
    for (Eigen::Index j = lo; j <= hi; ++j) idx.push_back(j);
    return idx;
}

LoadResult load_csv(const std::string& path, const ColumnSelector& x_cols,
                    const ColumnSelector& y_cols, MissingPolicy policy) {
    std::vector<std::string> labels;
    return load_csv_labeled(path, x_cols, y_cols, "", labels, policy);
}

LoadResult load_csv_labeled(const std::string& path,
                            const ColumnSelector& x_cols,
                            const ColumnSelector& y_cols,
                            const std::string& label_col,
                            std::vector<std::string>& labels_out,
                            MissingPolicy policy) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::vector<std::string> header;
    if (!read_record(in, header)) {
        throw std::runtime_error("empty CSV file: " + path);
    }
    for (auto& h : header) h = trim(h);

    const auto xi = x_cols.resolve(header);
    const auto yi = y_cols.resolve(header);
    for (auto i : xi) {
        if (std::find(yi.begin(), yi.end(), i) != yi.end()) {
            throw std::runtime_error("x and y selectors overlap at column " +
                                     header[i]);
        }
    }

    Eigen::Index label_idx = -1;
    if (!label_col.empty()) {
        const auto it = std::find(header.begin(), header.end(), label_col);
        if (it == header.end()) {
            throw std::runtime_error("label column not found: " + label_col);
        }
        label_idx = it - header.begin();
    }

    std::vector<Eigen::Index> wanted = xi;
    wanted.insert(wanted.end(), yi.begin(), yi.end());

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::vector<std::string> fields;
    long dropped = 0;
    long row_no = 0;
    while (read_record(in, fields)) {
        ++row_no;
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        if (fields.size() < header.size()) {
            throw std::runtime_error("short record at data row " +
                                     std::to_string(row_no));
        }
        bool missing = false;
        std::string missing_col;
        for (auto j : wanted) {
            if (is_missing(fields[j])) {
                missing = true;
                missing_col = header[j];
                break;
            }
        }
        if (missing) {
            if (policy == MissingPolicy::error) {
                throw std::runtime_error("missing value at row " +
                                         std::to_string(row_no) +
                                         ", column " + missing_col);
            }
            ++dropped;
            continue;
        }
        std::vector<double> vals;
        vals.reserve(wanted.size());
        for (auto j : wanted) {
            vals.push_back(parse_cell(fields[j], row_no, header[j]));
        }
        rows.push_back(std::move(vals));
        if (label_idx >= 0) labels.push_back(trim(fields[label_idx]));
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n < 2) {
        throw std::runtime_error("fewer than 2 usable rows in " + path);
    }

    const auto px = static_cast<Eigen::Index>(xi.size());
    const auto py = static_cast<Eigen::Index>(yi.size());
    Eigen::MatrixXd mx(n, px), my(n, py);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index j = 0; j < px; ++j) mx(r, j) = rows[r][j];
        for (Eigen::Index j = 0; j < py; ++j) my(r, j) = rows[r][px + j];
    }
    std::vector<std::string> xn, yn;
    for (auto j : xi) xn.push_back(header[j]);
    for (auto j : yi) yn.push_back(header[j]);

    labels_out = std::move(labels);
    return {Sample(std::move(mx), std::move(xn)),
            Sample(std::move(my), std::move(yn)), dropped};
}

DistanceMatrix distance_matrix(const Sample& s, double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        throw std::invalid_argument("alpha must be in (0, 2]");
    }
    const Eigen::Index n = s.n();
    if (n < 2) throw std::invalid_argument("need n >= 2");

    DistanceMatrix dm;
    dm.exponent = alpha;
    dm.entries = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = k + 1; l < n; ++l) {
            const double sq = (s.values.row(k) - s.values.row(l)).squaredNorm();
            double v;
            if (alpha == 1.0) {
                v = std::sqrt(sq);
            } else if (alpha == 2.0) {
                v = sq;
            } else {
                v = std::pow(sq, alpha / 2.0);
            }
            dm.entries(k, l) = v;
            dm.entries(l, k) = v;
        }
    }
    return dm;
}

}  // namespace dcov
