#include "dcov/inference.hpp"
#include "dcov/jackknife.hpp"
#include "dcov/sample.hpp"
#include "dcov/sims.hpp"
#include "dcov/stats.hpp"
#include "dcov/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct CliConfig {
    std::string input;
    std::string x_sel = "0";
    std::string y_sel = "1";
    double alpha = 1.0;
    bool affine = false;
    std::string method = "permutation";
    long replicates = 999;
    double level = 0.10;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    std::string format = "json";
    std::string labels;
    std::string missing = "drop";
};

std::uint64_t effective_seed(const CliConfig& cfg) {
    if (cfg.seed_given) return cfg.seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

dcov::MissingPolicy missing_policy(const CliConfig& cfg) {
    if (cfg.missing == "drop") return dcov::MissingPolicy::drop_rows;
    if (cfg.missing == "error") return dcov::MissingPolicy::error;
    throw CLI::ValidationError("--missing must be drop or error");
}

struct LoadedData {
    dcov::Sample x;
    dcov::Sample y;
    long dropped = 0;
    std::vector<std::string> labels;
};

LoadedData load(const CliConfig& cfg) {
    if (cfg.input.empty()) {
        throw CLI::ValidationError("--input is required");
    }
    LoadedData d;
    auto xsel = dcov::ColumnSelector::parse(cfg.x_sel);
    auto ysel = dcov::ColumnSelector::parse(cfg.y_sel);
    auto res = dcov::load_csv_labeled(cfg.input, xsel, ysel, cfg.labels,
                                      d.labels, missing_policy(cfg));
    d.x = std::move(res.x);
    d.y = std::move(res.y);
    d.dropped = res.dropped;
    if (cfg.affine) {
        d.x = dcov::affine_rescale(d.x);
        d.y = dcov::affine_rescale(d.y);
    }
    return d;
}

void emit(const json& j, const CliConfig& cfg) {
    if (cfg.format == "text") {
        for (auto it = j.begin(); it != j.end(); ++it) {
            std::cout << it.key() << " = " << it.value().dump() << "\n";
        }
    } else {
        std::cout << j.dump(2) << "\n";
    }
}

json base_report(const CliConfig& cfg, std::uint64_t seed) {
    json j;
    j["schema"] = "dcov/1";
    j["seed"] = seed;
    j["alpha"] = cfg.alpha;
    return j;
}

json test_report_json(const dcov::TestReport& r) {
    json j;
    j["statistic_name"] = r.statistic_name;
    j["statistic"] = r.statistic_value;
    if (r.p_value) j["p_value"] = *r.p_value;
    j["method"] = r.method;
    if (r.replicates > 0) j["replicates"] = r.replicates;
    j["dcor"] = r.dcor;
    if (r.reject) j["reject"] = *r.reject;
    if (r.threshold) j["threshold"] = *r.threshold;
    if (r.level > 0) j["level"] = r.level;
    j["n"] = static_cast<long>(r.n);
    return j;
}

int run_stats(const CliConfig& cfg) {
    const LoadedData d = load(cfg);
    const auto variant =
        cfg.affine ? dcov::Variant::affine : dcov::Variant::plain;
    const dcov::DCovSummary s = dcov::dcov_of(d.x, d.y, cfg.alpha, variant);

    json j = base_report(cfg, effective_seed(cfg));
    j["n"] = static_cast<long>(s.n);
    j["variant"] = dcov::variant_name(s.variant);
    j["dcov"] = std::sqrt(s.dcov_sq);
    j["dcor"] = std::sqrt(s.dcor_sq);
    j["dvar_x"] = std::sqrt(s.dvar_x_sq);
    j["dvar_y"] = std::sqrt(s.dvar_y_sq);
    j["n_dcov_sq"] = static_cast<double>(s.n) * s.dcov_sq;
    j["dropped_rows"] = d.dropped;
    if (s.dvar_x_sq == 0.0 || s.dvar_y_sq == 0.0) {
        j["note"] = "degenerate: a sample has zero distance variance";
    }
    if (cfg.alpha == 2.0) {
        j["note_alpha"] = "alpha = 2 does not characterize independence";
    }
    emit(j, cfg);
    return 0;
}

int run_test(const CliConfig& cfg) {
    const LoadedData d = load(cfg);
    const std::uint64_t seed = effective_seed(cfg);

    dcov::TestReport r;
    if (cfg.method == "permutation" || cfg.method == "permutation-normalized") {
        r = dcov::permutation_test(d.x, d.y, cfg.replicates, seed,
                                   cfg.method == "permutation-normalized",
                                   cfg.alpha, cfg.threads);
    } else if (cfg.method == "chi2") {
        r = dcov::chi2_bound_test(d.x, d.y, cfg.level, cfg.alpha);
    } else if (cfg.method == "rank") {
        r = dcov::rank_test(d.x, d.y, cfg.level, seed);
    } else {
        throw CLI::ValidationError(
            "--method must be permutation, permutation-normalized, chi2 or "
            "rank");
    }
    json j = base_report(cfg, seed);
    j.update(test_report_json(r));
    j["dropped_rows"] = d.dropped;
    emit(j, cfg);
    return 0;
}

int run_rank_test(const CliConfig& cfg, bool exact) {
    const LoadedData d = load(cfg);
    const std::uint64_t seed = effective_seed(cfg);
    const dcov::TestReport r =
        dcov::rank_test(d.x, d.y, cfg.level, seed,
                        exact ? dcov::RankTestMode::exact
                              : dcov::RankTestMode::table);
    json j = base_report(cfg, seed);
    j.update(test_report_json(r));
    emit(j, cfg);
    return 0;
}

int run_jackknife(const CliConfig& cfg) {
    const LoadedData d = load(cfg);
    const auto dmx = dcov::distance_matrix(d.x, cfg.alpha);
    const auto dmy = dcov::distance_matrix(d.y, cfg.alpha);
    const dcov::JackknifeReport rep =
        dcov::jackknife(dmx, dmy, cfg.threads);
    const std::vector<double> stud = dcov::studentize(rep);

    json j = base_report(cfg, effective_seed(cfg));
    j["n"] = rep.n;
    j["se_dcor"] = rep.se_dcor;
    json rows = json::array();
    for (std::size_t i = 0; i < stud.size(); ++i) {
        json row;
        row["index"] = i;
        if (i < d.labels.size()) row["label"] = d.labels[i];
        row["dcov_sq"] = rep.replicates_dcov_sq[i];
        row["dcor"] = std::sqrt(rep.replicates_dcor_sq[i]);
        row["studentized"] = stud[i];
        rows.push_back(row);
    }
    j["replicates"] = rows;
    emit(j, cfg);
    return 0;
}

int run_theory_bvn(const CliConfig& cfg, int grid_points) {
    const dcov::BvnCurve curve = dcov::bvn_curve(grid_points);
    if (cfg.format == "csv") {
        std::cout << dcov::bvn_curve_csv(curve);
        return 0;
    }
    json j = base_report(cfg, effective_seed(cfg));
    j["rho"] = curve.rho_grid;
    j["dcor"] = curve.r_values;
    emit(j, cfg);
    return 0;
}

int run_theory_constants(const CliConfig& cfg, int d) {
    json j = base_report(cfg, effective_seed(cfg));
    j["d"] = d;
    j["C"] = dcov::constant_C(d, cfg.alpha);
    emit(j, cfg);
    return 0;
}

int run_theory_brownian(const CliConfig& cfg, long draws) {
    const LoadedData d = load(cfg);
    const std::uint64_t seed = effective_seed(cfg);
    const dcov::McResult mc =
        dcov::brownian_cov_mc(d.x, d.y, draws, seed, cfg.threads);
    const dcov::DCovSummary s = dcov::dcov_of(d.x, d.y);

    json j = base_report(cfg, seed);
    j["draws"] = mc.draws;
    j["estimate"] = mc.estimate;
    j["mc_se"] = mc.mc_se;
    j["dcov_sq_reference"] = s.dcov_sq;
    j["pass"] = std::fabs(mc.estimate - s.dcov_sq) <= 3.0 * mc.mc_se;
    emit(j, cfg);
    return 0;
}

int run_power(const CliConfig& cfg, const std::string& model_name,
              double param, bool residualize, std::vector<long> sizes,
              std::vector<std::string> tests, long runs) {
    dcov::PowerModel model;
    if (model_name == "bvn") {
        model.kind = dcov::SimModel::bvn;
    } else if (model_name == "density") {
        model.kind = dcov::SimModel::density;
    } else if (model_name == "gumbel") {
        model.kind = dcov::SimModel::gumbel;
    } else {
        throw CLI::ValidationError("--model must be bvn, density or gumbel");
    }
    model.param = param;
    model.residualize = residualize;

    dcov::PowerOptions opts;
    opts.runs = runs;
    opts.level = cfg.level;
    opts.dcov_replicates = cfg.replicates;
    opts.seed = effective_seed(cfg);
    opts.threads = cfg.threads;

    const dcov::PowerCurve curve =
        dcov::power_study(model, sizes, tests, opts);
    if (cfg.format == "csv") {
        std::cout << dcov::power_curve_csv(curve);
        return 0;
    }
    json j = base_report(cfg, opts.seed);
    j["model"] = dcov::model_name(model);
    j["sample_sizes"] = curve.sample_sizes;
    j["tests"] = curve.tests;
    j["power"] = curve.power;
    j["runs_per_cell"] = curve.runs_per_cell;
    j["level"] = curve.level;
    emit(j, cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distance covariance statistics and independence tests"};
    app.require_subcommand(1);

    CliConfig cfg;
    const auto add_common = [&cfg](CLI::App* cmd, bool with_input) {
        if (with_input) {
            cmd->add_option("--input", cfg.input, "CSV input path");
            cmd->add_option("--x", cfg.x_sel,
                            "X columns (names or index range)");
            cmd->add_option("--y", cfg.y_sel,
                            "Y columns (names or index range)");
            cmd->add_option("--missing", cfg.missing,
                            "missing-value policy: drop or error");
            cmd->add_option("--labels", cfg.labels, "label column name");
        }
        cmd->add_option("--alpha", cfg.alpha, "distance exponent in (0,2]");
        cmd->add_flag("--affine", cfg.affine, "affine-invariant variant");
        cmd->add_option("--replicates", cfg.replicates,
                        "permutation replicates");
        cmd->add_option("--level", cfg.level, "significance level");
        cmd->add_option("--seed", cfg.seed, "RNG seed (echoed in output)")
            ->each([&cfg](const std::string&) { cfg.seed_given = true; });
        cmd->add_option("--threads", cfg.threads,
                        "max worker threads (0 = auto, 1 = reproducible)");
        cmd->add_option("--format", cfg.format, "json, text or csv");
    };

    auto* stats = app.add_subcommand("stats", "distance covariance summary");
    add_common(stats, true);

    auto* test = app.add_subcommand("test", "independence test");
    add_common(test, true);
    test->add_option("--method", cfg.method,
                     "permutation, permutation-normalized, chi2 or rank");

    auto* rank = app.add_subcommand("rank-test",
                                    "distribution-free rank dCov test");
    add_common(rank, true);
    bool rank_exact = false;
    rank->add_flag("--exact", rank_exact,
                   "exact permutation enumeration (n <= 10)");

    auto* jack = app.add_subcommand("jackknife",
                                    "leave-one-out influence analysis");
    add_common(jack, true);

    auto* theory = app.add_subcommand("theory", "closed-form references");
    theory->require_subcommand(1);
    auto* bvn = theory->add_subcommand("bvn-curve",
                                       "dCor of the bivariate normal");
    add_common(bvn, false);
    int grid_points = 201;
    bvn->add_option("--points", grid_points, "grid size");
    auto* consts = theory->add_subcommand("constants",
                                          "weight constant C(d, alpha)");
    add_common(consts, false);
    int const_dim = 1;
    consts->add_option("--d", const_dim, "dimension");
    auto* brown = theory->add_subcommand(
        "brownian-check", "Monte Carlo check of the Brownian identity");
    add_common(brown, true);
    long draws = 100000;
    brown->add_option("--draws", draws, "Monte Carlo draws");

    auto* power = app.add_subcommand("power", "Monte Carlo power study");
    add_common(power, false);
    std::string model_name = "bvn";
    double param = 0.0;
    bool residualize = false;
    std::vector<long> sizes{25, 50, 100};
    std::vector<std::string> tests{"dcov_perm", "pearson_t"};
    long runs = 2000;
    power->add_option("--model", model_name, "bvn, density or gumbel");
    power->add_option("--param", param, "rho (bvn) or theta (gumbel)");
    power->add_flag("--residualize", residualize,
                    "test OLS residuals against X");
    power->add_option("--sizes", sizes, "sample sizes");
    power->add_option("--tests", tests,
                      "dcov_perm pearson_t spearman rank_dcov");
    power->add_option("--runs", runs, "runs per cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*stats) return run_stats(cfg);
        if (*test) return run_test(cfg);
        if (*rank) return run_rank_test(cfg, rank_exact);
        if (*jack) return run_jackknife(cfg);
        if (*bvn) return run_theory_bvn(cfg, grid_points);
        if (*consts) return run_theory_constants(cfg, const_dim);
        if (*brown) return run_theory_brownian(cfg, draws);
        if (*power) {
            return run_power(cfg, model_name, param, residualize, sizes,
                             tests, runs);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
