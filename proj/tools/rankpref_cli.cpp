// rankpref: dataset statistics, model fitting, prediction, pair-withholding
// experiments and consensus-order audits from the command line.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rankpref/audit.hpp"
#include "rankpref/components.hpp"
#include "rankpref/config.hpp"
#include "rankpref/consistency.hpp"
#include "rankpref/harness.hpp"
#include "rankpref/report.hpp"
#include "rankpref/svd.hpp"

namespace rp = rankpref;

namespace {

enum Exit : int { ok = 0, usage = 1, data = 2, nonconvergence = 3 };

struct DatasetFlags {
    std::string path;
    std::string format = "movielens";
    bool csv_header = true;
    std::optional<std::size_t> max_users, max_items;

    void attach(CLI::App* cmd, bool required) {
        auto* d = cmd->add_option("--dataset", path, "Ratings file");
        if (required) d->required();
        cmd->add_option("--format", format, "movielens | csv")
            ->check(CLI::IsMember({"movielens", "csv"}));
        cmd->add_flag("!--no-header", csv_header, "CSV file has no header row");
        cmd->add_option("--max-users", max_users, "Keep only the first N users");
        cmd->add_option("--max-items", max_items, "Keep only the first N items");
    }

    rp::SparseRatingMatrix load() const {
        rp::ExperimentConfig c;
        c.dataset = path;
        c.format = format == "csv" ? rp::DataFormat::csv : rp::DataFormat::movielens;
        c.csv_header = csv_header;
        c.max_users = max_users;
        c.max_items = max_items;
        return rp::load_dataset(c);
    }
};

std::string fmt(const char* pattern, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

std::string with_commas(std::size_t n) {
    auto s = std::to_string(n);
    for (int pos = static_cast<int>(s.size()) - 3; pos > 0; pos -= 3) s.insert(static_cast<std::size_t>(pos), ",");
    return s;
}

int cmd_stats(const DatasetFlags& ds) {
    const auto m = ds.load();
    const auto st = m.stats();
    std::map<double, std::size_t> histogram;
    for (const auto& e : m.entries()) ++histogram[e.value];
    const auto comps = rp::connected_components(m);
    std::size_t nonempty = 0;
    {
        std::vector<char> seen(comps.n_components, 0);
        for (const auto& e : m.entries()) {
            auto c = comps.component_of_user[e.user];
            if (!seen[c]) {
                seen[c] = 1;
                ++nonempty;
            }
        }
    }
    std::cout << "users       " << with_commas(st.n_users) << '\n'
              << "items       " << with_commas(st.n_items) << '\n'
              << "entries     " << with_commas(st.nnz) << '\n'
              << "sparsity    " << fmt("%.2f%%", 100.0 * st.sparsity) << '\n'
              << "components  " << nonempty << '\n'
              << "ratings\n";
    for (auto [value, count] : histogram)
        std::cout << "  " << fmt("%g", value) << "  " << count << '\n';
    return ok;
}

struct FitFlags {
    std::string method = "sc";
    double fraction = 0.3;
    double tol = 1e-10;
    std::size_t max_iter = 5000;
    std::string out_model;
};

int cmd_fit(const DatasetFlags& ds, const FitFlags& f) {
    const auto m = ds.load();
    rp::BalanceOptions bo{f.tol, f.max_iter};
    std::ofstream out;
    if (!f.out_model.empty()) {
        out.open(f.out_model, std::ios::binary);
        if (!out) throw rp::DataError("cannot write " + f.out_model);
    }
    if (f.method == "svd") {
        auto model = rp::fit_svd(m, f.fraction);
        std::cout << "method SVD(" << fmt("%g", f.fraction) << ")\nrank " << model.rank()
                  << "\nleading_singular_value " << fmt("%.6g", model.singular_values()[0]) << '\n';
        if (out) model.save(out);
        return ok;
    }
    auto model = f.method == "uc" ? rp::fit_uc(m, bo) : rp::fit_sc(m, bo);
    const auto& st = model.fit_stats();
    std::cout << "method " << (f.method == "uc" ? "UC" : "SC") << "\niterations " << st.iterations
              << "\nfinal_residual " << fmt("%.3e", st.final_residual) << "\nconverged "
              << (st.converged ? "yes" : "no") << '\n';
    if (out) model.save(out);
    if (!st.converged) {
        std::cerr << "error: balancing did not reach tolerance within " << f.max_iter << " sweeps\n";
        return nonconvergence;
    }
    return ok;
}

struct PredictFlags {
    std::string model_path;
    std::string user, item;
    bool clamp = false;
};

int cmd_predict(const DatasetFlags& ds, const PredictFlags& f) {
    std::ifstream in(f.model_path);
    if (!in) throw rp::DataError("cannot open model " + f.model_path);
    std::string magic;
    in >> magic;
    in.seekg(0);
    std::unique_ptr<rp::Predictor> model;
    if (magic == "rankpref-consistency")
        model = std::make_unique<rp::ConsistencyModel>(rp::ConsistencyModel::load(in));
    else if (magic == "rankpref-svd")
        model = std::make_unique<rp::SvdModel>(rp::SvdModel::load(in));
    else
        throw rp::DataError("unrecognised model file " + f.model_path);

    // With a dataset, ids are external; otherwise dense indices.
    rp::Index u, i;
    if (!ds.path.empty()) {
        const auto m = ds.load();
        u = m.user_ids().at(f.user);
        i = m.item_ids().at(f.item);
    } else {
        try {
            u = static_cast<rp::Index>(std::stoul(f.user));
            i = static_cast<rp::Index>(std::stoul(f.item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--user/--item must be dense indices without --dataset");
        }
    }
    if (u >= model->n_users() || i >= model->n_items())
        throw CLI::ValidationError("user or item index out of range for this model");
    double value = model->predict(u, i);
    if (f.clamp) value = rp::clamp_to(rp::RatingScale{}, value);
    std::cout << fmt("%.17g", value) << '\n';
    return ok;
}

struct ExperimentFlags {
    std::string config;
    std::string methods;
    std::string svd_fractions;
    std::string gaps;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_pairs;
    std::string out_csv, out_svg;
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    bool clamp = false;
    std::string dataset_name;
};

rp::ExperimentConfig build_config(const DatasetFlags& ds, const ExperimentFlags& f) {
    rp::ExperimentConfig c;
    if (!f.config.empty()) {
        c = rp::load_config(f.config);
    } else {
        if (ds.path.empty()) throw rp::ConfigError("either --config or --dataset is required");
        c.methods = rp::parse_methods("uc,sc,svd", rp::default_svd_fractions);
    }
    if (!ds.path.empty()) {
        c.dataset = ds.path;
        c.format = ds.format == "csv" ? rp::DataFormat::csv : rp::DataFormat::movielens;
        c.csv_header = ds.csv_header;
    }
    if (ds.max_users) c.max_users = ds.max_users;
    if (ds.max_items) c.max_items = ds.max_items;
    if (!f.dataset_name.empty()) c.dataset_name = f.dataset_name;
    if (!f.methods.empty() || !f.svd_fractions.empty()) {
        auto fractions = f.svd_fractions.empty() ? rp::default_svd_fractions
                                                 : rp::parse_fractions(f.svd_fractions);
        try {
            c.methods = rp::parse_methods(f.methods.empty() ? "uc,sc,svd" : f.methods, fractions);
        } catch (const std::invalid_argument& e) {
            throw rp::ConfigError(e.what());
        }
    }
    if (!f.gaps.empty()) c.gaps = rp::parse_gaps(f.gaps);
    if (f.seed) c.seed = *f.seed;
    if (f.max_pairs) c.max_pairs = f.max_pairs;
    if (f.tol) c.options.balance.tol = *f.tol;
    if (f.max_iter) c.options.balance.max_iter = *f.max_iter;
    if (f.clamp) c.clamp = true;
    if (!f.out_csv.empty()) c.out_csv = f.out_csv;
    if (!f.out_svg.empty()) c.out_svg = f.out_svg;
    try {
        rp::validate(c, rp::RatingScale{});
    } catch (const std::invalid_argument& e) {
        throw rp::ConfigError(e.what());
    }
    return c;
}

int cmd_experiment(const DatasetFlags& ds, const ExperimentFlags& f, int verbosity) {
    const auto config = build_config(ds, f);
    const auto t0 = std::chrono::steady_clock::now();
    const auto matrix = rp::load_dataset(config);
    if (verbosity > 0)
        std::cerr << "loaded " << matrix.n_users() << " users, " << matrix.n_items() << " items, "
                  << matrix.nnz() << " entries\n";
    const auto result = rp::run_experiment(matrix, config);
    const auto table = result.reports();
    if (config.out_csv) rp::emit_report(table, rp::ReportFormat::csv, *config.out_csv);
    if (config.out_svg) rp::emit_report(table, rp::ReportFormat::svg, *config.out_svg);

    std::printf("%-12s %5s %8s %10s %10s %6s %8s %9s %8s\n", "method", "gap", "pairs", "discordant",
                "concordant", "ties", "skipped", "tau", "rmse");
    for (const auto& r : table)
        std::printf("%-12s %2g-%-2g %8zu %10zu %10zu %6zu %8zu %9.4f %8.4f\n", r.method.c_str(),
                    r.r_hi, r.r_lo, r.n_pairs, r.discordant, r.concordant, r.ties, r.skipped,
                    r.kendall_tau, r.rmse_withheld);
    if (verbosity > 0) {
        const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "experiment finished in " << fmt("%.1f", secs) << " s\n";
    }
    if (!result.all_converged()) {
        std::cerr << "error: at least one balancing fit did not reach tolerance\n";
        return nonconvergence;
    }
    return ok;
}

struct AuditFlags {
    std::string method;
    double fraction = 0.3;
    std::size_t trials = 1000;
    std::uint64_t seed = 42;
};

int cmd_audit(const AuditFlags& f) {
    rp::MethodSpec spec;
    if (f.method == "uc")
        spec.kind = rp::MethodKind::uc;
    else if (f.method == "sc")
        spec.kind = rp::MethodKind::sc;
    else
        spec = {rp::MethodKind::svd, f.fraction};
    const auto res = rp::audit_consensus_order(spec, f.trials, f.seed);
    std::cout << spec.label() << ": " << res.violations << " violations in " << res.trials
              << " trials (" << res.ties << " ties)\n";
    if (spec.kind != rp::MethodKind::svd && res.violations > 0) {
        std::cerr << "error: consensus-order violation from an admissible method\n";
        return data;
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-preference evaluation of matrix-completion recommenders"};
    app.require_subcommand(1);
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Progress output on stderr");

    DatasetFlags ds;
    auto* stats = app.add_subcommand("stats", "Print dataset statistics");
    ds.attach(stats, true);

    FitFlags fit;
    auto* fitcmd = app.add_subcommand("fit", "Fit one completion method and optionally save it");
    ds.attach(fitcmd, true);
    fitcmd->add_option("--methods", fit.method, "uc | sc | svd")
        ->check(CLI::IsMember({"uc", "sc", "svd"}));
    fitcmd->add_option("--svd-fractions", fit.fraction, "Retained fraction for svd")
        ->check(CLI::Range(0.0, 1.0));
    fitcmd->add_option("--tol", fit.tol, "Balancing tolerance")->check(CLI::PositiveNumber);
    fitcmd->add_option("--max-iter", fit.max_iter, "Maximum balancing sweeps");
    fitcmd->add_option("--out-model", fit.out_model, "Write the fitted model here");

    PredictFlags pred;
    auto* predcmd = app.add_subcommand("predict", "Predict one rating from a saved model");
    ds.attach(predcmd, false);
    predcmd->add_option("--model", pred.model_path, "Model file from `fit`")->required();
    predcmd->add_option("--user", pred.user, "User id (dense index without --dataset)")->required();
    predcmd->add_option("--item", pred.item, "Item id (dense index without --dataset)")->required();
    predcmd->add_flag("--clamp", pred.clamp, "Clamp to the 1-5 scale");

    ExperimentFlags ex;
    auto* excmd = app.add_subcommand("experiment", "Run the pair-withholding experiment");
    ds.attach(excmd, false);
    excmd->add_option("--config", ex.config, "Experiment config file");
    excmd->add_option("--methods", ex.methods, "Comma list of uc, sc, svd, svd:<f>");
    excmd->add_option("--svd-fractions", ex.svd_fractions, "Comma list of retained fractions");
    excmd->add_option("--gaps", ex.gaps, "Rating pairs, e.g. \"5,1;5,2\"");
    excmd->add_option("--seed", ex.seed, "Master seed");
    excmd->add_option("--max-pairs", ex.max_pairs, "Withheld users per gap (default: all eligible)");
    excmd->add_option("--out-csv", ex.out_csv, "CSV report path");
    excmd->add_option("--out-svg", ex.out_svg, "SVG chart path");
    excmd->add_option("--tol", ex.tol, "Balancing tolerance")->check(CLI::PositiveNumber);
    excmd->add_option("--max-iter", ex.max_iter, "Maximum balancing sweeps");
    excmd->add_flag("--clamp", ex.clamp, "Clamp predictions to the rating scale");
    excmd->add_option("--dataset-name", ex.dataset_name, "Label for the dataset column");

    AuditFlags au;
    auto* aucmd = app.add_subcommand("audit", "Consensus-order audit on random unanimous matrices");
    aucmd->add_option("method", au.method, "uc | sc | svd")
        ->required()
        ->check(CLI::IsMember({"uc", "sc", "svd"}));
    aucmd->add_option("--fraction,--svd-fractions", au.fraction, "Retained fraction for svd")
        ->check(CLI::Range(0.0, 1.0));
    aucmd->add_option("--trials", au.trials, "Number of trials");
    aucmd->add_option("--seed", au.seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (stats->parsed()) return cmd_stats(ds);
        if (fitcmd->parsed()) return cmd_fit(ds, fit);
        if (predcmd->parsed()) return cmd_predict(ds, pred);
        if (excmd->parsed()) return cmd_experiment(ds, ex, verbosity);
        if (aucmd->parsed()) return cmd_audit(au);
    } catch (const rp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return usage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const rp::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return data;
    } catch (const rp::PredictionError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return data;
    }
    return usage;
}
