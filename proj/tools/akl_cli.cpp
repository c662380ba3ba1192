// Command-line front end: fitting, prediction, alternating adaptation,
// lambda sweeps, the quadratic-roots demo and the Gram-matrix oracle check.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "akl/akl.hpp"

namespace {

using namespace akl;

std::vector<double> parse_lambda_grid(const std::string& csv) {
    std::vector<double> grid;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        std::string tok = csv.substr(pos, comma - pos);
        if (!tok.empty()) grid.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (grid.empty()) throw input_error("empty lambda grid");
    return grid;
}

AlphaMode parse_alpha_mode(const std::string& s) {
    if (s == "exact") return AlphaMode::Exact;
    if (s == "paper") return AlphaMode::PaperLiteral;
    throw input_error("alpha mode must be 'exact' or 'paper'");
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

/// Query CSV: header x1,...,xn, feature rows only.
Matrix load_points(const std::string& path, Index n) {
    std::ifstream is(path);
    if (!is) throw input_error("cannot open query file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw input_error(path + ": empty file");
    const auto header = io_detail::split_csv_line(line);
    if (static_cast<Index>(header.size()) != n)
        throw input_error(path + ":1: expected " + std::to_string(n) + " feature columns");
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = io_detail::split_csv_line(line);
        if (static_cast<Index>(fields.size()) != n)
            throw input_error(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(n) + " fields");
        std::vector<double> row(n);
        for (Index j = 0; j < n; ++j)
            row[j] = io_detail::parse_double(fields[j], line_no, path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw input_error(path + ": no query points");
    Matrix pts(static_cast<Index>(rows.size()), n);
    for (size_t i = 0; i < rows.size(); ++i)
        for (Index j = 0; j < n; ++j) pts(static_cast<Index>(i), j) = rows[i][j];
    return pts;
}

void write_predictions(const Matrix& preds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw input_error("cannot open for writing: " + path);
    for (Index j = 0; j < preds.cols(); ++j) os << (j ? "," : "") << 'y' << (j + 1);
    os << '\n';
    for (Index i = 0; i < preds.rows(); ++i) {
        for (Index j = 0; j < preds.cols(); ++j)
            os << (j ? "," : "") << csv_detail::fmt(preds(i, j));
        os << '\n';
    }
}

struct CommonOpts {
    std::string out = "out";
    std::uint64_t seed = 1;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--seed", c.seed, "RNG seed");
    cmd->add_option("--threads", c.threads, "worker threads for matrix fills");
}

int cmd_fit(const std::string& data_path, Index targets, const std::string& method,
            double lambda, const std::string& variant, double sigma, int iterations,
            int width_init_k, const std::string& alpha_mode, const std::string& widths_kind,
            double holdout_fraction, const CommonOpts& common) {
    Dataset data = load_dataset(data_path, targets);
    KernelSpec per_point = init_widths_knn(data.points, width_init_k);
    const double auto_sigma = sigma > 0.0 ? sigma : per_point.widths.mean();

    if (method == "rkhs") {
        FitConfig cfg;
        cfg.lambda = lambda;
        cfg.variant = variant == "mean" ? RkhsVariant::MeanScaled : RkhsVariant::Plain;
        KernelSpec spec = KernelSpec::common(data.dim(), auto_sigma, per_point.sigma_min,
                                             per_point.sigma_max);
        KernelModel model = fit_rkhs(data, spec, cfg);
        save_model(model, out_path(common.out, "model.json"));
        ErrorMetrics m = error_metrics(make_predictor(model), data);
        std::cout << "fitted rkhs (" << variant << "), train sup=" << m.sup
                  << " mae=" << m.mean_abs << "\n";
    } else if (method == "mc") {
        KernelModel model = mc_estimate(data, auto_sigma);
        save_model(model, out_path(common.out, "model.json"));
        std::cout << "monte-carlo estimate at sigma=" << auto_sigma << "\n";
    } else if (method == "adaptive") {
        KernelSpec init = widths_kind == "common"
                              ? KernelSpec::common(data.dim(), per_point.widths.mean(),
                                                   per_point.sigma_min, per_point.sigma_max)
                              : per_point;
        SigmaOptConfig opt;
        opt.method = widths_kind == "common" ? SigmaMethod::GoldenSectionCommon
                                             : SigmaMethod::SimplexPerPoint;
        auto [model, trace] = alternate(data, data, lambda, iterations, opt, init,
                                        parse_alpha_mode(alpha_mode));
        save_model(model, out_path(common.out, "model.json"));
        harness_detail::write_trace_csv(out_path(common.out, "trace.csv"), trace);
        std::cout << "fitted adaptive (" << widths_kind << "), final objective="
                  << trace.records.back().objective << "\n";
    } else if (method == "nw") {
        // NW carries no weights to fit; its free parameters are the widths,
        // tuned on a holdout split and written as a widths file.
        const Index m = data.size();
        const Index holdout = std::max<Index>(1, static_cast<Index>(holdout_fraction * m));
        if (holdout >= m) throw input_error("fit nw: holdout fraction leaves no training data");
        Dataset train{data.points.topRows(m - holdout), data.targets.topRows(m - holdout)};
        Dataset validation{data.points.bottomRows(holdout), data.targets.bottomRows(holdout)};
        KernelSpec init = init_widths_knn(train.points,
                                          std::min<Index>(width_init_k, train.size() - 1));
        SigmaOptConfig opt;
        NwFitResult fit = nw_fit_widths(train, validation, init, opt);
        nlohmann::json j;
        j["version"] = 1;
        j["n"] = data.dim();
        j["widths"] = io_detail::matrix_to_json(fit.spec.widths);
        j["validation_sse"] = fit.objective;
        std::ofstream os(out_path(common.out, "nw_widths.json"));
        os << j.dump(2) << '\n';
        std::cout << "nw widths fitted, validation sse " << fit.initial_objective << " -> "
                  << fit.objective << "\n";
    } else {
        throw input_error("fit: unknown method '" + method + "'");
    }
    return 0;
}

int cmd_gram_check(int n, int trials, double tol, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vector xi(n), xj(n);
        for (int l = 0; l < n; ++l) {
            xi(l) = rng.uniform(-3.0, 3.0);
            xj(l) = rng.uniform(-3.0, 3.0);
        }
        const double si = rng.uniform(0.05, 2.5);
        const double sj = rng.uniform(0.05, 2.5);
        const double analytic = l2_inner(xi, si, xj, sj);
        const double numeric = l2_inner_quadrature(xi, si, xj, sj, 1e-9);
        worst = std::max(worst, std::fabs(analytic - numeric) / analytic);
    }
    std::cout << "gram-check: " << trials << " trials, n=" << n
              << ", worst relative deviation " << worst << " (tol " << tol << ")\n";
    if (worst >= tol) throw numerical_error("gram-check: oracle deviation above tolerance");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive kernel learning for parametric model analysis"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "fit a model on a CSV dataset");
    std::string fit_data, fit_method = "rkhs", fit_variant = "plain", fit_alpha = "exact";
    std::string fit_widths = "per-point";
    Index fit_targets = 1;
    double fit_lambda = 0.005, fit_sigma = 0.0, fit_holdout = 0.2;
    int fit_iters = 15, fit_init_k = 4;
    CommonOpts fit_common;
    fit->add_option("--data", fit_data, "training CSV")->required();
    fit->add_option("--targets", fit_targets, "number of target columns");
    fit->add_option("--method", fit_method, "nw | rkhs | mc | adaptive");
    fit->add_option("--lambda", fit_lambda, "regularization parameter");
    fit->add_option("--variant", fit_variant, "rkhs variant: plain | mean");
    fit->add_option("--sigma", fit_sigma, "common kernel width (default: mean 4-NN distance)");
    fit->add_option("--iters", fit_iters, "alternation iterations");
    fit->add_option("--width-init-k", fit_init_k, "neighbor rank for width initialization");
    fit->add_option("--alpha-mode", fit_alpha, "exact | paper");
    fit->add_option("--widths", fit_widths, "adaptive width kind: common | per-point");
    fit->add_option("--holdout", fit_holdout, "nw: validation fraction for width fitting");
    add_common(fit, fit_common);

    // predict
    auto* predict = app.add_subcommand("predict", "evaluate a saved model on query points");
    std::string pred_model, pred_data;
    CommonOpts pred_common;
    predict->add_option("--model", pred_model, "model JSON")->required();
    predict->add_option("--data", pred_data, "query CSV (features only)")->required();
    add_common(predict, pred_common);

    // adapt
    auto* adapt = app.add_subcommand("adapt", "alternating weight/width optimization");
    std::string adapt_data, adapt_alpha = "exact", adapt_widths = "per-point",
                adapt_sigma_data = "train", adapt_holdout_file;
    Index adapt_targets = 1;
    double adapt_lambda = 0.005;
    int adapt_iters = 15, adapt_init_k = 4;
    CommonOpts adapt_common;
    adapt->add_option("--data", adapt_data, "training CSV")->required();
    adapt->add_option("--targets", adapt_targets, "number of target columns");
    adapt->add_option("--lambda", adapt_lambda, "regularization parameter");
    adapt->add_option("--iters", adapt_iters, "alternation iterations");
    adapt->add_option("--width-init-k", adapt_init_k, "neighbor rank for width init");
    adapt->add_option("--alpha-mode", adapt_alpha, "exact | paper");
    adapt->add_option("--widths", adapt_widths, "common | per-point");
    adapt->add_option("--sigma-data", adapt_sigma_data,
                      "width-step sample: train | holdout (needs --holdout-data)");
    adapt->add_option("--holdout-data", adapt_holdout_file, "CSV for the holdout width step");
    add_common(adapt, adapt_common);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "lambda grid sweep with test-error selection");
    std::string sweep_train, sweep_test, sweep_method = "adaptive_per_point",
                sweep_grid_csv, sweep_alpha = "exact";
    Index sweep_targets = 1;
    int sweep_iters = 15;
    CommonOpts sweep_common;
    sweep->add_option("--data", sweep_train, "training CSV")->required();
    sweep->add_option("--test", sweep_test, "test CSV")->required();
    sweep->add_option("--targets", sweep_targets, "number of target columns");
    sweep->add_option("--lambda-grid", sweep_grid_csv,
                      "comma-separated lambdas (default: 13-point log grid on [1e-4,1e-1])");
    sweep->add_option("--method", sweep_method, "rkhs | adaptive_common | adaptive_per_point");
    sweep->add_option("--iters", sweep_iters, "alternation iterations per lambda");
    sweep->add_option("--alpha-mode", sweep_alpha, "exact | paper");
    add_common(sweep, sweep_common);

    // demo-quadratic
    auto* demo = app.add_subcommand("demo-quadratic",
                                    "quadratic-roots experiments (NW / RKHS / adaptive)");
    std::string demo_method = "nw", demo_branch = "plus", demo_grid_csv,
                demo_alpha = "exact", demo_sigma_data = "train";
    Index demo_m = 100;
    double demo_lambda = 0.005;
    int demo_iters = 15, demo_grid_res = 101, demo_init_k = 4;
    std::vector<int> demo_ks = {3, 10};
    CommonOpts demo_common;
    demo->add_option("--method", demo_method,
                     "nw | rkhs | adaptive-common | adaptive-per-point");
    demo->add_option("--m", demo_m, "training sample size");
    demo->add_option("--k", demo_ks, "NW neighbor counts");
    demo->add_option("--lambda", demo_lambda, "fixed regularization parameter");
    demo->add_option("--lambda-grid", demo_grid_csv, "comma-separated sweep lambdas");
    demo->add_option("--iters", demo_iters, "alternation iterations");
    demo->add_option("--branch", demo_branch, "root branch: plus | minus");
    demo->add_option("--grid-res", demo_grid_res, "evaluation grid resolution");
    demo->add_option("--width-init-k", demo_init_k, "neighbor rank for width init");
    demo->add_option("--alpha-mode", demo_alpha, "exact | paper");
    demo->add_option("--sigma-data", demo_sigma_data, "width-step sample: train | holdout");
    add_common(demo, demo_common);

    // gram-check
    auto* gram = app.add_subcommand("gram-check",
                                    "compare analytic L2 inner products with quadrature");
    int gram_n = 1, gram_trials = 50;
    double gram_tol = 1e-6;
    std::uint64_t gram_seed = 1;
    gram->add_option("--n", gram_n, "dimension (1 or 2)");
    gram->add_option("--trials", gram_trials, "number of random tuples");
    gram->add_option("--tol", gram_tol, "relative tolerance");
    gram->add_option("--seed", gram_seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*fit) {
            set_thread_count(fit_common.threads);
            return cmd_fit(fit_data, fit_targets, fit_method, fit_lambda, fit_variant,
                           fit_sigma, fit_iters, fit_init_k, fit_alpha, fit_widths,
                           fit_holdout, fit_common);
        }
        if (*predict) {
            set_thread_count(pred_common.threads);
            KernelModel model = load_model(pred_model);
            Matrix queries = load_points(pred_data, model.dim());
            write_predictions(predict_matrix(model, queries),
                              out_path(pred_common.out, "predictions.csv"));
            std::cout << "wrote " << queries.rows() << " predictions\n";
            return 0;
        }
        if (*adapt) {
            set_thread_count(adapt_common.threads);
            Dataset train = load_dataset(adapt_data, adapt_targets);
            KernelSpec per_point = init_widths_knn(train.points, adapt_init_k);
            KernelSpec init = adapt_widths == "common"
                                  ? KernelSpec::common(train.dim(), per_point.widths.mean(),
                                                       per_point.sigma_min,
                                                       per_point.sigma_max)
                                  : per_point;
            SigmaOptConfig opt;
            opt.method = adapt_widths == "common" ? SigmaMethod::GoldenSectionCommon
                                                  : SigmaMethod::SimplexPerPoint;
            Dataset sigma_data = train;
            if (adapt_sigma_data == "holdout") {
                if (adapt_holdout_file.empty())
                    throw input_error("adapt: --sigma-data holdout requires --holdout-data");
                sigma_data = load_dataset(adapt_holdout_file, adapt_targets);
            } else if (adapt_sigma_data != "train") {
                throw input_error("adapt: --sigma-data must be train or holdout");
            }
            auto [model, trace] = alternate(train, sigma_data, adapt_lambda, adapt_iters, opt,
                                            init, parse_alpha_mode(adapt_alpha));
            save_model(model, out_path(adapt_common.out, "model.json"));
            harness_detail::write_trace_csv(out_path(adapt_common.out, "trace.csv"), trace);
            std::cout << "adapted in " << trace.records.size() << " iterations, objective "
                      << trace.records.front().objective << " -> "
                      << trace.records.back().objective << "\n";
            return 0;
        }
        if (*sweep) {
            set_thread_count(sweep_common.threads);
            Dataset train = load_dataset(sweep_train, sweep_targets);
            Dataset test = load_dataset(sweep_test, sweep_targets);
            std::vector<double> grid = sweep_grid_csv.empty()
                                           ? default_lambda_grid()
                                           : parse_lambda_grid(sweep_grid_csv);
            SweepMethod method;
            if (sweep_method == "rkhs") method = SweepMethod::Rkhs;
            else if (sweep_method == "adaptive_common") method = SweepMethod::AdaptiveCommon;
            else if (sweep_method == "adaptive_per_point")
                method = SweepMethod::AdaptivePerPoint;
            else throw input_error("sweep: unknown method '" + sweep_method + "'");
            SigmaOptConfig opt;
            SweepReport report = lambda_sweep(train, test, nullptr, grid, method, opt,
                                              sweep_iters, parse_alpha_mode(sweep_alpha));
            report.seed = sweep_common.seed;
            std::ofstream os(out_path(sweep_common.out, "sweep.csv"));
            write_sweep_csv(report, os);
            std::cout << "selected lambda " << report.selected_lambda << "\n";
            return 0;
        }
        if (*demo) {
            set_thread_count(demo_common.threads);
            ExperimentConfig cfg;
            cfg.branch = branch_from_string(demo_branch);
            cfg.m = demo_m;
            cfg.seed = demo_common.seed;
            cfg.grid_resolution = demo_grid_res;
            cfg.ks = demo_ks;
            cfg.lambda = demo_lambda;
            if (!demo_grid_csv.empty()) cfg.lambda_grid = parse_lambda_grid(demo_grid_csv);
            cfg.iterations = demo_iters;
            cfg.width_init_k = demo_init_k;
            cfg.alpha_mode = parse_alpha_mode(demo_alpha);
            cfg.sigma_data_holdout = demo_sigma_data == "holdout";
            cfg.out_dir = demo_common.out;
            if (demo_method == "nw") {
                cfg.method = "nw";
                NwExperimentReport report = run_nw_experiment(cfg);
                for (const auto& row : report.rows)
                    std::cout << "k=" << row.k << "  sup error " << row.delta_sup << "\n";
            } else if (demo_method == "rkhs" || demo_method == "adaptive-common" ||
                       demo_method == "adaptive-per-point") {
                cfg.method = demo_method == "rkhs" ? "rkhs"
                             : demo_method == "adaptive-common" ? "adaptive_common"
                                                                : "adaptive_per_point";
                AdaptiveExperimentReport report = run_adaptive_experiment(cfg);
                save_model(report.model, out_path(cfg.out_dir, "model.json"));
                std::cout << "lambda " << report.lambda_used << ", sup error "
                          << report.delta_before << " -> " << report.delta_after << "\n";
            } else {
                throw input_error("demo-quadratic: unknown method '" + demo_method + "'");
            }
            return 0;
        }
        if (*gram) return cmd_gram_check(gram_n, gram_trials, gram_tol, gram_seed);
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
