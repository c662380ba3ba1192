#ifndef AKL_HARNESS_HPP
#define AKL_HARNESS_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <utility>
#include <vector>

#include "akl/modelsel.hpp"

namespace akl {

// ---------------------------------------------------------------------------
// The toy parametric problem: roots of x^2 + a x + b = 0 on [-2,2]^2.
// ---------------------------------------------------------------------------

struct QuadraticParams {
    double a = 0.0;
    double b = 0.0;
};

enum class Branch { Plus, Minus };

inline std::string to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

inline Branch branch_from_string(const std::string& s) {
    if (s == "plus") return Branch::Plus;
    if (s == "minus") return Branch::Minus;
    throw input_error("unknown branch: " + s);
}

/// Both roots (x+, x-) of x^2 + a x + b = 0. Discriminants in [-1e-12, 0)
/// are treated as a double root; anything more negative is infeasible.
inline std::pair<double, double> quadratic_roots(double a, double b) {
    double disc = a * a - 4.0 * b;
    if (disc < -1e-12) throw input_error("quadratic_roots: infeasible parameters (a^2 - 4b < 0)");
    if (disc < 0.0) disc = 0.0;
    const double s = std::sqrt(disc);
    return {(-a + s) / 2.0, (-a - s) / 2.0};
}

inline double quadratic_root(double a, double b, Branch branch) {
    auto [xp, xm] = quadratic_roots(a, b);
    return branch == Branch::Plus ? xp : xm;
}

inline bool feasible(double a, double b) { return a * a - 4.0 * b >= 0.0; }

/// m i.i.d. uniform draws from the feasible subset of [-2,2]^2, by rejection.
inline std::vector<QuadraticParams> sample_feasible(Index m, std::uint64_t seed) {
    if (m < 1) throw input_error("sample_feasible: m must be positive");
    Rng rng(seed);
    std::vector<QuadraticParams> out;
    out.reserve(m);
    while (static_cast<Index>(out.size()) < m) {
        const double a = rng.uniform(-2.0, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        if (feasible(a, b)) out.push_back({a, b});
    }
    return out;
}

/// Dataset with features (a, b) and the chosen root branch as scalar target.
inline Dataset make_dataset(const std::vector<QuadraticParams>& params, Branch branch) {
    if (params.empty()) throw input_error("make_dataset: empty parameter list");
    Dataset data;
    data.points.resize(static_cast<Index>(params.size()), 2);
    data.targets.resize(static_cast<Index>(params.size()), 1);
    for (size_t i = 0; i < params.size(); ++i) {
        data.points(static_cast<Index>(i), 0) = params[i].a;
        data.points(static_cast<Index>(i), 1) = params[i].b;
        data.targets(static_cast<Index>(i), 0) =
            quadratic_root(params[i].a, params[i].b, branch);
    }
    return data;
}

/// r x r uniform lattice on [-2,2]^2, filtered to the feasible set.
inline Matrix eval_grid(int resolution) {
    if (resolution < 2) throw input_error("eval_grid: resolution must be >= 2");
    std::vector<std::pair<double, double>> kept;
    for (int i = 0; i < resolution; ++i) {
        const double a = -2.0 + 4.0 * i / (resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double b = -2.0 + 4.0 * j / (resolution - 1);
            if (feasible(a, b)) kept.emplace_back(a, b);
        }
    }
    Matrix grid(static_cast<Index>(kept.size()), 2);
    for (size_t i = 0; i < kept.size(); ++i) {
        grid(static_cast<Index>(i), 0) = kept[i].first;
        grid(static_cast<Index>(i), 1) = kept[i].second;
    }
    return grid;
}

inline std::function<double(const Vector&)> truth_fn(Branch branch) {
    return [branch](const Vector& x) { return quadratic_root(x(0), x(1), branch); };
}

// ---------------------------------------------------------------------------
// Experiment protocols
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    Branch branch = Branch::Plus;
    Index m = 100;
    std::uint64_t seed = 1;
    int grid_resolution = 101;
    std::string method = "nw";  // nw | rkhs | adaptive_common | adaptive_per_point
    std::vector<int> ks = {3, 10};
    double lambda = 0.005;
    std::vector<double> lambda_grid;  // empty -> single fixed lambda
    int iterations = 15;
    int width_init_k = 4;
    AlphaMode alpha_mode = AlphaMode::Exact;
    bool sigma_data_holdout = false;  // true -> sigma-step on the test sample
    SigmaOptConfig sigma_opt;
    std::string out_dir;  // empty -> no files written

    void validate() const {
        if (m < 2) throw input_error("experiment: m must be >= 2");
        if (grid_resolution < 2) throw input_error("experiment: grid resolution must be >= 2");
    }
};

namespace harness_detail {

inline void write_grid_csv(const std::string& path, const Matrix& grid,
                           const std::function<double(const Vector&)>& truth,
                           const Predictor& predict) {
    std::ofstream os(path);
    if (!os) throw input_error("cannot open for writing: " + path);
    os << "a,b,truth,prediction\n";
    for (Index i = 0; i < grid.rows(); ++i) {
        const Vector x = grid.row(i);
        os << csv_detail::fmt(x(0)) << ',' << csv_detail::fmt(x(1)) << ','
           << csv_detail::fmt(truth(x)) << ',' << csv_detail::fmt(predict(x)(0)) << '\n';
    }
}

inline void write_trace_csv(const std::string& path, const AdaptTrace& trace) {
    std::ofstream os(path);
    if (!os) throw input_error("cannot open for writing: " + path);
    os << "iter,objective,train_sup,test_sup\n";
    for (const AdaptIterationRecord& rec : trace.records) {
        os << rec.iteration << ',' << csv_detail::fmt(rec.objective) << ','
           << csv_detail::fmt(rec.train_sup) << ','
           << (std::isnan(rec.test_sup) ? std::string() : csv_detail::fmt(rec.test_sup))
           << '\n';
    }
}

inline void ensure_out_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

inline std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace harness_detail

struct NwExperimentRow {
    int k = 0;
    double delta_sup = 0.0;  // sup error on the feasible evaluation grid
};

struct NwExperimentReport {
    std::vector<NwExperimentRow> rows;
    Matrix grid;
};

/// k-nearest-neighbor NW regression on the quadratic problem: one row per
/// configured k with the grid sup-error against the analytic roots.
inline NwExperimentReport run_nw_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Dataset train = make_dataset(sample_feasible(cfg.m, cfg.seed), cfg.branch);
    const Matrix grid = eval_grid(cfg.grid_resolution);
    const auto truth = truth_fn(cfg.branch);
    harness_detail::ensure_out_dir(cfg.out_dir);

    NwExperimentReport report;
    report.grid = grid;
    for (int k : cfg.ks) {
        NwEstimator est{train, KernelSpec::common(2, 1.0), k, ScalingMode::SelfScaled};
        const Predictor predict = make_predictor(est);
        report.rows.push_back({k, sup_error_grid(predict, truth, grid)});
        if (!cfg.out_dir.empty())
            harness_detail::write_grid_csv(
                harness_detail::join(cfg.out_dir, "grid_nw_k" + std::to_string(k) + ".csv"),
                grid, truth, predict);
    }
    return report;
}

struct AdaptiveExperimentReport {
    double delta_before = 0.0;  // grid sup-error at the initial widths
    double delta_after = 0.0;   // grid sup-error after width adaptation
    double lambda_used = 0.0;
    AdaptTrace trace;
    SweepReport sweep;  // populated when a lambda grid was swept
    bool swept = false;
    KernelModel model;
};

/// Full adaptive protocol: sample, 4-NN width initialization, optional
/// lambda sweep, alternating weight/width optimization, before/after grid
/// errors and the full trace.
inline AdaptiveExperimentReport run_adaptive_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Dataset train = make_dataset(sample_feasible(cfg.m, cfg.seed), cfg.branch);
    const Dataset test = make_dataset(sample_feasible(cfg.m, cfg.seed + 0x9e37), cfg.branch);
    const Matrix grid = eval_grid(cfg.grid_resolution);
    const auto truth = truth_fn(cfg.branch);
    harness_detail::ensure_out_dir(cfg.out_dir);

    const bool common = cfg.method == "adaptive_common" || cfg.method == "rkhs";
    const KernelSpec per_point_init =
        init_widths_knn(train.points, cfg.width_init_k, cfg.sigma_opt.sigma_min,
                        cfg.sigma_opt.sigma_max);
    const KernelSpec init =
        common ? KernelSpec::common(2, per_point_init.widths.mean(),
                                    per_point_init.sigma_min, per_point_init.sigma_max)
               : per_point_init;

    SigmaOptConfig opt = cfg.sigma_opt;
    opt.method = common ? SigmaMethod::GoldenSectionCommon : SigmaMethod::SimplexPerPoint;

    AdaptiveExperimentReport report;
    double lambda = cfg.lambda;
    if (!cfg.lambda_grid.empty()) {
        TruthSpec truth_spec{truth, grid};
        const SweepMethod method = cfg.method == "rkhs" ? SweepMethod::Rkhs
                                   : common             ? SweepMethod::AdaptiveCommon
                                                        : SweepMethod::AdaptivePerPoint;
        report.sweep = lambda_sweep(train, test, &truth_spec, cfg.lambda_grid, method, opt,
                                    cfg.iterations, cfg.alpha_mode);
        report.sweep.seed = cfg.seed;
        report.swept = true;
        lambda = report.sweep.selected_lambda;
        if (!cfg.out_dir.empty()) {
            std::ofstream os(harness_detail::join(cfg.out_dir, "sweep.csv"));
            write_sweep_csv(report.sweep, os);
        }
    }
    report.lambda_used = lambda;

    // "Before": weights fitted at the initial widths, no width adaptation.
    KernelModel before;
    if (cfg.method == "rkhs") {
        FitConfig fit_cfg;
        fit_cfg.lambda = lambda;
        before = fit_rkhs(train, init, fit_cfg);
    } else {
        before.centers = train.points;
        before.spec = init;
        before.weights = alpha_step(train, init, lambda, cfg.alpha_mode);
        before.lambda_used = lambda;
        before.flavor = ModelFlavor::L2Adaptive;
    }
    report.delta_before = sup_error_grid(make_predictor(before), truth, grid);

    KernelModel model = before;
    if (cfg.method != "rkhs" && cfg.iterations > 0) {
        const Dataset& sigma_data = cfg.sigma_data_holdout ? test : train;
        auto [adapted, trace] = alternate(train, sigma_data, lambda, cfg.iterations, opt,
                                          init, cfg.alpha_mode, &test);
        model = adapted;
        report.trace = std::move(trace);
    }
    report.model = model;
    report.delta_after = sup_error_grid(make_predictor(model), truth, grid);

    if (!cfg.out_dir.empty()) {
        harness_detail::write_grid_csv(harness_detail::join(cfg.out_dir, "grid_before.csv"),
                                       grid, truth, make_predictor(before));
        harness_detail::write_grid_csv(harness_detail::join(cfg.out_dir, "grid_after.csv"),
                                       grid, truth, make_predictor(model));
        harness_detail::write_trace_csv(harness_detail::join(cfg.out_dir, "trace.csv"),
                                        report.trace);
    }
    return report;
}

}  // namespace akl

#endif
