#ifndef AKL_MODELSEL_HPP
#define AKL_MODELSEL_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "akl/adaptive.hpp"
#include "akl/nadaraya.hpp"

namespace akl {

using Predictor = std::function<Vector(const Vector&)>;

inline Predictor make_predictor(const KernelModel& model) {
    return [model](const Vector& x) { return predict_model(model, x); };
}

inline Predictor make_predictor(const NwEstimator& est) {
    return [est](const Vector& x) { return nw_knn_predict(est, x); };
}

struct ErrorMetrics {
    double sup = 0.0;
    double mean_abs = 0.0;
    double rmse = 0.0;
};

/// Sup / mean-absolute / root-mean-square errors of a predictor against a
/// labeled sample. The sup uses the max-norm per point; the mean metrics
/// run over all target entries.
inline ErrorMetrics error_metrics(const Predictor& predict, const Dataset& labeled) {
    labeled.validate();
    ErrorMetrics m;
    double abs_sum = 0.0, sq_sum = 0.0;
    const double count = static_cast<double>(labeled.size() * labeled.target_dim());
    for (Index i = 0; i < labeled.size(); ++i) {
        const Vector err =
            predict(Vector(labeled.points.row(i))) - labeled.targets.row(i).transpose();
        m.sup = std::max(m.sup, err.cwiseAbs().maxCoeff());
        abs_sum += err.cwiseAbs().sum();
        sq_sum += err.squaredNorm();
    }
    m.mean_abs = abs_sum / count;
    m.rmse = std::sqrt(sq_sum / count);
    return m;
}

/// Max |truth - prediction| over a grid of points (scalar targets).
inline double sup_error_grid(const Predictor& predict,
                             const std::function<double(const Vector&)>& truth,
                             const Matrix& grid) {
    if (grid.rows() < 1) throw input_error("sup_error_grid: empty grid");
    double sup = 0.0;
    for (Index i = 0; i < grid.rows(); ++i) {
        const Vector x = grid.row(i);
        double t;
        try {
            t = truth(x);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sup_error_grid: truth oracle failed at (";
            for (Index l = 0; l < x.size(); ++l) msg << (l ? ", " : "") << x(l);
            msg << "): " << e.what();
            throw input_error(msg.str());
        }
        sup = std::max(sup, std::fabs(t - predict(x)(0)));
    }
    return sup;
}

enum class SweepMethod { Rkhs, AdaptiveCommon, AdaptivePerPoint };

inline std::string to_string(SweepMethod m) {
    switch (m) {
        case SweepMethod::Rkhs: return "rkhs";
        case SweepMethod::AdaptiveCommon: return "adaptive_common";
        case SweepMethod::AdaptivePerPoint: return "adaptive_per_point";
    }
    return "?";
}

struct SweepRow {
    double lambda = 0.0;
    double train_sup = 0.0, train_mae = 0.0;
    double test_sup = 0.0, test_mae = 0.0;
    double true_sup = std::numeric_limits<double>::quiet_NaN();
    bool has_true = false;
    bool selected = false;
    bool failed = false;
    std::string error;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double selected_lambda = 0.0;
    std::uint64_t seed = 0;
    Index m = 0;
    std::string method;
    int iterations = 0;
};

/// Lambda of the minimum-test-error row; ties go to the smaller lambda.
inline double select_lambda(const SweepReport& report) {
    const SweepRow* best = nullptr;
    for (const SweepRow& row : report.rows) {
        if (row.failed) continue;
        if (!best || row.test_sup < best->test_sup ||
            (row.test_sup == best->test_sup && row.lambda < best->lambda))
            best = &row;
    }
    if (!best) throw input_error("select_lambda: all sweep rows failed");
    return best->lambda;
}

/// The 13-point log grid on [1e-4, 1e-1] used throughout the experiments.
inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid(13);
    for (int i = 0; i < 13; ++i) grid[i] = std::pow(10.0, -4.0 + 3.0 * i / 12.0);
    return grid;
}

/// Optional ground truth for sweeps: an oracle plus the grid to sup over.
struct TruthSpec {
    std::function<double(const Vector&)> fn;
    Matrix grid;
};

/// One full fit per lambda on shared data; selection by minimum test
/// sup-error. Per-lambda numerical failures are recorded in the row.
inline SweepReport lambda_sweep(const Dataset& train, const Dataset& test,
                                const TruthSpec* truth, const std::vector<double>& lambda_grid,
                                SweepMethod method, const SigmaOptConfig& opt, int iterations,
                                AlphaMode alpha_mode = AlphaMode::Exact) {
    train.validate();
    test.validate();
    if (lambda_grid.empty()) throw input_error("lambda_sweep: empty grid");
    for (size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0)) throw input_error("lambda_sweep: lambdas must be positive");
        if (i > 0 && lambda_grid[i] <= lambda_grid[i - 1])
            throw input_error("lambda_sweep: grid must be strictly ascending");
    }

    const KernelSpec per_point_init = init_widths_knn(train.points, 4, opt.sigma_min, opt.sigma_max);
    const KernelSpec common_init =
        KernelSpec::common(train.dim(), per_point_init.widths.mean(),
                           per_point_init.sigma_min, per_point_init.sigma_max);

    SweepReport report;
    report.m = train.size();
    report.method = to_string(method);
    report.iterations = iterations;
    report.rows.resize(lambda_grid.size());

    for (size_t i = 0; i < lambda_grid.size(); ++i) {
        SweepRow& row = report.rows[i];
        row.lambda = lambda_grid[i];
        try {
            KernelModel model;
            if (method == SweepMethod::Rkhs) {
                FitConfig cfg;
                cfg.lambda = row.lambda;
                model = fit_rkhs(train, common_init, cfg);
            } else {
                SigmaOptConfig step_opt = opt;
                step_opt.method = method == SweepMethod::AdaptiveCommon
                                      ? SigmaMethod::GoldenSectionCommon
                                      : SigmaMethod::SimplexPerPoint;
                const KernelSpec& init =
                    method == SweepMethod::AdaptiveCommon ? common_init : per_point_init;
                model = alternate(train, train, row.lambda, iterations, step_opt, init,
                                  alpha_mode)
                            .first;
            }
            const Predictor predict = make_predictor(model);
            const ErrorMetrics on_train = error_metrics(predict, train);
            const ErrorMetrics on_test = error_metrics(predict, test);
            row.train_sup = on_train.sup;
            row.train_mae = on_train.mean_abs;
            row.test_sup = on_test.sup;
            row.test_mae = on_test.mean_abs;
            if (truth) {
                row.true_sup = sup_error_grid(predict, truth->fn, truth->grid);
                row.has_true = true;
            }
        } catch (const numerical_error& e) {
            row.failed = true;
            row.error = e.what();
        }
    }

    report.selected_lambda = select_lambda(report);
    for (SweepRow& row : report.rows)
        row.selected = !row.failed && row.lambda == report.selected_lambda;
    return report;
}

namespace csv_detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace csv_detail

/// CSV: `lambda,train_sup,train_mae,test_sup,test_mae,true_sup,selected`,
/// true_sup empty when no truth oracle was supplied.
inline void write_sweep_csv(const SweepReport& report, std::ostream& os) {
    os << "lambda,train_sup,train_mae,test_sup,test_mae,true_sup,selected\n";
    for (const SweepRow& row : report.rows) {
        os << csv_detail::fmt(row.lambda) << ',' << csv_detail::fmt(row.train_sup) << ','
           << csv_detail::fmt(row.train_mae) << ',' << csv_detail::fmt(row.test_sup) << ','
           << csv_detail::fmt(row.test_mae) << ','
           << (row.has_true ? csv_detail::fmt(row.true_sup) : "") << ','
           << (row.selected ? 1 : 0) << '\n';
    }
}

inline SweepReport read_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) ||
        line != "lambda,train_sup,train_mae,test_sup,test_mae,true_sup,selected")
        throw input_error("sweep csv: bad header");
    SweepReport report;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t pos = 0;
        while (true) {
            size_t comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 7) throw input_error("sweep csv: bad row");
        SweepRow row;
        row.lambda = std::stod(fields[0]);
        row.train_sup = std::stod(fields[1]);
        row.train_mae = std::stod(fields[2]);
        row.test_sup = std::stod(fields[3]);
        row.test_mae = std::stod(fields[4]);
        if (!fields[5].empty()) {
            row.true_sup = std::stod(fields[5]);
            row.has_true = true;
        }
        row.selected = fields[6] == "1";
        if (row.selected) report.selected_lambda = row.lambda;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace akl

#endif
