#ifndef AKL_ADAPTIVE_HPP
#define AKL_ADAPTIVE_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "akl/ridge.hpp"
#include "akl/width_opt.hpp"

namespace akl {

enum class AlphaMode { Exact, PaperLiteral };

/// One record per alternation iteration.
struct AdaptIterationRecord {
    int iteration = 0;
    double objective = 0.0;
    double train_sup = 0.0;
    double test_sup = std::numeric_limits<double>::quiet_NaN();
    double width_min = 0.0;
    double width_max = 0.0;
    bool sigma_budget_exhausted = false;
};

struct AdaptTrace {
    std::vector<AdaptIterationRecord> records;
    bool completed = true;       // false when a numerical failure cut the run short
    std::string failure_reason;  // set when !completed
};

/// Per-point widths initialized from the distance to the k-th nearest other
/// sample point, clamped into [sigma_min, sigma_max]. Default bounds come
/// from the point-set diameter: [1e-3 * diam, diam].
inline KernelSpec init_widths_knn(const Matrix& points, Index k = 4, double sigma_min = 0.0,
                                  double sigma_max = 0.0) {
    const Index m = points.rows();
    if (k < 1 || k >= m) throw input_error("init_widths_knn: need 1 <= k < m");

    double diam = 0.0;
    for (Index i = 0; i < m; ++i)
        for (Index j = i + 1; j < m; ++j)
            diam = std::max(diam, (points.row(i) - points.row(j)).norm());
    if (diam <= 0.0) diam = 1.0;  // all points coincide
    if (sigma_min <= 0.0) sigma_min = 1e-3 * diam;
    if (sigma_max <= 0.0) sigma_max = diam;

    Vector sigmas(m);
    for (Index i = 0; i < m; ++i) {
        std::vector<double> d;
        d.reserve(m - 1);
        for (Index j = 0; j < m; ++j)
            if (j != i) d.push_back((points.row(i) - points.row(j)).norm());
        std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
        sigmas(i) = std::clamp(d[k - 1], sigma_min, sigma_max);
    }
    return KernelSpec::per_point(points.cols(), sigmas, sigma_min, sigma_max);
}

/// Weight step of the alternating procedure.
///   Exact:        alpha = (E^T E + lambda K)^{-1} E^T y, the minimizer of the
///                 L2-regularized quadratic loss (E evaluation, K L2 Gram).
///   PaperLiteral: alpha = (K + lambda I)^{-1} y, the RKHS closed form
///                 transferred verbatim.
inline Matrix alpha_step(const Dataset& data, const KernelSpec& spec, double lambda,
                         AlphaMode mode = AlphaMode::Exact) {
    data.validate();
    spec.validate(data.size());
    if (spec.n != data.dim()) throw input_error("alpha_step: dimension mismatch");
    if (!(lambda > 0.0)) throw input_error("alpha_step: lambda must be positive");

    FitConfig cfg;
    const Matrix K = gram_l2(data.points, spec);
    if (mode == AlphaMode::PaperLiteral) {
        Matrix A = K;
        A.diagonal().array() += lambda;
        return solve_spd(A, data.targets, cfg);
    }
    const Matrix E = eval_matrix(data.points, spec, data.points);
    const Matrix A = E.transpose() * E + lambda * K;
    return solve_spd(A, E.transpose() * data.targets, cfg);
}

/// Regularized quadratic loss with the loss term evaluated at `eval_data`
/// and centers/regularizer taken from `centers`:
///   sum_i ||y_i - sum_j alpha_j k_j(x_i)||^2 + lambda * sum_c alpha_c^T K alpha_c.
inline double objective_value_at(const Matrix& centers, const Dataset& eval_data,
                                 const Matrix& alpha, const KernelSpec& spec,
                                 double lambda) {
    eval_data.validate();
    spec.validate(centers.rows());
    if (alpha.rows() != centers.rows() || alpha.cols() != eval_data.target_dim())
        throw input_error("objective_value: weight shape mismatch");
    if (lambda < 0.0) throw input_error("objective_value: negative lambda");

    const Matrix E = eval_matrix(centers, spec, eval_data.points);
    const double loss = (eval_data.targets - E * alpha).squaredNorm();
    double reg = 0.0;
    if (lambda > 0.0) {
        const Matrix K = gram_l2(centers, spec);
        for (Index c = 0; c < alpha.cols(); ++c) {
            const Vector a = alpha.col(c);
            reg += a.dot(K * a);
        }
    }
    return loss + lambda * reg;
}

/// The common case: data points serve as both centers and loss points.
inline double objective_value(const Dataset& data, const Matrix& alpha,
                              const KernelSpec& spec, double lambda) {
    return objective_value_at(data.points, data, alpha, spec, lambda);
}

struct SigmaStepResult {
    KernelSpec spec;
    double objective = 0.0;
    double initial_objective = 0.0;
    bool budget_exhausted = false;
};

/// Width step: minimizes the regularized loss over widths with the weights
/// held fixed. Never returns widths worse than spec_init.
inline SigmaStepResult sigma_step(const Matrix& centers, const Dataset& eval_data,
                                  const Matrix& alpha, const KernelSpec& spec_init,
                                  double lambda, const SigmaOptConfig& opt) {
    if (!(lambda > 0.0)) throw input_error("sigma_step: lambda must be positive");
    auto objective = [&](const KernelSpec& spec) {
        return objective_value_at(centers, eval_data, alpha, spec, lambda);
    };
    WidthOptResult r = optimize_widths(objective, spec_init, opt);
    return {r.spec, r.objective, r.initial_objective, r.budget_exhausted};
}

/// Alternating optimization of weights and widths: at iteration s, an
/// alpha_step on `train` under the current widths, then a sigma_step on
/// `sigma_data` under the new weights. With sigma_data == train and exact
/// alpha steps the recorded objective is non-increasing.
inline std::pair<KernelModel, AdaptTrace> alternate(const Dataset& train,
                                                    const Dataset& sigma_data,
                                                    double lambda, int iterations,
                                                    const SigmaOptConfig& opt,
                                                    const KernelSpec& spec_init,
                                                    AlphaMode alpha_mode = AlphaMode::Exact,
                                                    const Dataset* trace_test = nullptr) {
    train.validate();
    sigma_data.validate();
    spec_init.validate(train.size());
    if (iterations < 1) throw input_error("alternate: need at least one iteration");
    if (!(lambda > 0.0)) throw input_error("alternate: lambda must be positive");

    KernelModel model;
    model.centers = train.points;
    model.spec = spec_init;
    model.lambda_used = lambda;
    model.flavor = ModelFlavor::L2Adaptive;

    AdaptTrace trace;
    Matrix alpha;
    for (int s = 1; s <= iterations; ++s) {
        try {
            alpha = alpha_step(train, model.spec, lambda, alpha_mode);
            SigmaStepResult step =
                sigma_step(train.points, sigma_data, alpha, model.spec, lambda, opt);
            model.spec = step.spec;
            model.weights = alpha;

            AdaptIterationRecord rec;
            rec.iteration = s;
            rec.objective = objective_value(train, alpha, model.spec, lambda);
            rec.width_min = model.spec.widths.minCoeff();
            rec.width_max = model.spec.widths.maxCoeff();
            rec.sigma_budget_exhausted = step.budget_exhausted;
            double sup = 0.0;
            const Matrix pred = predict_matrix(model, train.points);
            for (Index i = 0; i < train.size(); ++i)
                sup = std::max(sup,
                               (pred.row(i) - train.targets.row(i)).cwiseAbs().maxCoeff());
            rec.train_sup = sup;
            if (trace_test) {
                const Matrix tp = predict_matrix(model, trace_test->points);
                double tsup = 0.0;
                for (Index i = 0; i < trace_test->size(); ++i)
                    tsup = std::max(
                        tsup, (tp.row(i) - trace_test->targets.row(i)).cwiseAbs().maxCoeff());
                rec.test_sup = tsup;
            }
            trace.records.push_back(rec);
        } catch (const numerical_error& e) {
            if (trace.records.empty()) throw;  // nothing salvageable
            trace.completed = false;
            trace.failure_reason = e.what();
            break;
        }
    }
    return {model, trace};
}

}  // namespace akl

#endif
