#ifndef AKL_RIDGE_HPP
#define AKL_RIDGE_HPP

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "akl/kernels.hpp"

namespace akl {

enum class ModelFlavor { RkhsPlain, RkhsMeanScaled, L2Adaptive, MonteCarlo };

inline std::string to_string(ModelFlavor f) {
    switch (f) {
        case ModelFlavor::RkhsPlain: return "rkhs_plain";
        case ModelFlavor::RkhsMeanScaled: return "rkhs_mean_scaled";
        case ModelFlavor::L2Adaptive: return "l2_adaptive";
        case ModelFlavor::MonteCarlo: return "monte_carlo";
    }
    return "?";
}

inline ModelFlavor flavor_from_string(const std::string& s) {
    if (s == "rkhs_plain") return ModelFlavor::RkhsPlain;
    if (s == "rkhs_mean_scaled") return ModelFlavor::RkhsMeanScaled;
    if (s == "l2_adaptive") return ModelFlavor::L2Adaptive;
    if (s == "monte_carlo") return ModelFlavor::MonteCarlo;
    throw input_error("unknown model flavor: " + s);
}

/// A frozen, evaluable kernel regression function: centers, widths, weights
/// and the regularization it was fitted with.
struct KernelModel {
    Matrix centers;  // m x n
    KernelSpec spec;
    Matrix weights;  // m x l
    double lambda_used = 0.0;
    ModelFlavor flavor = ModelFlavor::RkhsPlain;

    Index size() const { return centers.rows(); }
    Index dim() const { return centers.cols(); }
    Index target_dim() const { return weights.cols(); }

    void validate() const {
        if (weights.rows() != centers.rows())
            throw input_error("model: weight/center row count mismatch");
        if (!weights.allFinite() || !centers.allFinite())
            throw input_error("model: non-finite entry");
        spec.validate(centers.rows());
        if (spec.n != centers.cols()) throw input_error("model: spec dimension mismatch");
    }
};

enum class RkhsVariant { Plain, MeanScaled };

struct FitConfig {
    double lambda = 0.0;
    RkhsVariant variant = RkhsVariant::Plain;
    // Jitter schedule, relative to trace(A)/m.
    double jitter_start = 1e-12;
    double jitter_growth = 10.0;
    double jitter_max = 1e-6;

    void validate() const {
        if (lambda < 0.0) throw input_error("fit: lambda must be nonnegative");
        if (!(jitter_start > 0.0) || !(jitter_growth > 1.0) || jitter_max < jitter_start)
            throw input_error("fit: invalid jitter schedule");
    }
};

/// Solves the symmetric positive (semi)definite system A X = B by Cholesky,
/// escalating a relative diagonal jitter until the factorization succeeds.
/// One step of iterative refinement tightens the residual.
inline Matrix solve_spd(const Matrix& A, const Matrix& B, const FitConfig& cfg) {
    const Index m = A.rows();
    const double scale = std::max(A.trace() / static_cast<double>(m), 1e-300);
    double jitter = 0.0;
    double step = cfg.jitter_start;
    while (true) {
        Matrix Aj = A;
        if (jitter > 0.0) Aj.diagonal().array() += jitter * scale;
        Eigen::LLT<Matrix> llt(Aj);
        if (llt.info() == Eigen::Success) {
            Matrix X = llt.solve(B);
            X += llt.solve(B - Aj * X);
            if (X.allFinite()) return X;
        }
        if (jitter >= cfg.jitter_max) {
            Eigen::JacobiSVD<Matrix> svd(A);
            const double smax = svd.singularValues()(0);
            const double smin = svd.singularValues()(svd.singularValues().size() - 1);
            std::ostringstream msg;
            msg << "solve_spd: factorization failed at maximal jitter; condition estimate "
                << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity());
            throw numerical_error(msg.str());
        }
        jitter = jitter == 0.0 ? step : jitter * cfg.jitter_growth;
        jitter = std::min(jitter, cfg.jitter_max);
    }
}

namespace ridge_detail {

/// Kernel matrix of RKHS regression: plain kernel evaluations, shared with
/// the L2 machinery through kernel_eval (normalized density).
inline Matrix rkhs_kernel_matrix(const Matrix& points, const KernelSpec& spec) {
    return eval_matrix(points, spec, points);
}

inline Matrix system_matrix(const Matrix& K, double lambda, RkhsVariant variant) {
    const Index m = K.rows();
    Matrix A = variant == RkhsVariant::MeanScaled ? Matrix(K / static_cast<double>(m))
                                                  : K;
    A.diagonal().array() += lambda;
    return A;
}

}  // namespace ridge_detail

/// Closed-form kernel ridge regression with a fixed common-width kernel.
/// Plain: alpha = (K + lambda I)^{-1} y. MeanScaled: alpha =
/// (K/m + lambda I)^{-1} y with predictions scaled by 1/m.
inline KernelModel fit_rkhs(const Dataset& data, const KernelSpec& spec,
                            const FitConfig& cfg) {
    data.validate();
    cfg.validate();
    if (spec.mode != WidthMode::Common)
        throw input_error("fit_rkhs: requires a common-width kernel");
    spec.validate(data.size());
    if (spec.n != data.dim()) throw input_error("fit_rkhs: dimension mismatch");

    const Matrix K = ridge_detail::rkhs_kernel_matrix(data.points, spec);
    const Matrix A = ridge_detail::system_matrix(K, cfg.lambda, cfg.variant);
    KernelModel model;
    model.centers = data.points;
    model.spec = spec;
    model.weights = solve_spd(A, data.targets, cfg);
    model.lambda_used = cfg.lambda;
    model.flavor = cfg.variant == RkhsVariant::Plain ? ModelFlavor::RkhsPlain
                                                     : ModelFlavor::RkhsMeanScaled;
    return model;
}

/// Closed-form optimum of the ridge objective:
///   plain:       lambda * y^T (K + lambda I)^{-1} y
///   mean-scaled: lambda/m * y^T (K/m + lambda I)^{-1} y
/// summed over target columns.
inline double rkhs_optimal_value(const Dataset& data, const Matrix& K, const FitConfig& cfg) {
    data.validate();
    cfg.validate();
    if (K.rows() != data.size() || K.cols() != data.size())
        throw input_error("rkhs_optimal_value: kernel matrix shape mismatch");
    if (cfg.lambda == 0.0) return 0.0;
    const Matrix A = ridge_detail::system_matrix(K, cfg.lambda, cfg.variant);
    const Matrix alpha = solve_spd(A, data.targets, cfg);
    double value = cfg.lambda * (data.targets.array() * alpha.array()).sum();
    if (cfg.variant == RkhsVariant::MeanScaled) value /= static_cast<double>(data.size());
    return value;
}

/// f(x) = sum_i alpha_i k_i(center_i, x), with the mean-scaled flavor's 1/m
/// applied here. The monte_carlo flavor folds 1/m into its weights already.
inline Vector predict_model(const KernelModel& model, const Vector& x) {
    if (x.size() != model.dim()) throw input_error("predict_model: dimension mismatch");
    Vector out = Vector::Zero(model.target_dim());
    for (Index i = 0; i < model.size(); ++i) {
        const double k =
            kernel_eval(Vector(model.centers.row(i)), model.spec.width_vector(i), x);
        out += k * model.weights.row(i).transpose();
    }
    if (model.flavor == ModelFlavor::RkhsMeanScaled)
        out /= static_cast<double>(model.size());
    return out;
}

/// Predictions at many points; p x l.
inline Matrix predict_matrix(const KernelModel& model, const Matrix& points) {
    Matrix out(points.rows(), model.target_dim());
    parallel_for(points.rows(), [&](Index i) {
        out.row(i) = predict_model(model, Vector(points.row(i))).transpose();
    });
    return out;
}

/// L2 norm of the model function, per target column: sqrt(alpha^T K alpha)
/// with the analytic L2 Gram matrix.
inline Vector model_l2_norm(const KernelModel& model) {
    model.validate();
    const Matrix K = gram_l2(model.centers, model.spec);
    Vector norms(model.target_dim());
    for (Index c = 0; c < model.target_dim(); ++c) {
        const Vector a = model.weights.col(c);
        norms(c) = std::sqrt(std::max(0.0, a.dot(K * a)));
    }
    return norms;
}

/// Monte-Carlo mollifier estimate: weights y_i / m at common width sigma.
inline KernelModel mc_estimate(const Dataset& data, double sigma) {
    data.validate();
    if (!(sigma > 0.0)) throw input_error("mc_estimate: width must be positive");
    KernelModel model;
    model.centers = data.points;
    model.spec = KernelSpec::common(data.dim(), sigma);
    model.weights = data.targets / static_cast<double>(data.size());
    model.lambda_used = 0.0;
    model.flavor = ModelFlavor::MonteCarlo;
    return model;
}

}  // namespace akl

#endif
