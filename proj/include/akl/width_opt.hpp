#ifndef AKL_WIDTH_OPT_HPP
#define AKL_WIDTH_OPT_HPP

#include <cmath>
#include <functional>

#include "akl/optim.hpp"
#include "akl/types.hpp"

namespace akl {

enum class SigmaMethod { GoldenSectionCommon, SimplexPerPoint, FdGradientDescent };

/// Settings for width (sigma) optimization. The underlying problem is
/// non-convex; all methods are local searches on log-widths by default.
struct SigmaOptConfig {
    SigmaMethod method = SigmaMethod::SimplexPerPoint;
    long max_evaluations = 0;  // 0 -> 200 * (number of widths)
    double tolerance = 1e-10;
    bool log_parametrization = true;
    double sigma_min = 0.0;  // 0 -> derive from data (1e-3 * diameter)
    double sigma_max = 0.0;  // 0 -> derive from data (diameter)

    void validate() const {
        if (!(tolerance > 0.0)) throw input_error("sigma opt: tolerance must be positive");
        if (max_evaluations < 0) throw input_error("sigma opt: negative budget");
    }
};

struct WidthOptResult {
    KernelSpec spec;
    double objective = 0.0;
    double initial_objective = 0.0;
    bool budget_exhausted = false;
};

namespace width_detail {

inline double to_param(double sigma, bool log_scale) {
    return log_scale ? std::log(sigma) : sigma;
}

inline double from_param(double theta, bool log_scale, double lo, double hi) {
    double s = log_scale ? std::exp(theta) : theta;
    return std::clamp(s, lo, hi);
}

inline Vector flatten(const KernelSpec& spec, bool log_scale) {
    Vector theta(spec.widths.size());
    Index k = 0;
    for (Index i = 0; i < spec.widths.rows(); ++i)
        for (Index j = 0; j < spec.widths.cols(); ++j)
            theta(k++) = to_param(spec.widths(i, j), log_scale);
    return theta;
}

inline KernelSpec unflatten(const KernelSpec& like, const Vector& theta, bool log_scale) {
    KernelSpec spec = like;
    Index k = 0;
    for (Index i = 0; i < spec.widths.rows(); ++i)
        for (Index j = 0; j < spec.widths.cols(); ++j)
            spec.widths(i, j) =
                from_param(theta(k++), log_scale, like.sigma_min, like.sigma_max);
    return spec;
}

}  // namespace width_detail

/// Minimizes `objective` over the widths of `init`, keeping mode, bounds and
/// shape fixed. Out-of-bounds candidates are clamped before evaluation.
/// Returns `init` unchanged when no strict improvement is found, so callers
/// get a descent guarantee for free.
inline WidthOptResult optimize_widths(const std::function<double(const KernelSpec&)>& objective,
                                      const KernelSpec& init, const SigmaOptConfig& opt) {
    opt.validate();
    const bool log_scale = opt.log_parametrization;
    const Index num_widths = init.widths.size();
    const long budget =
        opt.max_evaluations > 0 ? opt.max_evaluations : 200 * static_cast<long>(num_widths);

    WidthOptResult result;
    result.spec = init;
    result.initial_objective = objective(init);
    result.objective = result.initial_objective;
    if (budget == 0) return result;

    OptResult inner;
    if (opt.method == SigmaMethod::GoldenSectionCommon) {
        if (init.mode != WidthMode::Common)
            throw input_error("optimize_widths: golden section requires a common width");
        auto f = [&](double theta) {
            KernelSpec s = init;
            s.widths(0, 0) =
                width_detail::from_param(theta, log_scale, init.sigma_min, init.sigma_max);
            return objective(s);
        };
        const double lo = width_detail::to_param(init.sigma_min, log_scale);
        const double hi = width_detail::to_param(init.sigma_max, log_scale);
        inner = golden_section(f, lo, hi, opt.tolerance, budget);
    } else {
        auto f = [&](const Vector& theta) {
            return objective(width_detail::unflatten(init, theta, log_scale));
        };
        const Vector theta0 = width_detail::flatten(init, log_scale);
        if (opt.method == SigmaMethod::SimplexPerPoint) {
            const double step = log_scale ? 0.4 : 0.25 * init.widths.mean();
            inner = nelder_mead(f, theta0, step, opt.tolerance, budget);
        } else {
            inner = fd_gradient_descent(f, theta0, opt.tolerance, budget);
        }
    }

    result.budget_exhausted = inner.budget_exhausted;
    if (inner.fx < result.initial_objective) {
        result.objective = inner.fx;
        if (opt.method == SigmaMethod::GoldenSectionCommon) {
            result.spec.widths(0, 0) =
                width_detail::from_param(inner.x(0), log_scale, init.sigma_min, init.sigma_max);
        } else {
            result.spec = width_detail::unflatten(init, inner.x, log_scale);
        }
    }
    return result;
}

}  // namespace akl

#endif
