#ifndef AKL_NADARAYA_HPP
#define AKL_NADARAYA_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "akl/kernels.hpp"
#include "akl/width_opt.hpp"

namespace akl {

enum class ScalingMode { FixedWidth, SelfScaled };

/// Nadaraya-Watson estimator. k == kAllNeighbors sums over the full sample;
/// SelfScaled ignores the spec widths and degenerates to the arithmetic mean
/// of the k nearest targets.
struct NwEstimator {
    Dataset data;
    KernelSpec spec;
    Index k = kAllNeighbors;
    ScalingMode scaling = ScalingMode::FixedWidth;

    static constexpr Index kAllNeighbors = -1;

    Index effective_k() const { return k == kAllNeighbors ? data.size() : k; }

    void validate() const {
        data.validate();
        spec.validate(data.size());
        if (spec.n != data.dim()) throw input_error("nw: spec/data dimension mismatch");
        Index kk = effective_k();
        if (kk < 1 || kk > data.size()) throw input_error("nw: k out of range");
    }
};

/// Indices of the k nearest points to x by Euclidean distance,
/// ordered by distance; ties broken by ascending index.
inline std::vector<Index> knn_indices(const Matrix& points, const Vector& x, Index k) {
    const Index m = points.rows();
    if (k < 1 || k > m) throw input_error("knn_indices: k out of range");
    if (points.cols() != x.size()) throw input_error("knn_indices: dimension mismatch");
    std::vector<std::pair<double, Index>> by_dist(m);
    for (Index i = 0; i < m; ++i)
        by_dist[i] = {(points.row(i).transpose() - x).squaredNorm(), i};
    std::partial_sort(by_dist.begin(), by_dist.begin() + k, by_dist.end());
    std::vector<Index> idx(k);
    for (Index i = 0; i < k; ++i) idx[i] = by_dist[i].second;
    return idx;
}

namespace nw_detail {

/// Kernel weight of sample i at query x. Normalization constants cancel in
/// the NW ratio when the width is common, so the bare exponential is used
/// then; per-point widths keep the normalized density (it does not cancel).
inline double weight(const NwEstimator& est, Index i, const Vector& x) {
    if (est.spec.mode == WidthMode::Common) {
        const double s = est.spec.widths(0, 0);
        const double d2 = (est.data.points.row(i).transpose() - x).squaredNorm();
        const double e = -d2 / (2.0 * s * s);
        return e < detail::kExpFloor ? 0.0 : std::exp(e);
    }
    return kernel_eval(Vector(est.data.points.row(i)), est.spec.width_vector(i), x);
}

/// Weighted average over the given sample indices, with the nearest-neighbor
/// fallback when the denominator underflows.
inline Vector weighted_average(const NwEstimator& est, const std::vector<Index>& idx,
                               const Vector& x) {
    Vector num = Vector::Zero(est.data.target_dim());
    double den = 0.0;
    for (Index i : idx) {
        const double w = weight(est, i, x);
        num += w * est.data.targets.row(i).transpose();
        den += w;
    }
    if (den < 1e-300) {
        // 0/0 far from the data: the natural limit is the nearest neighbor.
        Index nn = knn_indices(est.data.points, x, 1)[0];
        return est.data.targets.row(nn).transpose();
    }
    return num / den;
}

}  // namespace nw_detail

/// Full-sample NW prediction (k = all).
inline Vector nw_predict(const NwEstimator& est, const Vector& x) {
    est.validate();
    if (est.effective_k() != est.data.size())
        throw input_error("nw_predict: requires k = all; use nw_knn_predict");
    if (x.size() != est.data.dim()) throw input_error("nw_predict: dimension mismatch");
    std::vector<Index> all(est.data.size());
    for (Index i = 0; i < est.data.size(); ++i) all[i] = i;
    return nw_detail::weighted_average(est, all, x);
}

/// k-nearest-neighbor NW prediction; SelfScaled returns the arithmetic mean
/// of the k nearest targets.
inline Vector nw_knn_predict(const NwEstimator& est, const Vector& x) {
    est.validate();
    if (x.size() != est.data.dim()) throw input_error("nw_knn_predict: dimension mismatch");
    std::vector<Index> idx = knn_indices(est.data.points, x, est.effective_k());
    if (est.scaling == ScalingMode::SelfScaled) {
        Vector mean = Vector::Zero(est.data.target_dim());
        for (Index i : idx) mean += est.data.targets.row(i).transpose();
        return mean / static_cast<double>(idx.size());
    }
    // Summing in index order keeps k = m numerically identical to nw_predict.
    std::sort(idx.begin(), idx.end());
    return nw_detail::weighted_average(est, idx, x);
}

struct NwFitResult {
    KernelSpec spec;  // PerPointAnisotropic
    double objective = 0.0;
    double initial_objective = 0.0;
    bool budget_exhausted = false;
};

/// Fits per-point per-dimension widths of the generalized NW estimator by
/// minimizing the sum of squared prediction errors on a validation sample.
inline NwFitResult nw_fit_widths(const Dataset& train, const Dataset& validation,
                                 const KernelSpec& init, const SigmaOptConfig& opt) {
    train.validate();
    validation.validate();
    init.validate(train.size());
    if (validation.dim() != train.dim())
        throw input_error("nw_fit_widths: train/validation dimension mismatch");

    // Expand whatever the initial mode is to the full anisotropic shape.
    Matrix w0(train.size(), train.dim());
    for (Index i = 0; i < train.size(); ++i) w0.row(i) = init.width_vector(i).transpose();
    KernelSpec start =
        KernelSpec::anisotropic(train.dim(), w0, init.sigma_min, init.sigma_max);

    auto objective = [&](const KernelSpec& spec) {
        NwEstimator est{train, spec, NwEstimator::kAllNeighbors, ScalingMode::FixedWidth};
        double sse = 0.0;
        for (Index j = 0; j < validation.size(); ++j) {
            Vector err = nw_predict(est, Vector(validation.points.row(j))) -
                         validation.targets.row(j).transpose();
            sse += err.squaredNorm();
        }
        return sse;
    };

    WidthOptResult r = optimize_widths(objective, start, opt);
    return {r.spec, r.objective, r.initial_objective, r.budget_exhausted};
}

}  // namespace akl

#endif
