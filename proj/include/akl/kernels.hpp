#ifndef AKL_KERNELS_HPP
#define AKL_KERNELS_HPP

#include <cmath>

#include "akl/types.hpp"

namespace akl {

namespace detail {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)
constexpr double kExpFloor = -745.0;  // below this exp() underflows to 0 in double
}  // namespace detail

/// Normalized Gaussian density with per-dimension widths:
///   prod_l (2*pi)^{-1/2} w_l^{-1} exp(-(x_l - c_l)^2 / (2 w_l^2)).
/// Returns exact 0 when the exponent underflows double precision.
inline double kernel_eval(const Vector& center, const Vector& widths, const Vector& x) {
    const Index n = center.size();
    if (x.size() != n || widths.size() != n)
        throw input_error("kernel_eval: dimension mismatch");
    double log_norm = 0.0;
    double quad = 0.0;
    for (Index l = 0; l < n; ++l) {
        const double w = widths(l);
        if (!(w > 0.0)) throw input_error("kernel_eval: nonpositive width");
        const double d = x(l) - center(l);
        log_norm -= detail::kLogSqrt2Pi + std::log(w);
        quad -= d * d / (2.0 * w * w);
    }
    const double e = log_norm + quad;
    if (e < detail::kExpFloor) return 0.0;
    return std::exp(e);
}

/// Isotropic overload.
inline double kernel_eval(const Vector& center, double sigma, const Vector& x) {
    return kernel_eval(center, Vector::Constant(center.size(), sigma), x);
}

/// L2 inner product of two normalized Gaussians with per-dimension widths:
///   prod_l (2*pi)^{-1/2} (w_il^2 + w_jl^2)^{-1/2}
///     * exp(-sum_l (c_il - c_jl)^2 / (2 (w_il^2 + w_jl^2))).
/// Reduces two widths to one effective width per dimension; symmetric in
/// its two (center, width) arguments.
inline double l2_inner(const Vector& center_i, const Vector& widths_i,
                       const Vector& center_j, const Vector& widths_j) {
    const Index n = center_i.size();
    if (center_j.size() != n || widths_i.size() != n || widths_j.size() != n)
        throw input_error("l2_inner: dimension mismatch");
    double log_norm = 0.0;
    double quad = 0.0;
    for (Index l = 0; l < n; ++l) {
        const double wi = widths_i(l), wj = widths_j(l);
        if (!(wi > 0.0) || !(wj > 0.0)) throw input_error("l2_inner: nonpositive width");
        const double s2 = wi * wi + wj * wj;
        const double d = center_i(l) - center_j(l);
        log_norm -= detail::kLogSqrt2Pi + 0.5 * std::log(s2);
        quad -= d * d / (2.0 * s2);
    }
    const double e = log_norm + quad;
    if (e < detail::kExpFloor) return 0.0;
    return std::exp(e);
}

/// Isotropic overload.
inline double l2_inner(const Vector& center_i, double sigma_i,
                       const Vector& center_j, double sigma_j) {
    const Index n = center_i.size();
    return l2_inner(center_i, Vector::Constant(n, sigma_i),
                    center_j, Vector::Constant(n, sigma_j));
}

/// Pairwise L2 Gram matrix K_ij = <k_i, k_j>. The upper triangle is
/// computed and mirrored, so K == K^T holds bitwise.
inline Matrix gram_l2(const Matrix& centers, const KernelSpec& spec) {
    const Index m = centers.rows();
    if (m < 1) throw input_error("gram_l2: need at least one center");
    if (centers.cols() != spec.n) throw input_error("gram_l2: dimension mismatch");
    spec.validate(m);
    Matrix K(m, m);
    parallel_for(m, [&](Index i) {
        const Vector ci = centers.row(i);
        const Vector wi = spec.width_vector(i);
        for (Index j = i; j < m; ++j)
            K(i, j) = l2_inner(ci, wi, Vector(centers.row(j)), spec.width_vector(j));
    });
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < i; ++j) K(i, j) = K(j, i);
    return K;
}

/// Evaluation matrix E_ij = k_{sigma_j}(center_j, query_i); p x m.
/// With query_points == centers this is the data-fit matrix; otherwise the
/// prediction matrix.
inline Matrix eval_matrix(const Matrix& centers, const KernelSpec& spec,
                          const Matrix& query_points) {
    const Index m = centers.rows();
    const Index p = query_points.rows();
    if (centers.cols() != spec.n || query_points.cols() != spec.n)
        throw input_error("eval_matrix: dimension mismatch");
    spec.validate(m);
    Matrix E(p, m);
    parallel_for(p, [&](Index i) {
        const Vector q = query_points.row(i);
        for (Index j = 0; j < m; ++j)
            E(i, j) = kernel_eval(Vector(centers.row(j)), spec.width_vector(j), q);
    });
    return E;
}

}  // namespace akl

#endif
