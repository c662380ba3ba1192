#ifndef AKL_QUADRATURE_HPP
#define AKL_QUADRATURE_HPP

#include <cmath>
#include <functional>

#include "akl/kernels.hpp"

namespace akl {

namespace quad_detail {

struct Budget {
    long remaining = 1'000'000;
    void charge(long k) {
        remaining -= k;
        if (remaining < 0)
            throw numerical_error("quadrature: evaluation budget exhausted before convergence");
    }
};

/// Adaptive Simpson on [a, b]. `eps` is an absolute tolerance for the
/// interval; it is split in half across subintervals.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double eps, int depth, Budget& budget) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    budget.charge(2);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0)
        throw numerical_error("quadrature: max refinement depth reached");
    if (std::fabs(delta) <= 15.0 * eps)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, budget) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, budget);
}

template <typename F>
double simpson(const F& f, double a, double b, double eps, Budget& budget) {
    budget.charge(3);
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, eps, 60, budget);
}

}  // namespace quad_detail

/// Adaptive-Simpson integral of f over [a, b] to roughly absolute accuracy eps.
inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           double eps) {
    quad_detail::Budget budget;
    return quad_detail::simpson(f, a, b, eps, budget);
}

/// Numerical oracle for the L2 inner product of two Gaussian kernels,
/// n in {1, 2}, to relative accuracy tol. Independent of the closed form in
/// l2_inner: only the integration window uses the product-density location
/// (precision-weighted mean, pooled width); the value comes from Simpson.
inline double l2_inner_quadrature(const Vector& center_i, const Vector& widths_i,
                                  const Vector& center_j, const Vector& widths_j,
                                  double tol) {
    const Index n = center_i.size();
    if (n != 1 && n != 2)
        throw input_error("l2_inner_quadrature: oracle supports n in {1, 2}");
    if (center_j.size() != n || widths_i.size() != n || widths_j.size() != n)
        throw input_error("l2_inner_quadrature: dimension mismatch");
    if (!(tol > 0.0)) throw input_error("l2_inner_quadrature: tol must be positive");

    Vector lo(n), hi(n), peak(n);
    for (Index l = 0; l < n; ++l) {
        const double vi = widths_i(l) * widths_i(l), vj = widths_j(l) * widths_j(l);
        const double mu = (center_i(l) * vj + center_j(l) * vi) / (vi + vj);
        const double pooled = widths_i(l) * widths_j(l) / std::sqrt(vi + vj);
        peak(l) = mu;
        lo(l) = mu - 12.0 * pooled;
        hi(l) = mu + 12.0 * pooled;
    }

    auto product = [&](const Vector& x) {
        return kernel_eval(center_i, widths_i, x) * kernel_eval(center_j, widths_j, x);
    };

    // Scale the absolute Simpson tolerance by a cheap magnitude estimate so
    // tol acts as a relative accuracy even for tiny overlaps.
    double scale = product(peak);
    for (Index l = 0; l < n; ++l) scale *= (hi(l) - lo(l));
    if (scale <= 0.0) scale = 1e-300;

    quad_detail::Budget budget;
    if (n == 1) {
        auto f = [&](double x) {
            Vector v(1);
            v(0) = x;
            return product(v);
        };
        return quad_detail::simpson(f, lo(0), hi(0), tol * scale, budget);
    }
    // n == 2: nested adaptive integration, inner pass at a tighter tolerance.
    auto outer = [&](double x0) {
        auto inner = [&](double x1) {
            Vector v(2);
            v(0) = x0;
            v(1) = x1;
            return product(v);
        };
        quad_detail::Budget inner_budget;
        return quad_detail::simpson(inner, lo(1), hi(1), 0.05 * tol * scale / (hi(0) - lo(0)),
                                    inner_budget);
    };
    return quad_detail::simpson(outer, lo(0), hi(0), tol * scale, budget);
}

inline double l2_inner_quadrature(const Vector& center_i, double sigma_i,
                                  const Vector& center_j, double sigma_j, double tol) {
    const Index n = center_i.size();
    return l2_inner_quadrature(center_i, Vector::Constant(n, sigma_i), center_j,
                               Vector::Constant(n, sigma_j), tol);
}

}  // namespace akl

#endif
