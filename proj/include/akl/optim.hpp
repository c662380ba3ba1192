#ifndef AKL_OPTIM_HPP
#define AKL_OPTIM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "akl/common.hpp"

namespace akl {

struct OptResult {
    Vector x;
    double fx = 0.0;
    long evaluations = 0;
    bool budget_exhausted = false;
};

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<double(const Vector&)>;

/// Golden-section search for a minimum of f on [lo, hi].
inline OptResult golden_section(const ScalarFn& f, double lo, double hi, double tol,
                                long max_evals) {
    if (!(lo < hi)) throw input_error("golden_section: need lo < hi");
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    long evals = 0;
    auto eval = [&](double x) {
        ++evals;
        return f(x);
    };
    double f1 = eval(x1), f2 = eval(x2);
    while (b - a > tol && evals < max_evals) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        }
    }
    OptResult r;
    r.x = Vector::Constant(1, f1 <= f2 ? x1 : x2);
    r.fx = std::min(f1, f2);
    r.evaluations = evals;
    r.budget_exhausted = (b - a > tol);
    return r;
}

/// Nelder-Mead direct search. `step` sets the initial simplex spread per
/// coordinate. Stops when the simplex f-spread falls below tol or the
/// evaluation budget runs out; always reports the best vertex seen.
inline OptResult nelder_mead(const VectorFn& f, const Vector& x0, double step, double tol,
                             long max_evals) {
    const Index n = x0.size();
    if (n < 1) throw input_error("nelder_mead: empty start point");
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;

    long evals = 0;
    auto eval = [&](const Vector& x) {
        ++evals;
        return f(x);
    };

    std::vector<Vector> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    fs[0] = max_evals > 0 ? eval(x0) : f(x0);
    for (Index i = 0; i < n && evals < max_evals; ++i) {
        xs[i + 1](i) += step;
        fs[i + 1] = eval(xs[i + 1]);
    }
    // If the budget died mid-initialization, fall back to the start point.
    if (evals >= max_evals) {
        OptResult r;
        r.x = x0;
        r.fx = fs[0];
        r.evaluations = evals;
        r.budget_exhausted = true;
        return r;
    }

    std::vector<int> order(n + 1);
    auto sort_order = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    };

    while (evals < max_evals) {
        sort_order();
        const int best = order[0], worst = order[n], second_worst = order[n - 1];
        if (fs[worst] - fs[best] <= tol) break;

        Vector centroid = Vector::Zero(n);
        for (int k = 0; k <= static_cast<int>(n); ++k)
            if (k != worst) centroid += xs[k];
        centroid /= static_cast<double>(n);

        Vector xr = centroid + alpha * (centroid - xs[worst]);
        double fr = eval(xr);
        if (fr < fs[best]) {
            Vector xe = centroid + gamma * (xr - centroid);
            double fe = evals < max_evals ? eval(xe) : fr;
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second_worst]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            Vector xc = centroid + rho * (xs[worst] - centroid);
            double fc = evals < max_evals ? eval(xc) : fr;
            if (fc < fs[worst]) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int k = 0; k <= static_cast<int>(n) && evals < max_evals; ++k) {
                    if (k == best) continue;
                    xs[k] = xs[best] + shrink * (xs[k] - xs[best]);
                    fs[k] = eval(xs[k]);
                }
            }
        }
    }

    sort_order();
    OptResult r;
    r.x = xs[order[0]];
    r.fx = fs[order[0]];
    r.evaluations = evals;
    r.budget_exhausted = evals >= max_evals && fs[order[n]] - fs[order[0]] > tol;
    return r;
}

/// Finite-difference gradient descent with backtracking line search.
inline OptResult fd_gradient_descent(const VectorFn& f, const Vector& x0, double tol,
                                     long max_evals) {
    const Index n = x0.size();
    const double h = 1e-6;
    long evals = 0;
    auto eval = [&](const Vector& x) {
        ++evals;
        return f(x);
    };

    Vector x = x0;
    double fx = eval(x);
    while (evals + 2 * n < max_evals) {
        Vector g(n);
        for (Index i = 0; i < n; ++i) {
            Vector xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            g(i) = (eval(xp) - eval(xm)) / (2.0 * h);
        }
        const double gnorm = g.norm();
        if (gnorm < tol) break;
        double t = 1.0 / std::max(1.0, gnorm);
        bool moved = false;
        for (int bt = 0; bt < 30 && evals < max_evals; ++bt) {
            Vector xn = x - t * g;
            double fn = eval(xn);
            if (fn < fx - 1e-4 * t * gnorm * gnorm) {
                x = xn;
                fx = fn;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }

    OptResult r;
    r.x = x;
    r.fx = fx;
    r.evaluations = evals;
    r.budget_exhausted = evals + 2 * n >= max_evals;
    return r;
}

}  // namespace akl

#endif
