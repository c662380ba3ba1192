// Acceptance checks: one line per criterion, nonzero exit on any failure.
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "akl/akl.hpp"

using namespace akl;

namespace {

int failures = 0;

void report(int number, const std::string& what, bool ok, const std::string& detail = "") {
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// 1. Analytic L2 inner products against adaptive quadrature.
void criterion_gram_oracle() {
    Rng rng(101);
    bool ok = true;
    double worst = 0.0;
    for (int t = 0; t < 50 && ok; ++t) {
        const int n = 1 + (t % 2);
        Vector xi(n), xj(n);
        for (int l = 0; l < n; ++l) {
            xi(l) = rng.uniform(-3, 3);
            xj(l) = rng.uniform(-3, 3);
        }
        const double si = rng.uniform(0.05, 2.5), sj = rng.uniform(0.05, 2.5);
        const double analytic = l2_inner(xi, si, xj, sj);
        const double numeric = l2_inner_quadrature(xi, si, xj, sj, 1e-9);
        const double rel = std::fabs(analytic - numeric) / analytic;
        worst = std::max(worst, rel);
        ok = rel < 1e-6;
    }
    report(1, "analytic inner products match quadrature to 1e-6 relative", ok,
           "worst relative deviation " + fmt(worst));
}

// 2. Ridge closed form: optimal value identity and lambda = 0 interpolation.
void criterion_ridge_closed_form() {
    bool ok = true;
    std::string detail;
    for (Index m : {Index(5), Index(20)}) {
        Rng rng(200 + m);
        Dataset d;
        d.points.resize(m, 2);
        d.targets.resize(m, 1);
        for (Index i = 0; i < m; ++i) {
            d.points(i, 0) = rng.uniform(-2, 2);
            d.points(i, 1) = rng.uniform(-2, 2);
            d.targets(i, 0) = rng.uniform(-1, 1);
        }
        KernelSpec spec = KernelSpec::common(2, 0.8);
        const Matrix K = eval_matrix(d.points, spec, d.points);
        const double md = static_cast<double>(m);

        for (RkhsVariant variant : {RkhsVariant::Plain, RkhsVariant::MeanScaled}) {
            FitConfig cfg;
            cfg.lambda = 0.05;
            cfg.variant = variant;
            const Vector a = fit_rkhs(d, spec, cfg).weights.col(0);
            const Vector y = d.targets.col(0);
            const double direct =
                variant == RkhsVariant::Plain
                    ? (y - K * a).squaredNorm() + cfg.lambda * a.dot(K * a)
                    : (y - K * a / md).squaredNorm() / md +
                          cfg.lambda * a.dot(K * a) / (md * md);
            const double value = rkhs_optimal_value(d, K, cfg);
            if (std::fabs(value - direct) > 1e-10 * std::fabs(direct)) {
                ok = false;
                detail = "optimal-value mismatch at m=" + std::to_string(m);
            }
        }

        FitConfig interp;  // lambda = 0
        const Vector a0 = fit_rkhs(d, spec, interp).weights.col(0);
        const double resid = (d.targets.col(0) - K * a0).lpNorm<Eigen::Infinity>();
        if (resid >= 1e-8) {
            ok = false;
            detail = "interpolation residual " + fmt(resid) + " at m=" + std::to_string(m);
        }
    }
    report(2, "ridge optimal-value identity and zero-lambda interpolation", ok, detail);
}

// 3. Exact weight step vs. an independent gradient-descent minimization.
void criterion_alpha_optimality() {
    Rng rng(103);
    bool ok = true;
    std::string detail;
    for (int t = 0; t < 3 && ok; ++t) {
        Dataset d;
        d.points.resize(10, 2);
        d.targets.resize(10, 1);
        for (Index i = 0; i < 10; ++i) {
            d.points(i, 0) = rng.uniform(-2, 2);
            d.points(i, 1) = rng.uniform(-2, 2);
            d.targets(i, 0) = rng.uniform(-1, 1);
        }
        KernelSpec spec = init_widths_knn(d.points, 4);
        const double lambda = 0.02;

        const Matrix exact = alpha_step(d, spec, lambda, AlphaMode::Exact);
        const double at_exact = objective_value(d, exact, spec, lambda);

        auto f = [&](const Vector& a) { return objective_value(d, Matrix(a), spec, lambda); };
        const OptResult oracle = fd_gradient_descent(f, Vector::Zero(10), 1e-12, 100000);
        const Matrix paper = alpha_step(d, spec, lambda, AlphaMode::PaperLiteral);
        const double at_paper = objective_value(d, paper, spec, lambda);

        if (at_exact > oracle.fx + 1e-6) {
            ok = false;
            detail = "exact " + fmt(at_exact) + " vs descent " + fmt(oracle.fx);
        } else if (at_exact > at_paper + 1e-12) {
            ok = false;
            detail = "exact " + fmt(at_exact) + " worse than literal " + fmt(at_paper);
        }
    }
    report(3, "exact weight step beats gradient descent and the literal formula", ok, detail);
}

// 4. Alternation descent on the m = 50 parametric-roots sample.
void criterion_descent() {
    ExperimentConfig cfg;
    cfg.m = 50;
    cfg.seed = 42;
    cfg.method = "adaptive_per_point";
    cfg.lambda = 0.005;
    cfg.iterations = 15;
    cfg.grid_resolution = 21;  // the grid is irrelevant here, keep it cheap
    cfg.sigma_opt.max_evaluations = 1500;
    const AdaptiveExperimentReport r = run_adaptive_experiment(cfg);

    bool ok = r.trace.completed && r.trace.records.size() == 15;
    double worst_jump = 0.0;
    for (size_t s = 1; s < r.trace.records.size(); ++s) {
        const double jump = r.trace.records[s].objective - r.trace.records[s - 1].objective;
        worst_jump = std::max(worst_jump, jump);
        if (jump > 1e-9) ok = false;
    }
    report(4, "15-iteration objective trace is non-increasing", ok,
           "largest increase " + fmt(worst_jump));
}

// 5. Nearest-neighbor smoothing accuracy band on the plus branch.
void criterion_nw_band() {
    ExperimentConfig cfg;
    cfg.m = 100;
    cfg.seed = 42;
    cfg.branch = Branch::Plus;
    cfg.ks = {3, 10};
    const NwExperimentReport r = run_nw_experiment(cfg);
    bool ok = true;
    std::string detail;
    for (const NwExperimentRow& row : r.rows) {
        detail += (detail.empty() ? "" : ", ") + std::string("k=") +
                  std::to_string(row.k) + " sup " + fmt(row.delta_sup);
        if (!(row.delta_sup >= 0.2 && row.delta_sup <= 2.0)) ok = false;
    }
    report(5, "k-NN smoothing sup error within [0.2, 2.0] for k in {3, 10}", ok, detail);
}

// 6. Common-width adaptation halves the grid error at lambda = 1e-4.
void criterion_common_width_gain() {
    ExperimentConfig cfg;
    cfg.m = 100;
    cfg.seed = 42;
    cfg.method = "adaptive_common";
    cfg.lambda = 1e-4;
    cfg.iterations = 5;
    cfg.alpha_mode = AlphaMode::PaperLiteral;  // the protocol's own weight formula
    const AdaptiveExperimentReport r = run_adaptive_experiment(cfg);
    const double ratio = r.delta_after / r.delta_before;
    report(6, "common-width adaptation gain ratio <= 0.5", ratio <= 0.5,
           fmt(r.delta_before) + " -> " + fmt(r.delta_after) + " (ratio " + fmt(ratio) + ")");
}

// 7. Per-point adaptation improves the grid error; sweep selection is sane.
void criterion_per_point_adaptation() {
    ExperimentConfig cfg;
    cfg.m = 50;
    cfg.seed = 42;
    cfg.method = "adaptive_per_point";
    cfg.lambda = 0.005;
    cfg.iterations = 15;
    cfg.alpha_mode = AlphaMode::PaperLiteral;  // the protocol's own weight formula
    cfg.sigma_opt.max_evaluations = 1500;
    const AdaptiveExperimentReport fixed = run_adaptive_experiment(cfg);
    bool ok = fixed.delta_after <= fixed.delta_before;
    std::string detail =
        "fixed lambda: " + fmt(fixed.delta_before) + " -> " + fmt(fixed.delta_after);

    cfg.lambda_grid = default_lambda_grid();
    cfg.iterations = 5;
    cfg.sigma_opt.max_evaluations = 600;
    const AdaptiveExperimentReport swept = run_adaptive_experiment(cfg);
    const SweepRow* selected = nullptr;
    const SweepRow* first = nullptr;
    const SweepRow* last = nullptr;
    for (const SweepRow& row : swept.sweep.rows) {
        if (row.failed) continue;
        if (!first) first = &row;
        last = &row;
        if (row.selected) selected = &row;
    }
    if (!selected || !first || !last) {
        ok = false;
        detail += "; sweep produced no usable rows";
    } else {
        if (selected->test_sup > first->test_sup || selected->test_sup > last->test_sup)
            ok = false;
        detail += "; selected lambda " + fmt(selected->lambda) + " test sup " +
                  fmt(selected->test_sup) + " (endpoints " + fmt(first->test_sup) + ", " +
                  fmt(last->test_sup) + ")";
    }
    report(7, "per-point adaptation improves the grid error; sweep picks a minimum", ok,
           detail);
}

// 8. Kernel-smoothing bias bound for f(x) = x with L = 1.
void criterion_mollifier_bound() {
    const double C = integrate_1d(
        [](double z) {
            return std::fabs(z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        },
        -12.0, 12.0, 1e-12);
    bool ok = std::fabs(C - std::sqrt(2.0 / M_PI)) < 1e-9;
    double worst = 0.0;
    for (double sigma : {0.1, 0.05}) {
        for (int i = 0; i <= 20 && ok; ++i) {
            const double x = -1.0 + 0.1 * i;
            auto integrand = [&](double y) {
                return y * kernel_eval(Vector::Constant(1, y), sigma,
                                       Vector::Constant(1, x));
            };
            // window clipped to the kernel's support so the adaptive rule
            // does not mistake the narrow bump for a zero integrand
            const double smoothed =
                integrate_1d(integrand, std::max(-2.0, x - 12.0 * sigma),
                             std::min(2.0, x + 12.0 * sigma), 1e-12);
            const double excess = std::fabs(x - smoothed) - sigma * C;
            worst = std::max(worst, excess);
            if (excess > 1e-6) ok = false;
        }
    }
    report(8, "smoothing bias bounded by sigma * sqrt(2/pi)", ok,
           "worst excess over the bound " + fmt(worst));
}

// 9. Randomized property suites, 100 instances each.
void criterion_property_suites() {
    bool ok = true;
    std::string detail;

    {  // smoothing predictions stay in the target range
        Rng rng(901);
        for (int t = 0; t < 100 && ok; ++t) {
            Dataset d;
            const Index m = 2 + static_cast<Index>(rng.next_u64() % 10);
            d.points.resize(m, 2);
            d.targets.resize(m, 1);
            for (Index i = 0; i < m; ++i) {
                d.points(i, 0) = rng.uniform(-2, 2);
                d.points(i, 1) = rng.uniform(-2, 2);
                d.targets(i, 0) = rng.uniform(-3, 3);
            }
            NwEstimator est{d, KernelSpec::common(2, rng.uniform(0.1, 2.0)),
                            1 + static_cast<Index>(rng.next_u64() % m)};
            Vector x(2);
            x << rng.uniform(-3, 3), rng.uniform(-3, 3);
            const double p = nw_knn_predict(est, x)(0);
            if (p < d.targets.minCoeff() - 1e-12 || p > d.targets.maxCoeff() + 1e-12) {
                ok = false;
                detail = "range bound violated";
            }
        }
    }

    {  // root identities
        Rng rng(902);
        int checked = 0;
        while (checked < 100 && ok) {
            const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
            if (!feasible(a, b)) continue;
            ++checked;
            auto [xp, xm] = quadratic_roots(a, b);
            if (std::fabs(xp + xm + a) > 1e-12 || std::fabs(xp * xm - b) > 1e-12) {
                ok = false;
                detail = "root identities violated";
            }
        }
    }

    {  // Gram symmetry and positive semidefiniteness
        Rng rng(903);
        for (int t = 0; t < 100 && ok; ++t) {
            const Index m = 2 + static_cast<Index>(rng.next_u64() % 8);
            Matrix centers(m, 2);
            Vector sigmas(m);
            for (Index i = 0; i < m; ++i) {
                centers(i, 0) = rng.uniform(-2, 2);
                centers(i, 1) = rng.uniform(-2, 2);
                sigmas(i) = rng.uniform(0.05, 2.0);
            }
            const Matrix K = gram_l2(centers, KernelSpec::per_point(2, sigmas, 1e-6, 1e6));
            if (K != K.transpose()) {
                ok = false;
                detail = "Gram matrix not symmetric";
                break;
            }
            Eigen::SelfAdjointEigenSolver<Matrix> eig(K);
            if (eig.eigenvalues().minCoeff() < -1e-12 * K.norm()) {
                ok = false;
                detail = "Gram matrix not positive semidefinite";
            }
        }
    }

    {  // seed determinism
        Rng rng(904);
        for (int t = 0; t < 100 && ok; ++t) {
            const std::uint64_t seed = rng.next_u64();
            const auto a = sample_feasible(5, seed);
            const auto b = sample_feasible(5, seed);
            for (size_t i = 0; i < a.size(); ++i)
                if (a[i].a != b[i].a || a[i].b != b[i].b) {
                    ok = false;
                    detail = "seeded sampling not deterministic";
                }
        }
    }

    {  // model persistence round trip
        namespace fs = std::filesystem;
        const fs::path path = fs::temp_directory_path() / "akl_acceptance_model.json";
        Rng rng(905);
        for (int t = 0; t < 100 && ok; ++t) {
            Dataset d;
            d.points.resize(6, 2);
            d.targets.resize(6, 1);
            for (Index i = 0; i < 6; ++i) {
                d.points(i, 0) = rng.uniform(-2, 2);
                d.points(i, 1) = rng.uniform(-2, 2);
                d.targets(i, 0) = rng.uniform(-1, 1);
            }
            KernelSpec spec = init_widths_knn(d.points, 4);
            KernelModel model;
            model.centers = d.points;
            model.spec = spec;
            model.weights = alpha_step(d, spec, 0.01);
            model.lambda_used = 0.01;
            model.flavor = ModelFlavor::L2Adaptive;
            save_model(model, path.string());
            const KernelModel back = load_model(path.string());
            Vector x(2);
            x << rng.uniform(-2, 2), rng.uniform(-2, 2);
            const double p0 = predict_model(model, x)(0);
            const double p1 = predict_model(back, x)(0);
            if (std::fabs(p0 - p1) > 1e-14 * (1.0 + std::fabs(p0))) {
                ok = false;
                detail = "persistence round trip changed predictions";
            }
        }
        fs::remove(path);
    }

    report(9, "randomized property suites (100 instances each)", ok, detail);
}

}  // namespace

int main() {
    criterion_gram_oracle();
    criterion_ridge_closed_form();
    criterion_alpha_optimality();
    criterion_descent();
    criterion_nw_band();
    criterion_common_width_gain();
    criterion_per_point_adaptation();
    criterion_mollifier_bound();
    criterion_property_suites();
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
