#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "akl/harness.hpp"
#include "akl/modelsel.hpp"

using namespace akl;
using Catch::Approx;

namespace {

Dataset line_dataset(std::initializer_list<double> xs, std::initializer_list<double> ys) {
    Dataset d;
    d.points.resize(static_cast<Index>(xs.size()), 1);
    d.targets.resize(static_cast<Index>(ys.size()), 1);
    Index i = 0;
    for (double x : xs) d.points(i++, 0) = x;
    i = 0;
    for (double y : ys) d.targets(i++, 0) = y;
    return d;
}

Predictor zero_predictor() {
    return [](const Vector&) { return Vector::Zero(1); };
}

SweepReport report_from(std::initializer_list<std::pair<double, double>> lambda_and_test_sup) {
    SweepReport r;
    for (auto [lambda, sup] : lambda_and_test_sup) {
        SweepRow row;
        row.lambda = lambda;
        row.test_sup = sup;
        r.rows.push_back(row);
    }
    return r;
}

}  // namespace

TEST_CASE("error_metrics") {
    Dataset d = line_dataset({0, 1, 2}, {1, -2, 2});

    SECTION("zero predictor: sup, mae and rmse by hand") {
        ErrorMetrics m = error_metrics(zero_predictor(), d);
        CHECK(m.sup == Approx(2.0));
        CHECK(m.mean_abs == Approx(5.0 / 3.0));
        CHECK(m.rmse == Approx(std::sqrt(9.0 / 3.0)));
    }

    SECTION("perfect predictor gives all zeros") {
        Predictor exact = [&](const Vector& x) {
            for (Index i = 0; i < d.size(); ++i)
                if (d.points(i, 0) == x(0)) return Vector(d.targets.row(i).transpose());
            return Vector::Zero(1).eval();
        };
        ErrorMetrics m = error_metrics(exact, d);
        CHECK(m.sup == 0.0);
        CHECK(m.mean_abs == 0.0);
        CHECK(m.rmse == 0.0);
    }

    SECTION("rmse >= mae and sup >= rmse on random instances") {
        Rng rng(71);
        for (int t = 0; t < 20; ++t) {
            Dataset r;
            const Index m = 2 + static_cast<Index>(rng.next_u64() % 10);
            r.points.resize(m, 1);
            r.targets.resize(m, 1);
            for (Index i = 0; i < m; ++i) {
                r.points(i, 0) = rng.uniform(-2, 2);
                r.targets(i, 0) = rng.uniform(-3, 3);
            }
            ErrorMetrics em = error_metrics(zero_predictor(), r);
            CHECK(em.rmse >= em.mean_abs - 1e-15);
            CHECK(em.sup >= em.rmse - 1e-15);
        }
    }
}

TEST_CASE("sup_error_grid") {
    SECTION("constant truth minus constant prediction") {
        Matrix grid(3, 1);
        grid << 0, 1, 2;
        auto truth = [](const Vector&) { return 2.0; };
        Predictor half = [](const Vector&) { return Vector::Constant(1, 0.5); };
        CHECK(sup_error_grid(half, truth, grid) == Approx(1.5));
    }

    SECTION("empty grid is rejected") {
        Matrix grid(0, 1);
        CHECK_THROWS_AS(sup_error_grid(zero_predictor(), [](const Vector&) { return 0.0; }, grid),
                        input_error);
    }

    SECTION("truth oracle failures are reported with the point") {
        Matrix grid(1, 1);
        grid << 3.0;
        auto bad = [](const Vector&) -> double { throw std::runtime_error("no value"); };
        CHECK_THROWS_AS(sup_error_grid(zero_predictor(), bad, grid), input_error);
    }

    SECTION("zero predictor against the minus root: sup is 1 + sqrt(3)") {
        const Matrix grid = eval_grid(101);
        const double sup = sup_error_grid(zero_predictor(), truth_fn(Branch::Minus), grid);
        // brute-force scan over the same lattice, written independently
        double want = 0.0;
        for (int i = 0; i < 101; ++i) {
            for (int j = 0; j < 101; ++j) {
                const double a = -2.0 + 4.0 * i / 100.0;
                const double b = -2.0 + 4.0 * j / 100.0;
                if (a * a - 4.0 * b < 0.0) continue;
                want = std::max(want, std::fabs((-a - std::sqrt(a * a - 4.0 * b)) / 2.0));
            }
        }
        CHECK(sup == Approx(want).epsilon(1e-12));
        CHECK(sup == Approx(1.0 + std::sqrt(3.0)).epsilon(1e-12));
    }

    SECTION("refining the grid cannot shrink the sup") {
        Predictor p = [](const Vector& x) { return Vector::Constant(1, 0.3 * x(0)); };
        const double coarse = sup_error_grid(p, truth_fn(Branch::Plus), eval_grid(51));
        const double fine = sup_error_grid(p, truth_fn(Branch::Plus), eval_grid(101));
        CHECK(fine >= coarse - 1e-15);  // the coarse lattice is a sublattice
    }
}

TEST_CASE("select_lambda") {
    SECTION("single row") {
        CHECK(select_lambda(report_from({{0.01, 1.0}})) == 0.01);
    }

    SECTION("minimum wins, ties go to the smaller lambda") {
        CHECK(select_lambda(report_from({{0.001, 2.0}, {0.01, 1.0}, {0.1, 3.0}})) == 0.01);
        CHECK(select_lambda(report_from({{0.001, 1.0}, {0.01, 1.0}, {0.1, 3.0}})) == 0.001);
        CHECK(select_lambda(report_from({{0.01, 1.0}, {0.001, 1.0}})) == 0.001);
    }

    SECTION("row order does not matter") {
        SweepReport a = report_from({{0.1, 3.0}, {0.001, 2.0}, {0.01, 1.0}});
        SweepReport b = report_from({{0.01, 1.0}, {0.1, 3.0}, {0.001, 2.0}});
        CHECK(select_lambda(a) == select_lambda(b));
    }

    SECTION("failed rows are skipped; all failed throws") {
        SweepReport r = report_from({{0.001, 0.5}, {0.01, 1.0}});
        r.rows[0].failed = true;
        CHECK(select_lambda(r) == 0.01);
        r.rows[1].failed = true;
        CHECK_THROWS_AS(select_lambda(r), input_error);
    }
}

TEST_CASE("default_lambda_grid") {
    const std::vector<double> grid = default_lambda_grid();
    REQUIRE(grid.size() == 13);
    CHECK(grid.front() == Approx(1e-4));
    CHECK(grid.back() == Approx(1e-1));
    for (size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] > grid[i - 1]);
        // uniform log spacing
        CHECK(grid[i] / grid[i - 1] == Approx(std::pow(10.0, 0.25)));
    }
}

TEST_CASE("lambda_sweep") {
    Rng rng(72);
    Dataset train, test;
    train.points.resize(12, 1);
    train.targets.resize(12, 1);
    for (Index i = 0; i < 12; ++i) {
        train.points(i, 0) = rng.uniform(-2, 2);
        train.targets(i, 0) = std::cos(train.points(i, 0));
    }
    test.points.resize(8, 1);
    test.targets.resize(8, 1);
    for (Index i = 0; i < 8; ++i) {
        test.points(i, 0) = rng.uniform(-2, 2);
        test.targets(i, 0) = std::cos(test.points(i, 0));
    }
    SigmaOptConfig opt;
    opt.max_evaluations = 100;

    SECTION("input validation") {
        CHECK_THROWS_AS(lambda_sweep(train, test, nullptr, {}, SweepMethod::Rkhs, opt, 1),
                        input_error);
        CHECK_THROWS_AS(
            lambda_sweep(train, test, nullptr, {0.1, 0.01}, SweepMethod::Rkhs, opt, 1),
            input_error);
        CHECK_THROWS_AS(
            lambda_sweep(train, test, nullptr, {-0.1, 0.01}, SweepMethod::Rkhs, opt, 1),
            input_error);
    }

    SECTION("single-lambda grid selects that lambda") {
        SweepReport r = lambda_sweep(train, test, nullptr, {0.01}, SweepMethod::Rkhs, opt, 1);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.selected_lambda == 0.01);
        CHECK(r.rows[0].selected);
        CHECK(!r.rows[0].has_true);
    }

    SECTION("one row per lambda, exactly one selected") {
        SweepReport r = lambda_sweep(train, test, nullptr, default_lambda_grid(),
                                     SweepMethod::Rkhs, opt, 1);
        REQUIRE(r.rows.size() == 13);
        int selected = 0;
        for (const SweepRow& row : r.rows) {
            CHECK(row.train_sup >= 0.0);
            CHECK(row.test_sup >= 0.0);
            selected += row.selected ? 1 : 0;
        }
        CHECK(selected == 1);
    }

    SECTION("ridge training rmse is non-decreasing in lambda") {
        SweepReport r = lambda_sweep(train, test, nullptr, default_lambda_grid(),
                                     SweepMethod::Rkhs, opt, 1);
        // recompute rmse per lambda: the residual 2-norm of ridge grows with lambda
        KernelSpec init = init_widths_knn(train.points, 4);
        KernelSpec common = KernelSpec::common(1, init.widths.mean(), init.sigma_min,
                                               init.sigma_max);
        double prev = -1.0;
        for (const SweepRow& row : r.rows) {
            FitConfig cfg;
            cfg.lambda = row.lambda;
            KernelModel model = fit_rkhs(train, common, cfg);
            const double rmse = error_metrics(make_predictor(model), train).rmse;
            CHECK(rmse >= prev - 1e-10);
            prev = rmse;
        }
    }

    SECTION("adaptive methods run end to end with a truth oracle") {
        TruthSpec truth;
        truth.fn = [](const Vector& x) { return std::cos(x(0)); };
        truth.grid = Matrix::Zero(5, 1);
        for (Index i = 0; i < 5; ++i) truth.grid(i, 0) = -2.0 + i;
        for (SweepMethod method : {SweepMethod::AdaptiveCommon, SweepMethod::AdaptivePerPoint}) {
            SweepReport r = lambda_sweep(train, test, &truth, {0.005, 0.05}, method, opt, 2);
            REQUIRE(r.rows.size() == 2);
            for (const SweepRow& row : r.rows) {
                CHECK(!row.failed);
                CHECK(row.has_true);
                CHECK(std::isfinite(row.true_sup));
            }
            CHECK(r.method == to_string(method));
        }
    }
}

TEST_CASE("sweep csv round trip is bit-exact") {
    Rng rng(73);
    SweepReport r;
    for (int i = 0; i < 6; ++i) {
        SweepRow row;
        row.lambda = std::pow(10.0, rng.uniform(-4, -1));
        row.train_sup = rng.uniform(0, 2);
        row.train_mae = rng.uniform(0, 1);
        row.test_sup = rng.uniform(0, 2);
        row.test_mae = rng.uniform(0, 1);
        if (i % 2 == 0) {
            row.true_sup = rng.uniform(0, 3);
            row.has_true = true;
        }
        row.selected = (i == 3);
        r.rows.push_back(row);
        if (row.selected) r.selected_lambda = row.lambda;
    }

    std::ostringstream os;
    write_sweep_csv(r, os);
    std::istringstream is(os.str());
    SweepReport back = read_sweep_csv(is);

    REQUIRE(back.rows.size() == r.rows.size());
    CHECK(back.selected_lambda == r.selected_lambda);
    for (size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(back.rows[i].lambda == r.rows[i].lambda);
        CHECK(back.rows[i].train_sup == r.rows[i].train_sup);
        CHECK(back.rows[i].train_mae == r.rows[i].train_mae);
        CHECK(back.rows[i].test_sup == r.rows[i].test_sup);
        CHECK(back.rows[i].test_mae == r.rows[i].test_mae);
        CHECK(back.rows[i].has_true == r.rows[i].has_true);
        if (r.rows[i].has_true) CHECK(back.rows[i].true_sup == r.rows[i].true_sup);
        CHECK(back.rows[i].selected == r.rows[i].selected);
    }

    SECTION("bad header is rejected") {
        std::istringstream bad("lambda,nope\n");
        CHECK_THROWS_AS(read_sweep_csv(bad), input_error);
    }
}
