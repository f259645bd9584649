#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "surrscope/core/error.hpp"
#include "surrscope/surrogates/surrogate.hpp"
#include "test_util.hpp"

using namespace surrscope;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Fixed 12-point problem. Reference solutions were computed once with
// statsmodels (MLE), cvxpy/Clarabel and scipy L-BFGS-B (L1, the two agree to
// 1e-7) and are frozen here.
const FeatureMatrix kX(12, 2, {0.0, 1.0, 1.0, 0.5, 2.0, 1.5, 3.0, 0.0, 0.5, 2.0, 1.5, 1.0,
                               2.5, 2.5, 3.5, 1.0, 0.2, 0.1, 1.2, 2.2, 2.2, 0.4, 3.1, 1.9});
const BinaryLabels kY({0, 0, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1});

FitConfig logistic_cfg()
{
    FitConfig c;
    c.family = Family::logistic;
    c.tol = 1e-12;
    return c;
}

FitConfig l1_cfg(double C, bool standardize)
{
    FitConfig c;
    c.family = Family::logistic_l1;
    c.C = C;
    c.standardize = standardize;
    c.tol = 1e-12;
    c.max_iter = 200000;
    return c;
}

double l1_norm(const std::vector<double>& w)
{
    double s = 0.0;
    for (double v : w) {
        s += std::abs(v);
    }
    return s;
}

struct Problem {
    FeatureMatrix X;
    BinaryLabels y;
};

/// Noisy labels from a random hyperplane, so the MLE exists.
Problem random_problem(std::size_t n, std::size_t d, std::uint64_t seed)
{
    RandomStream rng(RngSeed{seed});
    auto X = testing::random_matrix(n, d, RngSeed{seed + 1000}, -2.0, 2.0);
    std::vector<double> w(d);
    for (auto& v : w) {
        v = rng.normal();
    }
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            t += w[j] * X.at(i, j);
        }
        y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-t)) ? 1 : 0;
    }
    return {std::move(X), BinaryLabels(std::move(y))};
}

/// Best single split found by trying every feature and every midpoint, each
/// side predicting its majority.
double brute_force_stump_accuracy(const FeatureMatrix& X, const BinaryLabels& y)
{
    const std::size_t n = y.size();
    const std::size_t pos = y.count_positive();
    double best = static_cast<double>(std::max(pos, n - pos)) / static_cast<double>(n);
    for (std::size_t f = 0; f < X.cols(); ++f) {
        for (std::size_t a = 0; a < n; ++a) {
            const double thr = X.at(a, f);
            std::size_t l0 = 0, l1 = 0, r0 = 0, r1 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool left = X.at(i, f) <= thr;
                (left ? (y[i] ? l1 : l0) : (y[i] ? r1 : r0))++;
            }
            const double acc = static_cast<double>(std::max(l0, l1) + std::max(r0, r1)) / static_cast<double>(n);
            best = std::max(best, acc);
        }
    }
    return best;
}

double training_accuracy(const TreeSurrogate& t, const FeatureMatrix& X, const BinaryLabels& y)
{
    const auto p = surrogate_predict(t, X);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ok += p[i] == y[i];
    }
    return static_cast<double>(ok) / static_cast<double>(y.size());
}

} // namespace

TEST_CASE("soft_threshold")
{
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-1.0, 1.0) == 0.0);
}

TEST_CASE("FitConfig validation")
{
    FitConfig c;
    c.family = Family::logistic_l1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.C = -1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.C = 1.0;
    CHECK_NOTHROW(c.validate());
    c.family = Family::logistic;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK(family_from_string("tree") == Family::tree);
    CHECK_THROWS_AS(family_from_string("svm"), InvalidArgument);
    CHECK(to_string(Family::logistic_l1) == "logistic_l1");
}

TEST_CASE("logistic gradient agrees with central differences")
{
    RandomStream rng(RngSeed{77});
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_problem(200, 5, 500 + static_cast<std::uint64_t>(trial));
        std::vector<double> w(5);
        for (auto& v : w) {
            v = rng.normal();
        }
        const double b = rng.normal();
        const TrainingView view{p.X, p.y, {}};
        const auto at = logistic_loss(view, w, b);
        const double h = 1e-6;
        for (std::size_t j = 0; j <= 5; ++j) {
            auto wp = w;
            auto wm = w;
            double bp = b;
            double bm = b;
            if (j < 5) {
                wp[j] += h;
                wm[j] -= h;
            } else {
                bp += h;
                bm -= h;
            }
            const double fd = (logistic_loss(view, wp, bp).value - logistic_loss(view, wm, bm).value) / (2.0 * h);
            const double g = j < 5 ? at.grad_coefficients[j] : at.grad_intercept;
            worst = std::max(worst, std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), 1e-6}));
        }
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("logistic MLE matches statsmodels")
{
    const auto s = fit_logistic(TrainingView{kX, kY, {}}, logistic_cfg());
    CHECK(s.converged);
    CHECK(!s.degenerate);
    CHECK_THAT(s.intercept, WithinAbs(-5.985669492424601, 1e-8));
    CHECK_THAT(s.coefficients[0], WithinAbs(2.17098779007712, 1e-8));
    CHECK_THAT(s.coefficients[1], WithinAbs(1.8678233047196926, 1e-8));
    CHECK(std::get<LinearComplexity>(complexity(s)).l0 == 2);
}

TEST_CASE("weighted logistic MLE matches a frequency-weighted GLM")
{
    std::vector<double> w(12);
    for (std::size_t i = 0; i < 12; ++i) {
        w[i] = 1.0 + static_cast<double>(i % 3);
    }
    const auto s = fit_logistic(TrainingView{kX, kY, w}, logistic_cfg());
    CHECK_THAT(s.intercept, WithinAbs(-8.065630097900062, 1e-7));
    CHECK_THAT(s.coefficients[0], WithinAbs(2.54435287420112, 1e-7));
    CHECK_THAT(s.coefficients[1], WithinAbs(3.233624198200145, 1e-7));
}

TEST_CASE("logistic fit is invariant to the standardize flag")
{
    auto cfg = logistic_cfg();
    cfg.standardize = true;
    const auto a = fit_logistic(TrainingView{kX, kY, {}}, cfg);
    cfg.standardize = false;
    const auto b = fit_logistic(TrainingView{kX, kY, {}}, cfg);
    CHECK_THAT(a.coefficients[0], WithinAbs(b.coefficients[0], 1e-9));
    CHECK_THAT(a.intercept, WithinAbs(b.intercept, 1e-9));
}

TEST_CASE("L1 logistic matches the convex-solver references")
{
    struct Case {
        double C;
        bool standardize;
        double w0, w1, b;
    };
    const Case cases[] = {
        {0.5, false, 0.0, 0.0, 0.0},
        {0.5, true, 0.0, 0.0, 0.0},
        {2.0, false, 0.0, 0.0, 0.0},
        {2.0, true, 0.0, 0.0, 0.0},
        {10.0, false, 0.9156230, 0.3109508, -1.9545326},
        {10.0, true, 0.8620714, 0.4580519, -2.0361417},
        {50.0, false, 1.6420791, 1.2827430, -4.3792686},
        {50.0, true, 1.6374657, 1.3242039, -4.4187888},
    };
    for (const auto& c : cases) {
        CAPTURE(c.C, c.standardize);
        const auto s = fit_logistic_l1(TrainingView{kX, kY, {}}, l1_cfg(c.C, c.standardize));
        CHECK(s.converged);
        CHECK(s.C == c.C);
        CHECK_THAT(s.coefficients[0], WithinAbs(c.w0, 1e-5));
        CHECK_THAT(s.coefficients[1], WithinAbs(c.w1, 1e-5));
        if (c.w0 == 0.0) {
            // All-zero solution: the intercept is the log-odds of the labels.
            CHECK(s.coefficients[0] == 0.0);
            CHECK(s.coefficients[1] == 0.0);
            CHECK_THAT(s.intercept, WithinAbs(0.0, 1e-9));
        } else {
            CHECK_THAT(s.intercept, WithinAbs(c.b, 1e-5));
        }
    }
}

TEST_CASE("proximal objective never increases on an accepted step")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = random_problem(150, 4, seed);
        for (double C : {0.05, 0.5, 5.0, 500.0}) {
            for (bool standardize : {true, false}) {
                SolverTrace trace;
                fit_logistic_l1(TrainingView{p.X, p.y, {}}, l1_cfg(C, standardize), nullptr, &trace);
                REQUIRE(trace.objective.size() >= 1);
                for (std::size_t k = 1; k < trace.objective.size(); ++k) {
                    REQUIRE(trace.objective[k] <= trace.objective[k - 1]);
                }
            }
        }
    }
}

TEST_CASE("Newton trace never increases either")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = random_problem(150, 4, seed);
        SolverTrace trace;
        const auto s = fit_logistic(TrainingView{p.X, p.y, {}}, logistic_cfg(), &trace);
        CHECK(s.converged);
        for (std::size_t k = 1; k < trace.objective.size(); ++k) {
            REQUIRE(trace.objective[k] <= trace.objective[k - 1]);
        }
    }
}

TEST_CASE("L1 norm shrinks as C decreases")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = random_problem(200, 6, 40 + seed);
        double prev = std::numeric_limits<double>::infinity();
        for (double C = 1000.0; C >= 1e-3; C /= 1.6) {
            const auto s = fit_logistic_l1(TrainingView{p.X, p.y, {}}, l1_cfg(C, false));
            const double norm = l1_norm(s.coefficients);
            REQUIRE(norm <= prev + 1e-8);
            prev = norm;
        }
        CHECK(prev == 0.0);
    }
}

TEST_CASE("warm start does not change the answer")
{
    const auto p = random_problem(200, 5, 9);
    const TrainingView view{p.X, p.y, {}};
    auto cfg = l1_cfg(1.0, true);
    cfg.tol = 1e-10;
    const auto cold = fit_logistic_l1(view, cfg);
    auto strong = cfg;
    strong.C = 0.1;
    const auto start = fit_logistic_l1(view, strong);
    const auto warm = fit_logistic_l1(view, cfg, &start);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK_THAT(warm.coefficients[j], WithinAbs(cold.coefficients[j], 1e-8));
    }
    const LinearSurrogate wrong{{1.0}, 0.0, 1.0, false, 0, 0.0, true};
    CHECK_THROWS_AS(fit_logistic_l1(view, cfg, &wrong), DimensionMismatch);
}

TEST_CASE("one-class training data gives a constant degenerate model")
{
    const BinaryLabels ones(std::vector<std::uint8_t>(12, 1));
    const BinaryLabels zeros(std::vector<std::uint8_t>(12, 0));
    const auto a = fit_logistic(TrainingView{kX, ones, {}}, logistic_cfg());
    CHECK(a.degenerate);
    CHECK(a.coefficients == std::vector<double>{0.0, 0.0});
    CHECK(a.intercept == 1.0);
    CHECK(surrogate_predict(a, kX) == ones);
    const auto b = fit_logistic_l1(TrainingView{kX, zeros, {}}, l1_cfg(1.0, true));
    CHECK(b.degenerate);
    CHECK(b.intercept == -1.0);
    CHECK(surrogate_predict(b, kX) == zeros);
    FitConfig tc;
    tc.family = Family::tree;
    const auto t = fit_tree(TrainingView{kX, ones, {}}, tc);
    CHECK(t.degenerate);
    CHECK(t.n_leaves == 1);
    CHECK(surrogate_predict(t, kX) == ones);
}

TEST_CASE("constant feature columns get a zero coefficient")
{
    FeatureMatrix X(6, 2, {1, 5, 2, 5, 3, 5, 4, 5, 5, 5, 6, 5});
    const BinaryLabels y({0, 0, 1, 0, 1, 1});
    const auto s = fit_logistic(TrainingView{X, y, {}}, logistic_cfg());
    CHECK(s.coefficients[1] == 0.0);
    CHECK(s.coefficients[0] > 0.0);
}

TEST_CASE("input checks")
{
    const BinaryLabels short_y({0, 1});
    CHECK_THROWS_AS(fit_logistic(TrainingView{kX, short_y, {}}, logistic_cfg()), DimensionMismatch);
    const std::vector<double> bad_w(12, -1.0);
    CHECK_THROWS_AS(fit_logistic(TrainingView{kX, kY, bad_w}, logistic_cfg()), InvalidArgument);
    CHECK_THROWS_AS(fit_logistic(TrainingView{kX, kY, {}}, l1_cfg(1.0, true)), InvalidArgument);
    const LinearSurrogate s{{1.0, 2.0, 3.0}, 0.0, std::nullopt, false, 0, 0.0, true};
    CHECK_THROWS_AS(surrogate_predict(s, kX), DimensionMismatch);
}

TEST_CASE("linear prediction is 1 iff w.x + b > 0")
{
    const LinearSurrogate s{{1.0, -1.0}, 0.0, std::nullopt, false, 0, 0.0, true};
    const FeatureMatrix X(3, 2, {2.0, 1.0, 1.0, 1.0, 0.0, 1.0});
    CHECK(surrogate_predict(s, X) == BinaryLabels({1, 0, 0}));
}

TEST_CASE("stumps match the brute-force oracle on every 4-point XOR-type instance")
{
    // Corners of a square under all 16 labelings, then random axis-aligned
    // rectangles, then freely jittered corners. Greedy depth 2 is only exact
    // when every split is 2|2, so it is not checked on the free layouts.
    RandomStream rng(RngSeed{21});
    FitConfig stump;
    stump.family = Family::tree;
    stump.max_depth = 1;
    FitConfig two = stump;
    two.max_depth = 2;
    for (int layout = 0; layout < 20; ++layout) {
        std::vector<double> xy{0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0};
        const bool rectangle = layout < 10;
        if (layout > 0 && rectangle) {
            const double x0 = rng.uniform() - 1.0;
            const double x1 = rng.uniform();
            const double y0 = rng.uniform() - 1.0;
            const double y1 = rng.uniform();
            xy = {x0, y0, x0, y1, x1, y0, x1, y1};
        } else if (layout > 0) {
            for (auto& v : xy) {
                v += 0.3 * (rng.uniform() - 0.5);
            }
        }
        const FeatureMatrix X(4, 2, xy);
        for (unsigned mask = 0; mask < 16; ++mask) {
            const BinaryLabels y({static_cast<std::uint8_t>(mask & 1), static_cast<std::uint8_t>((mask >> 1) & 1),
                                  static_cast<std::uint8_t>((mask >> 2) & 1),
                                  static_cast<std::uint8_t>((mask >> 3) & 1)});
            CAPTURE(layout, mask);
            const auto t1 = fit_tree(TrainingView{X, y, {}}, stump);
            t1.validate();
            CHECK(training_accuracy(t1, X, y) == brute_force_stump_accuracy(X, y));
            const auto t2 = fit_tree(TrainingView{X, y, {}}, two);
            t2.validate();
            if (rectangle) {
                CHECK(training_accuracy(t2, X, y) == 1.0);
            }
        }
    }
}

TEST_CASE("XOR needs a zero-gain first split")
{
    const FeatureMatrix X(4, 2, {0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0});
    const BinaryLabels y({0, 1, 1, 0});
    FitConfig cfg;
    cfg.family = Family::tree;
    const auto t = fit_tree(TrainingView{X, y, {}}, cfg);
    CHECK(t.depth == 2);
    CHECK(t.n_leaves == 4);
    // Ties go to the lowest feature index.
    CHECK(t.nodes[0].feature == 0);
    CHECK(t.nodes[0].threshold == 0.5);
}

TEST_CASE("training accuracy never drops as max_depth grows")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto X = testing::random_matrix(100, 3, RngSeed{seed});
        RandomStream rng(RngSeed{seed + 99});
        std::vector<std::uint8_t> labels(100);
        for (auto& v : labels) {
            v = rng.uniform() < 0.4 ? 1 : 0;
        }
        const BinaryLabels y(labels);
        double prev = 0.0;
        for (std::size_t depth = 0; depth <= 12; ++depth) {
            FitConfig cfg;
            cfg.family = Family::tree;
            cfg.max_depth = depth;
            const auto t = fit_tree(TrainingView{X, y, {}}, cfg);
            REQUIRE(t.depth <= depth);
            const double acc = training_accuracy(t, X, y);
            REQUIRE(acc >= prev);
            prev = acc;
        }
        FitConfig full;
        full.family = Family::tree;
        CHECK(training_accuracy(fit_tree(TrainingView{X, y, {}}, full), X, y) == 1.0);
    }
}

TEST_CASE("max_leaves grows best-first up to the cap")
{
    const auto X = testing::random_matrix(300, 2, RngSeed{4});
    const testing::XorBlackBox bb;
    const auto y = bb.predict(X);
    double prev = 0.0;
    for (std::size_t leaves = 1; leaves <= 12; ++leaves) {
        FitConfig cfg;
        cfg.family = Family::tree;
        cfg.max_leaves = leaves;
        const auto t = fit_tree(TrainingView{X, y, {}}, cfg);
        t.validate();
        CHECK(t.n_leaves <= leaves);
        const double acc = training_accuracy(t, X, y);
        CHECK(acc >= prev);
        prev = acc;
    }
    CHECK(prev == 1.0);
}

TEST_CASE("tree weights change the majority")
{
    const FeatureMatrix X(3, 1, {0.0, 0.0, 0.0});
    const BinaryLabels y({1, 0, 0});
    FitConfig cfg;
    cfg.family = Family::tree;
    const std::vector<double> w{5.0, 1.0, 1.0};
    CHECK(surrogate_predict(fit_tree(TrainingView{X, y, {}}, cfg), X) == BinaryLabels({0, 0, 0}));
    CHECK(surrogate_predict(fit_tree(TrainingView{X, y, w}, cfg), X) == BinaryLabels({1, 1, 1}));
}

TEST_CASE("tree validate catches corrupt structure")
{
    const FeatureMatrix X(4, 2, {0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0});
    const BinaryLabels y({0, 1, 1, 0});
    FitConfig cfg;
    cfg.family = Family::tree;
    const auto good = fit_tree(TrainingView{X, y, {}}, cfg);
    CHECK_NOTHROW(good.validate());
    auto bad = good;
    bad.nodes[0].left = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = good;
    bad.depth = 5;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = good;
    bad.nodes[0].feature = 7;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    CHECK_THROWS_AS(surrogate_predict(good, FeatureMatrix(1, 3, {0, 0, 0})), DimensionMismatch);
}

TEST_CASE("complexity measures")
{
    const LinearSurrogate s{{0.0, 1e-11, -2.0}, 1.0, std::nullopt, false, 0, 0.0, true};
    CHECK(std::get<LinearComplexity>(complexity(s)).l0 == 1);
    CHECK(scalar_complexity(complexity(s)) == 1.0);
    TreeSurrogate t;
    t.n_features = 1;
    t.nodes = {TreeNode{}};
    CHECK(scalar_complexity(complexity(Surrogate{t})) == 1.0);
    CHECK(is_degenerate(Surrogate{s}) == false);
}
