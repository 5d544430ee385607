#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fsel/estimators.hpp"
#include "fsel/rng.hpp"
#include "test_util.hpp"

using namespace fsel;

TEST_CASE("cart finds the single clean split") {
    const Matrix X = testutil::mat({{1}, {2}, {3}, {4}});
    const std::vector<double> y{0, 0, 1, 1};
    CartParams params;
    params.min_leaf = 1;
    const auto m = fit_cart(X, y, Task::binary, params);
    REQUIRE(m.trees.size() == 1);
    const auto& root = m.trees[0].nodes[0];
    CHECK(root.feature == 0);
    CHECK(root.threshold == doctest::Approx(2.5));
    const auto pred = predict(m, X);
    CHECK(pred.labels == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("cart on a pure target is a depth-0 leaf") {
    const Matrix X = testutil::random_matrix(10, 2, 1);
    const auto m = fit_cart(X, std::vector<double>(10, 3.5), Task::regression, {});
    CHECK(m.trees[0].nodes.size() == 1);
    CHECK(m.trees[0].nodes[0].feature == -1);
    CHECK(m.trees[0].nodes[0].value == doctest::Approx(3.5));
}

TEST_CASE("cart solves XOR at depth 2") {
    const Matrix X = testutil::mat({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const std::vector<double> y{0, 1, 1, 0};
    CartParams params;
    params.max_depth = 2;
    params.min_leaf = 1;
    const auto m = fit_cart(X, y, Task::binary, params);
    const auto pred = predict(m, X);
    for (std::size_t i = 0; i < 4; ++i) CHECK(pred.labels[i] == static_cast<int>(y[i]));
}

TEST_CASE("cart training error is non-increasing in max_depth") {
    const std::size_t n = 120;
    Matrix X = testutil::random_matrix(n, 4, 7);
    Rng rng(8);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = (X(i, 0) > 0) ^ (X(i, 1) * X(i, 2) > 0.2) ^ (rng.uniform() < 0.1) ? 1.0 : 0.0;

    double prev_errors = static_cast<double>(n + 1);
    for (std::size_t depth = 1; depth <= 8; ++depth) {
        CartParams params;
        params.max_depth = depth;
        params.min_leaf = 1;
        const auto m = fit_cart(X, y, Task::binary, params);
        const auto pred = predict(m, X);
        double errors = 0;
        for (std::size_t i = 0; i < n; ++i) errors += pred.labels[i] != static_cast<int>(y[i]);
        CHECK(errors <= prev_errors);
        prev_errors = errors;
    }
}

TEST_CASE("cart regression predicts leaf means") {
    const Matrix X = testutil::mat({{1}, {2}, {10}, {11}});
    const std::vector<double> y{1.0, 2.0, 10.0, 12.0};
    CartParams params;
    params.max_depth = 1;
    params.min_leaf = 2;
    const auto m = fit_cart(X, y, Task::regression, params);
    const auto pred = predict(m, X);
    CHECK(pred.values[0] == doctest::Approx(1.5));
    CHECK(pred.values[2] == doctest::Approx(11.0));
}

TEST_CASE("single-split tree importance is all on that feature") {
    const Matrix X = testutil::mat({{5, 1}, {5, 2}, {5, 3}, {5, 4}});
    const std::vector<double> y{0, 0, 1, 1};
    CartParams params;
    params.min_leaf = 1;
    params.max_depth = 1;
    const auto m = fit_cart(X, y, Task::binary, params);
    const auto imp = feature_importance(m);
    CHECK(imp[0] == 0.0);
    CHECK(imp[1] == doctest::Approx(1.0));
}

TEST_CASE("forest with one tree and no bootstrap equals cart") {
    const Matrix X = testutil::random_matrix(60, 5, 17);
    Rng rng(18);
    std::vector<double> y(60);
    for (std::size_t i = 0; i < 60; ++i) y[i] = X(i, 2) + 0.3 * X(i, 4) > 0 ? 1.0 : 0.0;

    ForestParams fp;
    fp.n_trees = 1;
    fp.bootstrap = false;
    fp.mtry = 5;  // all features, no per-split sampling
    fp.max_depth = 10;
    const auto forest = fit_random_forest(X, y, Task::binary, fp);

    CartParams cp;
    cp.max_depth = 10;
    cp.min_leaf = 2;
    const auto cart = fit_cart(X, y, Task::binary, cp);

    const Matrix Xt = testutil::random_matrix(30, 5, 19);
    CHECK(predict(forest, Xt).labels == predict(cart, Xt).labels);
}

TEST_CASE("forest importances surface planted features") {
    const std::size_t n = 200, d = 8;
    Matrix X = testutil::random_matrix(n, d, 23);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = X(i, 1) + X(i, 5) > 0 ? 1.0 : 0.0;

    ForestParams fp;
    fp.seed = 3;
    const auto m = fit_random_forest(X, y, Task::binary, fp);
    const auto imp = feature_importance(m);
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return imp[a] > imp[b]; });
    const bool top2 = (order[0] == 1 && order[1] == 5) || (order[0] == 5 && order[1] == 1);
    CHECK(top2);
}

TEST_CASE("forest is deterministic given the seed") {
    const Matrix X = testutil::random_matrix(80, 4, 29);
    std::vector<double> y(80);
    for (std::size_t i = 0; i < 80; ++i) y[i] = X(i, 0) > 0 ? 1.0 : 0.0;
    ForestParams fp;
    fp.seed = 77;
    fp.n_trees = 25;
    const auto a = fit_random_forest(X, y, Task::binary, fp);
    const auto b = fit_random_forest(X, y, Task::binary, fp);
    const Matrix Xt = testutil::random_matrix(40, 4, 30);
    CHECK(predict(a, Xt).labels == predict(b, Xt).labels);
    CHECK(a.split_importance == b.split_importance);
}

TEST_CASE("forest regression averages tree means") {
    const Matrix X = testutil::random_matrix(100, 3, 41);
    std::vector<double> y(100);
    for (std::size_t i = 0; i < 100; ++i) y[i] = 2.0 * X(i, 0) + X(i, 1);
    ForestParams fp;
    fp.seed = 5;
    fp.n_trees = 50;
    const auto m = fit_random_forest(X, y, Task::regression, fp);
    const auto pred = predict(m, X);
    double sse = 0.0, sst = 0.0;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= 100.0;
    for (std::size_t i = 0; i < 100; ++i) {
        sse += (pred.values[i] - y[i]) * (pred.values[i] - y[i]);
        sst += (y[i] - mean) * (y[i] - mean);
    }
    CHECK(1.0 - sse / sst > 0.7);  // in-sample fit should be strong
}

TEST_CASE("gbt depth-0 single round with eta 1 predicts the mean exactly") {
    const Matrix X = testutil::random_matrix(30, 2, 3);
    Rng rng(4);
    std::vector<double> y(30);
    for (auto& v : y) v = rng.gaussian() * 2.0 + 1.0;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= 30.0;

    GbtParams gp;
    gp.n_rounds = 1;
    gp.eta = 1.0;
    gp.max_depth = 0;
    const auto m = fit_gbt(X, y, Task::regression, gp);
    const auto pred = predict(m, X);
    for (double v : pred.values) CHECK(v == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("gbt training logistic loss is non-increasing") {
    for (std::uint64_t seed : {1ULL, 17ULL, 99ULL}) {
        const std::size_t n = 80;
        Matrix X = testutil::random_matrix(n, 5, seed);
        Rng rng(seed + 1);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = X(i, 0) - 0.5 * X(i, 3) + 0.7 * rng.gaussian() > 0 ? 1.0 : 0.0;
        std::vector<double> trace;
        GbtParams gp;
        gp.n_rounds = 40;
        fit_gbt(X, y, Task::binary, gp, &trace);
        REQUIRE(trace.size() == 40);
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
    }
}

TEST_CASE("gbt split gain matches a hand computation") {
    // Six points, squared loss. After the base score (mean) the gradients are
    // (pred - y) and all hessians are 1. One feature separates {0,0,0} from
    // {6,6,6}: GL = 3*(3-0) ... with mean 3, g = 3 - y.
    const Matrix X = testutil::mat({{1}, {2}, {3}, {10}, {11}, {12}});
    const std::vector<double> y{0, 0, 0, 6, 6, 6};
    GbtParams gp;
    gp.n_rounds = 1;
    gp.eta = 1.0;
    gp.max_depth = 1;
    gp.reg_lambda = 1.0;
    gp.gamma = 0.0;
    const auto m = fit_gbt(X, y, Task::regression, gp);

    // hand: g = {3,3,3,-3,-3,-3}, h = 1 each; split at 6.5:
    // GL = 9, HL = 3, GR = -9, HR = 3, parent G = 0, H = 6
    // gain = 0.5*(81/4 + 81/4 - 0/7) = 20.25
    const auto imp = m.split_importance;
    REQUIRE(imp.size() == 1);
    CHECK(imp[0] == doctest::Approx(20.25).epsilon(1e-12));

    // and the split threshold is the midpoint of 3 and 10
    const auto& root = m.boosted[0][0].nodes[0];
    CHECK(root.feature == 0);
    CHECK(root.threshold == doctest::Approx(6.5));

    // leaf weights -G/(H+lambda): left -9/4, right 9/4 (eta = 1)
    const auto& left = m.boosted[0][0].nodes[static_cast<std::size_t>(root.left)];
    const auto& right = m.boosted[0][0].nodes[static_cast<std::size_t>(root.right)];
    CHECK(left.value == doctest::Approx(-9.0 / 4.0));
    CHECK(right.value == doctest::Approx(9.0 / 4.0));
}

TEST_CASE("gbt importances sum to one when any split occurred") {
    const Matrix X = testutil::random_matrix(60, 4, 91);
    std::vector<double> y(60);
    for (std::size_t i = 0; i < 60; ++i) y[i] = X(i, 2) > 0 ? 1.0 : 0.0;
    GbtParams gp;
    gp.n_rounds = 10;
    const auto m = fit_gbt(X, y, Task::binary, gp);
    const auto imp = feature_importance(m);
    double total = 0.0;
    for (double v : imp) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gbt rejects a single-class target") {
    const Matrix X = testutil::random_matrix(10, 2, 5);
    CHECK_THROWS_AS(fit_gbt(X, std::vector<double>(10, 0.0), Task::binary, {}), std::invalid_argument);
}

TEST_CASE("gbt handles multiclass one-vs-rest") {
    Matrix X(90, 2);
    std::vector<double> y(90);
    Rng rng(111);
    for (std::size_t i = 0; i < 90; ++i) {
        const auto cls = i % 3;
        y[i] = static_cast<double>(cls);
        X(i, 0) = static_cast<double>(cls) * 2.0 + 0.3 * rng.gaussian();
        X(i, 1) = rng.gaussian();
    }
    GbtParams gp;
    gp.n_rounds = 30;
    const auto m = fit_gbt(X, y, Task::multiclass, gp);
    CHECK(m.boosted.size() == 3);
    const auto pred = predict(m, X);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < 90; ++i) correct += pred.labels[i] == static_cast<int>(y[i]);
    CHECK(correct >= 85);
    CHECK(pred.scores.cols() == 3);
}

TEST_CASE("gbt regression fits a smooth signal") {
    const std::size_t n = 150;
    Matrix X = testutil::random_matrix(n, 3, 121);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(X(i, 0)) + 0.5 * X(i, 1);
    GbtParams gp;
    const auto m = fit_gbt(X, y, Task::regression, gp);
    const auto pred = predict(m, X);
    double sse = 0.0, sst = 0.0, mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        sse += (pred.values[i] - y[i]) * (pred.values[i] - y[i]);
        sst += (y[i] - mean) * (y[i] - mean);
    }
    CHECK(1.0 - sse / sst > 0.9);
}

TEST_CASE("tree fits are deterministic across repeated runs") {
    const Matrix X = testutil::random_matrix(70, 6, 131);
    std::vector<double> y(70);
    for (std::size_t i = 0; i < 70; ++i) y[i] = X(i, 1) - X(i, 4) > 0.2 ? 1.0 : 0.0;
    GbtParams gp;
    gp.n_rounds = 15;
    const auto a = fit_gbt(X, y, Task::binary, gp);
    const auto b = fit_gbt(X, y, Task::binary, gp);
    const Matrix Xt = testutil::random_matrix(25, 6, 132);
    const auto pa = predict(a, Xt);
    const auto pb = predict(b, Xt);
    CHECK(pa.labels == pb.labels);
    CHECK(pa.scores == pb.scores);
}
