#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "fsel/metrics.hpp"
#include "fsel/rng.hpp"
#include "test_util.hpp"

using namespace fsel;

namespace {

// O(n^2) pair-counting oracle with half credit for ties.
double auc_pair_oracle(const std::vector<int>& y, const std::vector<double>& s) {
    double concordant = 0.0, ties = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? n_pos : n_neg) += 1;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] == 1) continue;
            if (s[i] > s[j]) concordant += 1.0;
            else if (s[i] == s[j]) ties += 1.0;
        }
    }
    return (concordant + 0.5 * ties) / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace

TEST_CASE("regression metrics basics") {
    SUBCASE("perfect prediction") {
        const std::vector<double> y{1, 2, 3};
        const auto m = regression_metrics(y, y);
        CHECK(m.r2 == doctest::Approx(1.0));
        CHECK(m.mse == 0.0);
        CHECK(m.rmse == 0.0);
        CHECK(m.mae == 0.0);
        CHECK(m.mape_percent == doctest::Approx(0.0));
    }
    SUBCASE("constant mean prediction has R2 = 0") {
        const std::vector<double> y{1, 2, 3, 6};
        const std::vector<double> p(4, 3.0);  // mean of y
        CHECK(regression_metrics(y, p).r2 == doctest::Approx(0.0));
    }
    SUBCASE("hand-computed errors") {
        const std::vector<double> y{1, 2, 3};
        const std::vector<double> p{1, 2, 5};
        const auto m = regression_metrics(y, p);
        CHECK(m.mse == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        CHECK(m.rmse == doctest::Approx(1.1547).epsilon(1e-4));
        CHECK(m.mae == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(m.rmse == doctest::Approx(std::sqrt(m.mse)).epsilon(1e-12));
    }
    SUBCASE("msle omitted when values dip below -1") {
        const std::vector<double> y{-2, 2, 3};
        const std::vector<double> p{-1.5, 2, 3};
        CHECK_FALSE(regression_metrics(y, p).msle.has_value());
        const std::vector<double> ok_y{0, 2, 3};
        CHECK(regression_metrics(ok_y, ok_y).msle.has_value());
    }
    SUBCASE("length mismatch throws") {
        CHECK_THROWS_AS(regression_metrics(std::vector<double>{1, 2}, std::vector<double>{1}),
                        std::invalid_argument);
    }
}

TEST_CASE("regression metrics translation invariance") {
    Rng rng(77);
    std::vector<double> y(30), p(30);
    for (std::size_t i = 0; i < 30; ++i) {
        y[i] = rng.gaussian() * 3.0;
        p[i] = y[i] + 0.4 * rng.gaussian();
    }
    const auto base = regression_metrics(y, p);
    std::vector<double> ys = y, ps = p;
    for (std::size_t i = 0; i < 30; ++i) {
        ys[i] += 11.5;
        ps[i] += 11.5;
    }
    const auto shifted = regression_metrics(ys, ps);
    CHECK(shifted.mse == doctest::Approx(base.mse).epsilon(1e-12));
    CHECK(shifted.rmse == doctest::Approx(base.rmse).epsilon(1e-12));
    CHECK(shifted.mae == doctest::Approx(base.mae).epsilon(1e-12));
}

TEST_CASE("classification metrics") {
    SUBCASE("perfect binary prediction") {
        const std::vector<int> y{0, 1, 0, 1};
        const auto m = classification_metrics(y, y);
        CHECK(m.accuracy == 1.0);
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == 1.0);
    }
    SUBCASE("all-one-class prediction on a 60/40 dataset") {
        std::vector<int> y(10, 0);
        for (std::size_t i = 6; i < 10; ++i) y[i] = 1;
        const std::vector<int> pred(10, 0);
        const auto m = classification_metrics(y, pred);
        CHECK(m.accuracy == doctest::Approx(0.6));
        CHECK(m.recall == doctest::Approx(0.6));  // weighted recall == accuracy
        // majority class: precision 0.6, recall 1; minority: 0/0 -> 0
        CHECK(m.precision == doctest::Approx(0.6 * 0.6 + 0.4 * 0.0));
    }
    SUBCASE("unseen predicted codes count as mistakes") {
        const std::vector<int> y{0, 1, 0, 1};
        const std::vector<int> pred{0, 1, 3, 1};
        const auto m = classification_metrics(y, pred);
        CHECK(m.accuracy == doctest::Approx(0.75));
    }
}

TEST_CASE("weighted recall equals accuracy on fuzzed confusion matrices") {
    Rng rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 20 + rng.below(60);
        const int n_classes = 2 + static_cast<int>(rng.below(4));
        std::vector<int> y(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = static_cast<int>(rng.below(static_cast<std::size_t>(n_classes)));
            pred[i] = static_cast<int>(rng.below(static_cast<std::size_t>(n_classes)));
        }
        const auto m = classification_metrics(y, pred);
        CHECK(m.recall == doctest::Approx(m.accuracy).epsilon(1e-12));
    }
}

TEST_CASE("auc_roc basics") {
    SUBCASE("perfect ranking") {
        const std::vector<int> y{0, 0, 1, 1};
        const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
        CHECK(auc_roc(y, s) == doctest::Approx(1.0));
    }
    SUBCASE("all scores tied gives exactly one half") {
        const std::vector<int> y{0, 1, 0, 1, 1};
        const std::vector<double> s(5, 0.5);
        CHECK(auc_roc(y, s) == 0.5);
    }
    SUBCASE("six points with one inversion matches the pair oracle") {
        const std::vector<int> y{0, 0, 0, 1, 1, 1};
        const std::vector<double> s{0.1, 0.2, 0.6, 0.5, 0.7, 0.9};
        CHECK(auc_roc(y, s) == doctest::Approx(auc_pair_oracle(y, s)).epsilon(1e-12));
    }
    SUBCASE("single-class input throws") {
        CHECK_THROWS_AS(auc_roc(std::vector<int>{1, 1}, std::vector<double>{0.5, 0.25}),
                        std::invalid_argument);
    }
}

TEST_CASE("auc_roc matches the O(n^2) oracle on fuzzed instances") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.below(47);
        std::vector<int> y(n);
        std::vector<double> s(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform() < 0.4 ? 1 : 0;
            (y[i] == 1 ? has_pos : has_neg) = true;
            s[i] = rng.uniform() < 0.3 ? 0.5 : rng.uniform();  // force frequent ties
        }
        if (!has_pos) y[0] = 1;
        if (!has_neg) y[n - 1] = 0;
        CHECK(auc_roc(y, s) == doctest::Approx(auc_pair_oracle(y, s)).epsilon(1e-12));
    }
}

TEST_CASE("auc_roc symmetry and monotone invariance") {
    Rng rng(55);
    std::vector<int> y(40);
    std::vector<double> s(40);
    for (std::size_t i = 0; i < 40; ++i) {
        y[i] = static_cast<int>(rng.below(2));
        s[i] = rng.gaussian();
    }
    y[0] = 1;
    y[1] = 0;
    std::vector<double> neg(40), warped(40);
    for (std::size_t i = 0; i < 40; ++i) {
        neg[i] = -s[i];
        warped[i] = std::exp(2.0 * s[i]) + 3.0;  // strictly increasing transform
    }
    CHECK(auc_roc(y, s) == doctest::Approx(1.0 - auc_roc(y, neg)).epsilon(1e-12));
    CHECK(auc_roc(y, s) == doctest::Approx(auc_roc(y, warped)).epsilon(1e-12));
}

TEST_CASE("multiclass one-vs-rest auc") {
    const std::vector<int> y{0, 1, 2, 0, 1, 2};
    Matrix scores(6, 3, 0.1);
    for (std::size_t i = 0; i < 6; ++i) scores(i, static_cast<std::size_t>(y[i])) = 0.9;
    CHECK(auc_roc_ovr(y, scores) == doctest::Approx(1.0));
    const auto rep = classification_metrics(y, y, &scores);
    REQUIRE(rep.auc_roc.has_value());
    CHECK(*rep.auc_roc == doctest::Approx(1.0));
}
