#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "fsel/selectors.hpp"
#include "fsel/split.hpp"
#include "fsel/synthetic.hpp"
#include "test_util.hpp"

using namespace fsel;

TEST_CASE("variance_threshold") {
    SUBCASE("constant column dropped at threshold 0") {
        Matrix X = testutil::random_matrix(30, 3, 1);
        for (std::size_t r = 0; r < 30; ++r) X(r, 1) = 4.0;
        const auto res = variance_threshold(X, 0.0);
        CHECK(res.selected == std::vector<std::size_t>{0, 2});
        CHECK(res.scores[1] == 0.0);
    }
    SUBCASE("threshold below the minimum keeps everything") {
        const Matrix X = testutil::random_matrix(30, 4, 2);
        const auto res = variance_threshold(X, 1e-9);
        CHECK(res.selected.size() == 4);
    }
    SUBCASE("median threshold keeps exactly the above-median columns") {
        Matrix X(100, 5);
        Rng rng(3);
        const double scales[5] = {0.5, 1.0, 2.0, 4.0, 8.0};
        for (std::size_t r = 0; r < 100; ++r)
            for (std::size_t c = 0; c < 5; ++c) X(r, c) = scales[c] * rng.gaussian();
        // direct variance oracle
        std::vector<double> vars(5);
        for (std::size_t c = 0; c < 5; ++c) {
            const auto col = X.column(c);
            double mean = 0;
            for (double v : col) mean += v;
            mean /= 100.0;
            double ss = 0;
            for (double v : col) ss += (v - mean) * (v - mean);
            vars[c] = ss / 100.0;
        }
        auto sorted = vars;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[2];
        const auto res = variance_threshold(X, median);
        REQUIRE(res.selected.size() == 2);
        for (std::size_t c : res.selected) CHECK(vars[c] > median);
    }
    SUBCASE("removing every column is an error") {
        CHECK_THROWS_AS(variance_threshold(Matrix(10, 2, 1.0), 0.0), std::runtime_error);
    }
}

TEST_CASE("univariate scores") {
    SUBCASE("class-indicator feature has the top anova score") {
        const std::size_t n = 60;
        Matrix X = testutil::random_matrix(n, 4, 5);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? 1.0 : 0.0;
        for (std::size_t i = 0; i < n; ++i) X(i, 2) = y[i];  // identical to the indicator
        const auto scores = univariate_scores(X, y, Task::binary, ScoreFn::anova_f);
        const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
        CHECK(best == 2);
        CHECK(scores[2] == 1e12);  // perfect separation hits the documented cap
    }
    SUBCASE("independent feature has near-zero mutual information") {
        const std::size_t n = 5000;
        Matrix X = testutil::random_matrix(n, 1, 6);
        std::vector<double> y(n);
        Rng rng(7);
        for (auto& v : y) v = rng.below(2) ? 1.0 : 0.0;
        const auto scores = univariate_scores(X, y, Task::binary, ScoreFn::mutual_info);
        CHECK(scores[0] < 0.01);
    }
    SUBCASE("f_regression of y against y is capped") {
        const std::size_t n = 50;
        Matrix X(n, 1);
        std::vector<double> y(n);
        Rng rng(8);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.gaussian();
            X(i, 0) = y[i];
        }
        const auto scores = univariate_scores(X, y, Task::regression, ScoreFn::f_regression);
        CHECK(scores[0] == 1e12);
    }
    SUBCASE("anova rejects regression targets") {
        const Matrix X = testutil::random_matrix(20, 2, 9);
        CHECK_THROWS_AS(univariate_scores(X, std::vector<double>(20, 0.5), Task::regression,
                                          ScoreFn::anova_f),
                        std::invalid_argument);
    }
    SUBCASE("constant features score zero") {
        Matrix X(30, 2, 3.0);
        std::vector<double> y(30);
        for (std::size_t i = 0; i < 30; ++i) y[i] = i % 2 ? 1.0 : 0.0;
        for (std::size_t i = 0; i < 30; ++i) X(i, 1) = y[i] + 0.01 * static_cast<double>(i);
        const auto anova = univariate_scores(X, y, Task::binary, ScoreFn::anova_f);
        const auto mi = univariate_scores(X, y, Task::binary, ScoreFn::mutual_info);
        CHECK(anova[0] == 0.0);
        CHECK(mi[0] == 0.0);
    }
}

TEST_CASE("select_k_best") {
    SUBCASE("k = d is the identity selection") {
        const Matrix X = testutil::random_matrix(40, 5, 10);
        std::vector<double> y(40);
        for (std::size_t i = 0; i < 40; ++i) y[i] = i % 2 ? 1.0 : 0.0;
        const auto res = select_k_best(X, y, Task::binary, 5, ScoreFn::auto_select);
        std::set<std::size_t> sel(res.selected.begin(), res.selected.end());
        CHECK(sel == std::set<std::size_t>{0, 1, 2, 3, 4});
    }
    SUBCASE("planted informative recovery with anova at class_sep 3") {
        SyntheticSpec spec;
        spec.n_samples = 400;
        spec.n_features = 30;
        spec.n_informative = 5;
        spec.class_sep = 3.0;
        spec.seed = 77;
        const Dataset d = generate_synthetic(spec);
        const auto res = select_k_best(d.features, d.target, d.task, 5, ScoreFn::anova_f);
        const std::set<std::size_t> sel(res.selected.begin(), res.selected.end());
        const std::set<std::size_t> truth(d.informative_truth->begin(), d.informative_truth->end());
        CHECK(sel == truth);
    }
    SUBCASE("selected sorted by descending score") {
        const Matrix X = testutil::random_matrix(50, 6, 11);
        std::vector<double> y(50);
        for (std::size_t i = 0; i < 50; ++i) y[i] = i % 2 ? 1.0 : 0.0;
        const auto res = select_k_best(X, y, Task::binary, 4, ScoreFn::anova_f);
        for (std::size_t i = 1; i < res.selected.size(); ++i)
            CHECK(res.scores[res.selected[i - 1]] >= res.scores[res.selected[i]]);
    }
    SUBCASE("k out of range") {
        const Matrix X = testutil::random_matrix(20, 3, 12);
        std::vector<double> y(20);
        for (std::size_t i = 0; i < 20; ++i) y[i] = i % 2 ? 1.0 : 0.0;
        CHECK_THROWS_AS(select_k_best(X, y, Task::binary, 0, ScoreFn::auto_select),
                        std::invalid_argument);
        CHECK_THROWS_AS(select_k_best(X, y, Task::binary, 4, ScoreFn::auto_select),
                        std::invalid_argument);
    }
    SUBCASE("argtop-k is invariant under strictly monotone score transforms") {
        const Matrix X = testutil::random_matrix(60, 8, 13);
        std::vector<double> y(60);
        for (std::size_t i = 0; i < 60; ++i) y[i] = i % 2 ? 1.0 : 0.0;
        const auto res = select_k_best(X, y, Task::binary, 3, ScoreFn::anova_f);
        // recompute top-3 from transformed scores with the same tie rule
        auto scores = univariate_scores(X, y, Task::binary, ScoreFn::anova_f);
        for (auto& s : scores) s = std::exp(s / 1e12 * 3.0) + 5.0;
        std::vector<std::size_t> order(scores.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return a < b;
        });
        const std::set<std::size_t> a(res.selected.begin(), res.selected.end());
        const std::set<std::size_t> b(order.begin(), order.begin() + 3);
        CHECK(a == b);
    }
}

TEST_CASE("model_select") {
    SUBCASE("lasso at lambda_max surfaces the empty-selection error") {
        Matrix X = testutil::random_matrix(50, 4, 14);
        testutil::standardize_in_place(X);
        std::vector<double> y(50);
        Rng rng(15);
        for (std::size_t i = 0; i < 50; ++i) y[i] = X(i, 0) + 0.1 * rng.gaussian();
        // lambda_max oracle
        double lambda_max = 0.0;
        double mean_y = 0.0;
        for (double v : y) mean_y += v;
        mean_y /= 50.0;
        for (std::size_t c = 0; c < 4; ++c) {
            double dot = 0.0;
            for (std::size_t i = 0; i < 50; ++i) dot += X(i, c) * (y[i] - mean_y);
            lambda_max = std::max(lambda_max, std::abs(dot) / 50.0);
        }
        EstimatorSpec spec = EstimatorSpec::of(Algorithm::elastic_net);
        spec.elastic_net.lambda = lambda_max * 1.01;
        CHECK_THROWS_AS(model_select(X, y, Task::regression, spec), std::runtime_error);
    }
    SUBCASE("forest picks the dominant feature") {
        const std::size_t n = 150;
        Matrix X = testutil::random_matrix(n, 6, 16);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = X(i, 3) > 0 ? 1.0 : 0.0;
        EstimatorSpec spec = EstimatorSpec::of(Algorithm::random_forest);
        spec.forest.seed = 4;
        const auto res = model_select(X, y, Task::binary, spec);
        CHECK(std::find(res.selected.begin(), res.selected.end(), 3) != res.selected.end());
        CHECK(res.selected.front() == 3);  // ordered by descending importance
    }
    SUBCASE("pure ridge is rejected") {
        Matrix X = testutil::random_matrix(30, 3, 17);
        testutil::standardize_in_place(X);
        EstimatorSpec spec = EstimatorSpec::of(Algorithm::elastic_net);
        spec.elastic_net.l1_ratio = 0.0;
        CHECK_THROWS_AS(model_select(X, std::vector<double>(30, 1.0), Task::regression, spec),
                        std::invalid_argument);
    }
    SUBCASE("unsupported estimator is rejected") {
        const Matrix X = testutil::random_matrix(20, 2, 18);
        CHECK_THROWS_AS(model_select(X, std::vector<double>(20, 1.0), Task::regression,
                                     EstimatorSpec::of(Algorithm::ols)),
                        std::invalid_argument);
    }
}

TEST_CASE("rfe") {
    SUBCASE("zero-weight feature is eliminated first") {
        Matrix X = testutil::random_matrix(80, 3, 19);
        testutil::standardize_in_place(X);
        std::vector<double> y(80);
        for (std::size_t i = 0; i < 80; ++i) y[i] = 5.0 * X(i, 0) + 1.0 * X(i, 1);
        const auto res = rfe(X, y, Task::regression, EstimatorSpec::of(Algorithm::ols), 2, 0.1);
        CHECK(res.ranks[2] == 0);  // dropped in the very first elimination
        std::set<std::size_t> sel(res.selected.begin(), res.selected.end());
        CHECK(sel == std::set<std::size_t>{0, 1});
    }
    SUBCASE("step 1.0 clamps to a single round reaching the target") {
        Matrix X = testutil::random_matrix(60, 8, 20);
        testutil::standardize_in_place(X);
        std::vector<double> y(60);
        for (std::size_t i = 0; i < 60; ++i) y[i] = X(i, 0) - X(i, 5);
        const auto res = rfe(X, y, Task::regression, EstimatorSpec::of(Algorithm::ols), 3, 1.0);
        CHECK(res.selected.size() == 3);
        CHECK(res.stage_trace.size() == 1);  // one elimination round
    }
    SUBCASE("n_target = d-1 removes the argmin-importance feature of the first fit") {
        Matrix X = testutil::random_matrix(70, 5, 21);
        testutil::standardize_in_place(X);
        std::vector<double> y(70);
        Rng rng(22);
        for (std::size_t i = 0; i < 70; ++i)
            y[i] = 2.0 * X(i, 0) + 1.0 * X(i, 1) + 0.5 * X(i, 2) + 0.2 * X(i, 3) +
                   0.01 * X(i, 4) + 0.05 * rng.gaussian();
        const auto spec = EstimatorSpec::of(Algorithm::ols);
        const auto first_fit = fit(spec, X, y, Task::regression);
        const auto imp = feature_importance(first_fit);
        const auto argmin = std::min_element(imp.begin(), imp.end()) - imp.begin();
        const auto res = rfe(X, y, Task::regression, spec, 4, 0.1);
        CHECK(std::find(res.selected.begin(), res.selected.end(), static_cast<std::size_t>(argmin)) ==
              res.selected.end());
    }
    SUBCASE("planted recovery with the gbt estimator") {
        std::size_t hits = 0;
        const std::size_t seeds = 5;
        for (std::uint64_t seed = 0; seed < seeds; ++seed) {
            SyntheticSpec spec;
            spec.n_samples = 250;
            spec.n_features = 100;
            spec.n_informative = 10;
            spec.class_sep = 2.0;
            spec.seed = 100 + seed;
            const Dataset d = generate_synthetic(spec);
            EstimatorSpec est = EstimatorSpec::of(Algorithm::gbt);
            est.gbt.n_rounds = 50;
            const auto res = rfe(d.features, d.target, d.task, est, 10, 0.1);
            const std::set<std::size_t> truth(d.informative_truth->begin(),
                                              d.informative_truth->end());
            std::size_t found = 0;
            for (std::size_t s : res.selected) found += truth.count(s);
            CHECK(found >= 8);
            hits += found;
        }
        CHECK(hits >= 8 * seeds);
    }
    SUBCASE("bad arguments") {
        const Matrix X = testutil::random_matrix(20, 4, 23);
        const std::vector<double> y(20, 1.0);
        CHECK_THROWS_AS(rfe(X, y, Task::regression, EstimatorSpec::of(Algorithm::ols), 4, 0.1),
                        std::invalid_argument);
        CHECK_THROWS_AS(rfe(X, y, Task::regression, EstimatorSpec::of(Algorithm::ols), 2, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("forward_select") {
    SUBCASE("a perfect predictor is chosen first") {
        Matrix X = testutil::random_matrix(60, 5, 24);
        std::vector<double> y(60);
        for (std::size_t i = 0; i < 60; ++i) y[i] = X(i, 3);  // feature 3 IS the target
        const auto res =
            forward_select(X, y, Task::regression, EstimatorSpec::of(Algorithm::ols), 3, 1e-4, 3, 1);
        REQUIRE(!res.selected.empty());
        CHECK(res.selected.front() == 3);
        CHECK(res.ranks[3] == 0);
    }
    SUBCASE("epsilon = infinity selects exactly one feature") {
        Matrix X = testutil::random_matrix(60, 4, 25);
        std::vector<double> y(60);
        for (std::size_t i = 0; i < 60; ++i) y[i] = X(i, 1) + 0.1 * X(i, 2);
        const auto res = forward_select(X, y, Task::regression, EstimatorSpec::of(Algorithm::ols), 4,
                                        std::numeric_limits<double>::infinity(), 3, 2);
        CHECK(res.selected.size() == 1);
    }
    SUBCASE("xor pair with noise features, matched against an exhaustive oracle") {
        // y = x0 XOR x1 with P(x1=1) = 0.3, so x0 alone carries marginal signal
        // and the pair is perfect; four more columns are pure noise.
        const std::size_t n = 240;
        Matrix X(n, 6);
        std::vector<double> y(n);
        Rng rng(26);
        for (std::size_t i = 0; i < n; ++i) {
            const int x0 = static_cast<int>(i % 2);
            const int x1 = rng.uniform() < 0.3 ? 1 : 0;
            X(i, 0) = x0;
            X(i, 1) = x1;
            for (std::size_t c = 2; c < 6; ++c) X(i, c) = rng.gaussian();
            y[i] = (x0 ^ x1) ? 1.0 : 0.0;
        }
        EstimatorSpec est = EstimatorSpec::of(Algorithm::cart);
        est.cart.max_depth = 3;
        est.cart.min_leaf = 1;
        const auto res = forward_select(X, y, Task::binary, est, 2, 1e-4, 3, 5);
        std::set<std::size_t> sel(res.selected.begin(), res.selected.end());
        CHECK(sel == std::set<std::size_t>{0, 1});

        // exhaustive 2-subset oracle over all 15 pairs with the same folds
        double best_pair_score = -1.0;
        std::set<std::size_t> best_pair;
        for (std::size_t a = 0; a < 6; ++a)
            for (std::size_t b = a + 1; b < 6; ++b) {
                const std::vector<std::size_t> cols{a, b};
                const Matrix sub = X.take_columns(cols);
                const auto r =
                    forward_select(sub, y, Task::binary, est, 2, -1e9, 3, 5);  // forced 2 picks
                const double score = r.stage_trace.back().score;
                if (score > best_pair_score) {
                    best_pair_score = score;
                    best_pair = {a, b};
                }
            }
        CHECK(best_pair == sel);
    }
    SUBCASE("trace is non-decreasing up to the stop") {
        SyntheticSpec spec;
        spec.n_samples = 150;
        spec.n_features = 12;
        spec.n_informative = 4;
        spec.seed = 31;
        const Dataset d = generate_synthetic(spec);
        EstimatorSpec est = EstimatorSpec::of(Algorithm::cart);
        const auto res = forward_select(d.features, d.target, d.task, est, 8, 1e-4, 3, 7);
        for (std::size_t i = 1; i < res.stage_trace.size(); ++i)
            CHECK(res.stage_trace[i].score >= res.stage_trace[i - 1].score);
    }
    SUBCASE("thread count does not change the result") {
        SyntheticSpec spec;
        spec.n_samples = 120;
        spec.n_features = 10;
        spec.n_informative = 3;
        spec.seed = 32;
        const Dataset d = generate_synthetic(spec);
        EstimatorSpec est = EstimatorSpec::of(Algorithm::cart);
        const auto one = forward_select(d.features, d.target, d.task, est, 4, 1e-4, 3, 9, 1);
        const auto eight = forward_select(d.features, d.target, d.task, est, 4, 1e-4, 3, 9, 8);
        CHECK(one.selected == eight.selected);
        CHECK(one.scores == eight.scores);
    }
}

TEST_CASE("frame") {
    SUBCASE("pool = d is exactly forward selection") {
        SyntheticSpec spec;
        spec.n_samples = 100;
        spec.n_features = 8;
        spec.n_informative = 3;
        spec.seed = 41;
        const Dataset d = generate_synthetic(spec);

        SelectorConfig cfg;
        cfg.method = SelectorMethod::frame;
        cfg.k = 4;
        cfg.frame_pool = 8;
        cfg.estimator = EstimatorSpec::of(Algorithm::gbt);
        cfg.estimator.gbt.n_rounds = 25;
        cfg.seed = 5;
        const auto fr = frame_select(d.features, d.target, d.task, cfg);
        const auto fw = forward_select(d.features, d.target, d.task, cfg.estimator, cfg.k, cfg.epsilon,
                                       cfg.cv_folds, cfg.seed);
        CHECK(fr.selected == fw.selected);
    }
    SUBCASE("medium-width binary run stops early with a monotone stage-2 trace") {
        SyntheticSpec spec;
        spec.n_samples = 300;
        spec.n_features = 111;
        spec.n_informative = 8;
        spec.class_sep = 2.0;
        spec.seed = 42;
        const Dataset d = generate_synthetic(spec);

        SelectorConfig cfg;
        cfg.method = SelectorMethod::frame;
        cfg.k = 20;
        cfg.estimator = EstimatorSpec::of(Algorithm::gbt);
        cfg.estimator.gbt.n_rounds = 40;
        cfg.seed = 7;
        const auto res = frame_select(d.features, d.target, d.task, cfg);
        CHECK(res.selected.size() <= 20);
        std::vector<double> stage2;
        for (const auto& rec : res.stage_trace)
            if (rec.stage == "forward") stage2.push_back(rec.score);
        for (std::size_t i = 1; i < stage2.size(); ++i) CHECK(stage2[i] >= stage2[i - 1]);
        CHECK(res.elapsed_seconds > 0.0);
    }
    SUBCASE("pool smaller than k is rejected") {
        const Matrix X = testutil::random_matrix(40, 10, 43);
        std::vector<double> y(40);
        for (std::size_t i = 0; i < 40; ++i) y[i] = i % 2 ? 1.0 : 0.0;
        SelectorConfig cfg;
        cfg.method = SelectorMethod::frame;
        cfg.k = 5;
        cfg.frame_pool = 3;
        CHECK_THROWS_AS(frame_select(X, y, Task::binary, cfg), std::invalid_argument);
    }
}

TEST_CASE("run_selector dispatch, determinism, and bounds") {
    SyntheticSpec spec;
    spec.n_samples = 120;
    spec.n_features = 15;
    spec.n_informative = 4;
    spec.seed = 51;
    const Dataset d = generate_synthetic(spec);

    std::vector<SelectorConfig> configs;
    {
        SelectorConfig c;
        c.method = SelectorMethod::variance_threshold;
        c.threshold = 0.5;
        configs.push_back(c);
        c = {};
        c.method = SelectorMethod::select_k_best;
        c.k = 5;
        configs.push_back(c);
        c = {};
        c.method = SelectorMethod::mutual_info;
        c.k = 5;
        configs.push_back(c);
        c = {};
        c.method = SelectorMethod::model_select;
        c.estimator = EstimatorSpec::of(Algorithm::random_forest);
        c.estimator.forest.n_trees = 30;
        c.estimator.forest.seed = 2;
        configs.push_back(c);
        c = {};
        c.method = SelectorMethod::rfe;
        c.k = 5;
        c.estimator = EstimatorSpec::of(Algorithm::gbt);
        c.estimator.gbt.n_rounds = 20;
        configs.push_back(c);
        c = {};
        c.method = SelectorMethod::forward;
        c.k = 4;
        c.estimator = EstimatorSpec::of(Algorithm::cart);
        c.seed = 3;
        configs.push_back(c);
        c = {};
        c.method = SelectorMethod::frame;
        c.k = 4;
        c.estimator = EstimatorSpec::of(Algorithm::gbt);
        c.estimator.gbt.n_rounds = 20;
        c.seed = 4;
        configs.push_back(c);
    }

    for (const auto& cfg : configs) {
        CAPTURE(to_string(cfg.method));
        const auto a = run_selector(cfg, d.features, d.target, d.task);
        const auto b = run_selector(cfg, d.features, d.target, d.task);
        CHECK(a.selected == b.selected);
        CHECK(a.scores == b.scores);
        CHECK(a.elapsed_seconds >= 0.0);

        std::set<std::size_t> uniq(a.selected.begin(), a.selected.end());
        CHECK(uniq.size() == a.selected.size());
        for (std::size_t s : a.selected) CHECK(s < d.n_cols());
    }
}
