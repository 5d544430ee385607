#include "fsel/selectors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fsel/metrics.hpp"
#include "fsel/parallel.hpp"
#include "fsel/split.hpp"

namespace fsel {

std::string to_string(SelectorMethod m) {
    switch (m) {
        case SelectorMethod::variance_threshold: return "variance_threshold";
        case SelectorMethod::select_k_best: return "select_k_best";
        case SelectorMethod::mutual_info: return "mutual_info";
        case SelectorMethod::model_select: return "model_select";
        case SelectorMethod::rfe: return "rfe";
        case SelectorMethod::forward: return "forward";
        case SelectorMethod::frame: return "frame";
    }
    return "?";
}

SelectorMethod selector_method_from_string(const std::string& s) {
    if (s == "variance_threshold") return SelectorMethod::variance_threshold;
    if (s == "select_k_best") return SelectorMethod::select_k_best;
    if (s == "mutual_info") return SelectorMethod::mutual_info;
    if (s == "model_select") return SelectorMethod::model_select;
    if (s == "rfe") return SelectorMethod::rfe;
    if (s == "forward") return SelectorMethod::forward;
    if (s == "frame") return SelectorMethod::frame;
    throw std::invalid_argument("unknown selector method: " + s);
}

std::string to_string(ScoreFn f) {
    switch (f) {
        case ScoreFn::auto_select: return "auto";
        case ScoreFn::anova_f: return "anova_f";
        case ScoreFn::f_regression: return "f_regression";
        case ScoreFn::mutual_info: return "mutual_info";
    }
    return "?";
}

ScoreFn score_fn_from_string(const std::string& s) {
    if (s == "auto") return ScoreFn::auto_select;
    if (s == "anova_f") return ScoreFn::anova_f;
    if (s == "f_regression") return ScoreFn::f_regression;
    if (s == "mutual_info") return ScoreFn::mutual_info;
    throw std::invalid_argument("unknown score function: " + s);
}

namespace {

constexpr double kFCap = 1e12;

std::vector<double> column_variances(const Matrix& X) {
    const std::size_t n = X.rows(), d = X.cols();
    std::vector<double> vars(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += X(r, c);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dev = X(r, c) - mean;
            ss += dev * dev;
        }
        vars[c] = ss / static_cast<double>(n);
    }
    return vars;
}

// Feature order: descending score, ties to the lowest index.
std::vector<std::size_t> order_by_score(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return order;
}

// 10 equal-frequency bins; cut values collapse ties into the lower bin, so
// heavily tied columns simply use fewer bins.
std::vector<int> equal_frequency_bins(std::span<const double> values, std::size_t n_bins) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> cuts;
    for (std::size_t k = 1; k < n_bins; ++k) {
        const std::size_t pos = n * k / n_bins;
        if (pos == 0 || pos >= n) continue;
        cuts.push_back(sorted[pos - 1]);
    }
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<int> bins(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = std::lower_bound(cuts.begin(), cuts.end(), values[i]);
        bins[i] = static_cast<int>(it - cuts.begin());
    }
    return bins;
}

double plugin_mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    int max_a = 0, max_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        max_a = std::max(max_a, a[i]);
        max_b = std::max(max_b, b[i]);
    }
    const std::size_t ca = static_cast<std::size_t>(max_a) + 1;
    const std::size_t cb = static_cast<std::size_t>(max_b) + 1;
    std::vector<double> joint(ca * cb, 0.0), pa(ca, 0.0), pb(cb, 0.0);
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        joint[static_cast<std::size_t>(a[i]) * cb + static_cast<std::size_t>(b[i])] += w;
        pa[static_cast<std::size_t>(a[i])] += w;
        pb[static_cast<std::size_t>(b[i])] += w;
    }
    double mi = 0.0;
    for (std::size_t i = 0; i < ca; ++i)
        for (std::size_t j = 0; j < cb; ++j) {
            const double p = joint[i * cb + j];
            if (p > 0.0) mi += p * std::log(p / (pa[i] * pb[j]));
        }
    return std::max(mi, 0.0);
}

double anova_f_statistic(std::span<const double> x, const std::vector<int>& codes,
                         std::size_t n_classes) {
    const std::size_t n = x.size();
    double grand = 0.0;
    for (double v : x) grand += v;
    grand /= static_cast<double>(n);

    std::vector<double> class_sum(n_classes, 0.0);
    std::vector<std::size_t> class_n(n_classes, 0);
    for (std::size_t i = 0; i < n; ++i) {
        class_sum[static_cast<std::size_t>(codes[i])] += x[i];
        ++class_n[static_cast<std::size_t>(codes[i])];
    }
    double between = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (class_n[c] == 0) continue;
        const double mean_c = class_sum[c] / static_cast<double>(class_n[c]);
        between += static_cast<double>(class_n[c]) * (mean_c - grand) * (mean_c - grand);
    }
    double within = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(codes[i]);
        const double mean_c = class_sum[c] / static_cast<double>(class_n[c]);
        within += (x[i] - mean_c) * (x[i] - mean_c);
    }
    const double df_between = static_cast<double>(n_classes) - 1.0;
    const double df_within = static_cast<double>(n) - static_cast<double>(n_classes);
    const double num = between / df_between;
    const double den = within / df_within;
    if (den <= 0.0) return num > 0.0 ? kFCap : 0.0;
    return std::min(num / den, kFCap);
}

double f_regression_statistic(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    const double r2 = std::min((sxy * sxy) / (sxx * syy), 1.0);
    if (r2 >= 1.0) return kFCap;
    return std::min(r2 * (static_cast<double>(n) - 2.0) / (1.0 - r2), kFCap);
}

ScoreFn resolve_score_fn(ScoreFn fn, Task task) {
    if (fn != ScoreFn::auto_select) return fn;
    return task == Task::regression ? ScoreFn::f_regression : ScoreFn::anova_f;
}

}  // namespace

SelectionResult variance_threshold(const Matrix& X, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("variance_threshold: threshold must be >= 0");
    SelectionResult res;
    res.scores = column_variances(X);
    for (std::size_t c = 0; c < res.scores.size(); ++c)
        if (res.scores[c] > threshold) res.selected.push_back(c);
    if (res.selected.empty())
        throw std::runtime_error("variance_threshold: every column fell at or below the threshold");
    const auto order = order_by_score(res.scores);
    res.ranks.assign(res.scores.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) res.ranks[order[pos]] = static_cast<int>(pos);
    res.stage_trace.push_back({"variance_threshold", res.selected.size(), threshold});
    return res;
}

std::vector<double> univariate_scores(const Matrix& X, std::span<const double> y, Task task, ScoreFn fn) {
    const std::size_t n = X.rows(), d = X.cols();
    if (n != y.size()) throw std::invalid_argument("univariate_scores: length mismatch");
    fn = resolve_score_fn(fn, task);

    std::vector<double> scores(d, 0.0);
    switch (fn) {
        case ScoreFn::anova_f: {
            if (task == Task::regression)
                throw std::invalid_argument("anova_f requires a classification target");
            std::vector<int> codes(n);
            std::size_t n_classes = 0;
            for (std::size_t i = 0; i < n; ++i) {
                codes[i] = static_cast<int>(y[i]);
                n_classes = std::max(n_classes, static_cast<std::size_t>(codes[i]) + 1);
            }
            if (n <= n_classes)
                throw std::invalid_argument("anova_f: need more samples than classes");
            for (std::size_t c = 0; c < d; ++c) scores[c] = anova_f_statistic(X.column(c), codes, n_classes);
            return scores;
        }
        case ScoreFn::f_regression: {
            if (n < 3) throw std::invalid_argument("f_regression: need at least 3 samples");
            for (std::size_t c = 0; c < d; ++c) scores[c] = f_regression_statistic(X.column(c), y);
            return scores;
        }
        case ScoreFn::mutual_info: {
            constexpr std::size_t kBins = 10;
            std::vector<int> target_bins;
            if (task == Task::regression) {
                target_bins = equal_frequency_bins(y, kBins);
            } else {
                target_bins.resize(n);
                for (std::size_t i = 0; i < n; ++i) target_bins[i] = static_cast<int>(y[i]);
            }
            for (std::size_t c = 0; c < d; ++c) {
                const auto col = X.column(c);
                if (std::all_of(col.begin(), col.end(), [&](double v) { return v == col[0]; })) continue;
                scores[c] = plugin_mutual_information(equal_frequency_bins(col, kBins), target_bins);
            }
            return scores;
        }
        case ScoreFn::auto_select: break;
    }
    throw std::logic_error("univariate_scores: unresolved score function");
}

SelectionResult select_k_best(const Matrix& X, std::span<const double> y, Task task, std::size_t k,
                              ScoreFn fn) {
    const std::size_t d = X.cols();
    if (k < 1 || k > d) throw std::invalid_argument("select_k_best: k out of range [1, d]");
    SelectionResult res;
    res.scores = univariate_scores(X, y, task, fn);
    const auto order = order_by_score(res.scores);
    res.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    res.ranks.assign(d, 0);
    for (std::size_t pos = 0; pos < d; ++pos) res.ranks[order[pos]] = static_cast<int>(pos);
    res.stage_trace.push_back({"select_k_best", k, res.scores[res.selected.front()]});
    return res;
}

SelectionResult model_select(const Matrix& X, std::span<const double> y, Task task,
                             const EstimatorSpec& estimator) {
    SelectionResult res;
    const std::size_t d = X.cols();
    switch (estimator.algorithm) {
        case Algorithm::elastic_net: {
            if (estimator.elastic_net.l1_ratio <= 0.0)
                throw std::invalid_argument(
                    "model_select: pure ridge produces no exact zeros; use l1_ratio > 0");
            // Classification codes are regressed on directly, the usual trick
            // for lasso-based selection.
            const auto model = fit_elastic_net(X, y, estimator.elastic_net);
            res.scores.resize(d);
            for (std::size_t c = 0; c < d; ++c) res.scores[c] = std::abs(model.linear[0].coef[c]);
            for (std::size_t c : order_by_score(res.scores))
                if (res.scores[c] > 0.0) res.selected.push_back(c);
            break;
        }
        case Algorithm::random_forest:
        case Algorithm::gbt: {
            const auto model = fit(estimator, X, y, task);
            res.scores = feature_importance(model);
            const double mean =
                std::accumulate(res.scores.begin(), res.scores.end(), 0.0) / static_cast<double>(d);
            for (std::size_t c : order_by_score(res.scores))
                if (res.scores[c] > mean) res.selected.push_back(c);
            break;
        }
        default:
            throw std::invalid_argument("model_select: estimator must be elastic_net, random_forest or gbt");
    }
    if (res.selected.empty()) throw std::runtime_error("model_select: selection came back empty");
    res.ranks.assign(d, 0);
    const auto order = order_by_score(res.scores);
    for (std::size_t pos = 0; pos < d; ++pos) res.ranks[order[pos]] = static_cast<int>(pos);
    res.stage_trace.push_back({"model_select", res.selected.size(), res.scores[res.selected.front()]});
    return res;
}

SelectionResult rfe(const Matrix& X, std::span<const double> y, Task task, const EstimatorSpec& estimator,
                    std::size_t n_target, double step_fraction) {
    const std::size_t d = X.cols();
    if (n_target < 1 || n_target >= d) throw std::invalid_argument("rfe: need 1 <= n_target < d");
    if (step_fraction <= 0.0 || step_fraction > 1.0)
        throw std::invalid_argument("rfe: step_fraction outside (0, 1]");

    SelectionResult res;
    res.scores.assign(d, 0.0);
    res.ranks.assign(d, 0);

    std::vector<std::size_t> surviving(d);
    std::iota(surviving.begin(), surviving.end(), std::size_t{0});
    int elimination = 0;
    std::vector<double> last_importance;

    while (surviving.size() > n_target) {
        const Matrix Xs = X.take_columns(surviving);
        const auto model = fit(estimator, Xs, y, task);
        const auto importance = feature_importance(model);
        for (std::size_t p = 0; p < surviving.size(); ++p) res.scores[surviving[p]] = importance[p];

        std::size_t drop = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(step_fraction * static_cast<double>(surviving.size()))));
        drop = std::min(drop, surviving.size() - n_target);

        // Drop order: lowest importance first; ties drop the higher index, so
        // the lowest index is the one preferred to survive.
        std::vector<std::size_t> positions(surviving.size());
        std::iota(positions.begin(), positions.end(), std::size_t{0});
        std::sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
            if (importance[a] != importance[b]) return importance[a] < importance[b];
            return surviving[a] > surviving[b];
        });

        std::vector<bool> dropped(surviving.size(), false);
        double dropped_importance = 0.0;
        for (std::size_t i = 0; i < drop; ++i) {
            dropped[positions[i]] = true;
            res.ranks[surviving[positions[i]]] = elimination++;
            dropped_importance += importance[positions[i]];
        }
        std::vector<std::size_t> next;
        next.reserve(surviving.size() - drop);
        std::vector<double> next_importance;
        for (std::size_t p = 0; p < surviving.size(); ++p)
            if (!dropped[p]) {
                next.push_back(surviving[p]);
                next_importance.push_back(importance[p]);
            }
        const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
        res.stage_trace.push_back(
            {"rfe", next.size(), total > 0.0 ? 1.0 - dropped_importance / total : 0.0});
        surviving = std::move(next);
        last_importance = std::move(next_importance);
    }

    // Survivors continue the elimination numbering: weakest first, so the last
    // number lands on the strongest feature.
    std::vector<std::size_t> positions(surviving.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    std::sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
        if (last_importance[a] != last_importance[b]) return last_importance[a] < last_importance[b];
        return surviving[a] > surviving[b];
    });
    for (std::size_t p : positions) res.ranks[surviving[p]] = elimination++;

    res.selected = surviving;
    std::sort(res.selected.begin(), res.selected.end(), [&](std::size_t a, std::size_t b) {
        if (res.scores[a] != res.scores[b]) return res.scores[a] > res.scores[b];
        return a < b;
    });
    return res;
}

namespace {

struct CvFolds {
    std::vector<std::vector<std::size_t>> train;
    std::vector<std::vector<std::size_t>> test;
};

CvFolds make_cv_folds(std::span<const double> y, Task task, std::size_t folds, std::uint64_t seed) {
    const std::size_t n = y.size();
    if (folds < 2 || folds > n) throw std::invalid_argument("cross validation: need 2 <= folds <= n");
    std::vector<std::vector<std::size_t>> test_folds;
    if (task == Task::regression) {
        test_folds = kfold_indices(n, folds, seed);
    } else {
        std::vector<int> codes(n);
        for (std::size_t i = 0; i < n; ++i) codes[i] = static_cast<int>(y[i]);
        test_folds = stratified_kfold_indices(codes, folds, seed);
    }
    CvFolds out;
    out.test = test_folds;
    out.train.resize(folds);
    std::vector<bool> in_test(n);
    for (std::size_t f = 0; f < folds; ++f) {
        std::fill(in_test.begin(), in_test.end(), false);
        for (std::size_t i : test_folds[f]) in_test[i] = true;
        for (std::size_t i = 0; i < n; ++i)
            if (!in_test[i]) out.train[f].push_back(i);
    }
    return out;
}

// Mean CV score of `estimator` on the given columns: accuracy for
// classification, R^2 for regression.
double cv_score(const Matrix& X, std::span<const double> y, Task task, const EstimatorSpec& estimator,
                const std::vector<std::size_t>& columns, const CvFolds& folds) {
    const Matrix Xc = X.take_columns(columns);
    double total = 0.0;
    for (std::size_t f = 0; f < folds.test.size(); ++f) {
        const auto& train_idx = folds.train[f];
        const auto& test_idx = folds.test[f];
        std::vector<double> y_train(train_idx.size()), y_test(test_idx.size());
        for (std::size_t i = 0; i < train_idx.size(); ++i) y_train[i] = y[train_idx[i]];
        for (std::size_t i = 0; i < test_idx.size(); ++i) y_test[i] = y[test_idx[i]];

        FittedModel model;
        try {
            model = fit(estimator, Xc.take_rows(train_idx), y_train, task);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("cross validation fold " + std::to_string(f) + ": " + e.what());
        }
        const auto pred = predict(model, Xc.take_rows(test_idx));
        if (task == Task::regression) {
            total += regression_metrics(y_test, pred.values).r2;
        } else {
            std::size_t correct = 0;
            for (std::size_t i = 0; i < y_test.size(); ++i)
                if (pred.labels[i] == static_cast<int>(y_test[i])) ++correct;
            total += static_cast<double>(correct) / static_cast<double>(y_test.size());
        }
    }
    return total / static_cast<double>(folds.test.size());
}

}  // namespace

SelectionResult forward_select(const Matrix& X, std::span<const double> y, Task task,
                               const EstimatorSpec& estimator, std::size_t k_max, double epsilon,
                               std::size_t cv_folds, std::uint64_t seed, unsigned threads) {
    const std::size_t d = X.cols();
    if (k_max < 1) throw std::invalid_argument("forward_select: k_max must be >= 1");
    k_max = std::min(k_max, d);
    const auto folds = make_cv_folds(y, task, cv_folds, seed);

    SelectionResult res;
    res.scores.assign(d, 0.0);
    res.ranks.assign(d, -1);

    std::vector<std::size_t> chosen;
    std::vector<bool> in_set(d, false);
    double current = -std::numeric_limits<double>::infinity();

    while (chosen.size() < k_max) {
        std::vector<std::size_t> candidates;
        for (std::size_t c = 0; c < d; ++c)
            if (!in_set[c]) candidates.push_back(c);

        std::vector<double> cand_scores(candidates.size());
        parallel_for(candidates.size(), threads, [&](std::size_t i) {
            std::vector<std::size_t> columns = chosen;
            columns.push_back(candidates[i]);
            cand_scores[i] = cv_score(X, y, task, estimator, columns, folds);
        });

        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i)
            if (cand_scores[i] > cand_scores[best]) best = i;  // ties keep the lowest index

        if (cand_scores[best] - current < epsilon) break;
        current = cand_scores[best];
        const std::size_t feature = candidates[best];
        res.ranks[feature] = static_cast<int>(chosen.size());
        res.scores[feature] = current;
        chosen.push_back(feature);
        in_set[feature] = true;
        res.stage_trace.push_back({"forward", chosen.size(), current});
    }

    res.selected = chosen;
    return res;
}

SelectionResult frame_select(const Matrix& X, std::span<const double> y, Task task,
                             const SelectorConfig& config, unsigned threads) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t d = X.cols();
    const std::size_t k = config.k;
    if (k < 1 || k > d) throw std::invalid_argument("frame: k outside [1, d]");

    std::size_t pool = config.frame_pool == 0 ? std::min(d, std::max(2 * k, k + 10)) : config.frame_pool;
    if (pool < k) throw std::invalid_argument("frame: pool smaller than k");
    pool = std::min(pool, d);

    SelectionResult res;
    std::vector<std::size_t> pool_indices(d);
    std::iota(pool_indices.begin(), pool_indices.end(), std::size_t{0});

    if (pool < d) {
        auto stage1 = rfe(X, y, task, config.estimator, pool, config.rfe_step_fraction);
        pool_indices = stage1.selected;
        std::sort(pool_indices.begin(), pool_indices.end());
        res.stage_trace = std::move(stage1.stage_trace);
    }

    const Matrix Xp = X.take_columns(pool_indices);
    auto stage2 = forward_select(Xp, y, task, config.estimator, k, config.epsilon, config.cv_folds,
                                 config.seed, threads);

    res.scores.assign(d, 0.0);
    res.ranks.assign(d, -1);
    for (std::size_t local = 0; local < pool_indices.size(); ++local) {
        res.scores[pool_indices[local]] = stage2.scores[local];
        res.ranks[pool_indices[local]] = stage2.ranks[local];
    }
    res.selected.reserve(stage2.selected.size());
    for (std::size_t local : stage2.selected) res.selected.push_back(pool_indices[local]);
    for (auto& record : stage2.stage_trace) res.stage_trace.push_back(std::move(record));

    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

SelectionResult run_selector(const SelectorConfig& config, const Matrix& X, std::span<const double> y,
                             Task task, unsigned threads) {
    const auto start = std::chrono::steady_clock::now();
    SelectionResult res;
    switch (config.method) {
        case SelectorMethod::variance_threshold:
            res = variance_threshold(X, config.threshold);
            break;
        case SelectorMethod::select_k_best:
            res = select_k_best(X, y, task, config.k, config.score_fn);
            break;
        case SelectorMethod::mutual_info:
            res = select_k_best(X, y, task, config.k, ScoreFn::mutual_info);
            break;
        case SelectorMethod::model_select:
            res = model_select(X, y, task, config.estimator);
            break;
        case SelectorMethod::rfe:
            res = rfe(X, y, task, config.estimator, config.k, config.rfe_step_fraction);
            break;
        case SelectorMethod::forward:
            res = forward_select(X, y, task, config.estimator, config.k, config.epsilon, config.cv_folds,
                                 config.seed, threads);
            break;
        case SelectorMethod::frame:
            res = frame_select(X, y, task, config, threads);
            break;
    }
    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace fsel
