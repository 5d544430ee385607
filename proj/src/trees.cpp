#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fsel/estimators.hpp"
#include "fsel/rng.hpp"

namespace fsel {

const TreeNode& Tree::leaf_for(std::span<const double> row) const {
    std::size_t node = 0;
    while (nodes[node].feature >= 0) {
        const auto& nd = nodes[node];
        node = static_cast<std::size_t>(row[static_cast<std::size_t>(nd.feature)] <= nd.threshold
                                            ? nd.left
                                            : nd.right);
    }
    return nodes[node];
}

namespace {

struct CartConfig {
    std::size_t max_depth = 10;
    std::size_t min_leaf = 2;
    std::size_t mtry = 0;  // 0 = all features
    bool classification = false;
    std::size_t n_classes = 0;
    Rng* rng = nullptr;  // only consulted when mtry is a strict subset
};

double gini(const std::vector<double>& counts, double total) {
    double s = 0.0;
    for (double c : counts) {
        const double p = c / total;
        s += p * p;
    }
    return 1.0 - s;
}

struct CartBuilder {
    const Matrix& X;
    std::span<const double> y;
    const CartConfig& cfg;
    std::vector<double>* importance;
    Tree tree;

    // rows may repeat (bootstrap). Returns the node id.
    std::int32_t grow(std::vector<std::size_t>& rows, std::size_t depth) {
        const std::size_t count = rows.size();
        const auto id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        std::vector<double> counts;
        double sum = 0.0, sumsq = 0.0;
        bool pure;
        if (cfg.classification) {
            counts.assign(cfg.n_classes, 0.0);
            for (std::size_t r : rows) counts[static_cast<std::size_t>(y[r])] += 1.0;
            pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }) <= 1;
        } else {
            for (std::size_t r : rows) {
                sum += y[r];
                sumsq += y[r] * y[r];
            }
            const double mean = sum / static_cast<double>(count);
            pure = sumsq / static_cast<double>(count) - mean * mean <= 0.0;
        }

        auto make_leaf = [&] {
            auto& node = tree.nodes[static_cast<std::size_t>(id)];
            if (cfg.classification) {
                // Majority class, ties to the lowest code.
                std::size_t best = 0;
                for (std::size_t c = 1; c < counts.size(); ++c)
                    if (counts[c] > counts[best]) best = c;
                node.value = static_cast<double>(best);
                node.class_probs.resize(counts.size());
                for (std::size_t c = 0; c < counts.size(); ++c)
                    node.class_probs[c] = counts[c] / static_cast<double>(count);
            } else {
                node.value = sum / static_cast<double>(count);
            }
            return id;
        };

        if (pure || depth >= cfg.max_depth || count < 2 * cfg.min_leaf) return make_leaf();

        const std::size_t d = X.cols();
        std::vector<std::size_t> candidates;
        if (cfg.mtry == 0 || cfg.mtry >= d) {
            candidates.resize(d);
            std::iota(candidates.begin(), candidates.end(), std::size_t{0});
        } else {
            candidates = cfg.rng->sample_without_replacement(d, cfg.mtry);
            std::sort(candidates.begin(), candidates.end());  // ties resolve to the lowest index
        }

        double best_gain = -1.0;  // zero-gain splits are allowed on impure nodes
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        std::size_t best_left_count = 0;

        std::vector<std::pair<double, std::size_t>> order(count);
        std::vector<double> left_counts;
        const double total = static_cast<double>(count);
        const double parent_impurity =
            cfg.classification ? gini(counts, total)
                               : sumsq / total - (sum / total) * (sum / total);

        for (std::size_t f : candidates) {
            for (std::size_t i = 0; i < count; ++i) order[i] = {X(rows[i], f), rows[i]};
            std::sort(order.begin(), order.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (order.front().first == order.back().first) continue;  // constant inside node

            if (cfg.classification) left_counts.assign(cfg.n_classes, 0.0);
            double left_sum = 0.0, left_sumsq = 0.0;
            for (std::size_t i = 0; i + 1 < count; ++i) {
                const double yi = y[order[i].second];
                if (cfg.classification)
                    left_counts[static_cast<std::size_t>(yi)] += 1.0;
                else {
                    left_sum += yi;
                    left_sumsq += yi * yi;
                }
                if (order[i].first == order[i + 1].first) continue;
                const std::size_t nl = i + 1, nr = count - nl;
                if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;

                double child_impurity;
                if (cfg.classification) {
                    std::vector<double> right_counts(cfg.n_classes);
                    for (std::size_t c = 0; c < cfg.n_classes; ++c)
                        right_counts[c] = counts[c] - left_counts[c];
                    child_impurity = (static_cast<double>(nl) * gini(left_counts, static_cast<double>(nl)) +
                                      static_cast<double>(nr) * gini(right_counts, static_cast<double>(nr))) /
                                     total;
                } else {
                    const double lm = left_sum / static_cast<double>(nl);
                    const double rm = (sum - left_sum) / static_cast<double>(nr);
                    const double lvar = left_sumsq / static_cast<double>(nl) - lm * lm;
                    const double rvar = (sumsq - left_sumsq) / static_cast<double>(nr) - rm * rm;
                    child_impurity =
                        (static_cast<double>(nl) * lvar + static_cast<double>(nr) * rvar) / total;
                }
                const double gain = parent_impurity - child_impurity;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (order[i].first + order[i + 1].first);
                    best_left_count = nl;
                }
            }
        }

        if (best_gain < 0.0) return make_leaf();

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(best_left_count);
        right_rows.reserve(count - best_left_count);
        for (std::size_t r : rows)
            (X(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);

        if (importance) (*importance)[best_feature] += total * best_gain;

        rows.clear();
        rows.shrink_to_fit();
        const auto left_id = grow(left_rows, depth + 1);
        const auto right_id = grow(right_rows, depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<std::int32_t>(best_feature);
        node.threshold = best_threshold;
        node.left = left_id;
        node.right = right_id;
        return id;
    }
};

Tree build_cart_tree(const Matrix& X, std::span<const double> y, std::vector<std::size_t> rows,
                     const CartConfig& cfg, std::vector<double>* importance) {
    CartBuilder builder{X, y, cfg, importance, {}};
    builder.grow(rows, 0);
    return std::move(builder.tree);
}

std::size_t count_classes(std::span<const double> y) {
    double max_code = 0.0;
    for (double v : y) max_code = std::max(max_code, v);
    return static_cast<std::size_t>(max_code) + 1;
}

void check_class_target(std::span<const double> y) {
    const double first = y.empty() ? 0.0 : y.front();
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == first; }))
        throw std::invalid_argument("tree fit: single-class target");
}

// ---- gradient/hessian tree builder for boosting -----------------------------
//
// Feature orderings are presorted once per fit; each tree works on a private
// copy, stably partitioned per split so that every node owns one contiguous
// range in every feature block.

struct SortedColumns {
    std::size_t n = 0, d = 0;
    std::vector<std::int32_t> idx;  // d blocks of n row indices, sorted by feature value

    static SortedColumns build(const Matrix& X) {
        SortedColumns s;
        s.n = X.rows();
        s.d = X.cols();
        s.idx.resize(s.n * s.d);
        for (std::size_t f = 0; f < s.d; ++f) {
            auto* block = s.idx.data() + f * s.n;
            std::iota(block, block + s.n, 0);
            std::stable_sort(block, block + s.n, [&](std::int32_t a, std::int32_t b) {
                return X(static_cast<std::size_t>(a), f) < X(static_cast<std::size_t>(b), f);
            });
        }
        return s;
    }
};

struct GhTreeBuilder {
    const Matrix& X;
    const GbtParams& params;
    double eta;
    std::vector<double>* importance;

    std::vector<std::int32_t> work;    // partitioned per node
    std::vector<std::int32_t> buffer;  // scratch for stable partition
    std::vector<std::uint8_t> goes_left;

    struct Pending {
        std::int32_t id;
        std::size_t begin, end;
        double g_sum, h_sum;
        std::size_t depth;
    };

    Tree build(const SortedColumns& sorted, std::span<const double> g, std::span<const double> h) {
        const std::size_t n = sorted.n, d = sorted.d;
        work = sorted.idx;
        buffer.resize(n);
        goes_left.resize(n);

        Tree tree;
        double g_root = 0.0, h_root = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g_root += g[i];
            h_root += h[i];
        }
        tree.nodes.emplace_back();
        std::vector<Pending> stack{{0, 0, n, g_root, h_root, 0}};

        while (!stack.empty()) {
            const Pending node = stack.back();
            stack.pop_back();
            auto& tn = tree.nodes[static_cast<std::size_t>(node.id)];
            const std::size_t count = node.end - node.begin;

            const auto leaf_value = [&] {
                const double denom = node.h_sum + params.reg_lambda;
                return denom > 1e-12 ? -eta * node.g_sum / denom : 0.0;
            };
            if (node.depth >= params.max_depth || count < 2) {
                tn.value = leaf_value();
                continue;
            }

            // Best split: strict improvement keeps the earliest (lowest feature,
            // lowest threshold) candidate on exact gain ties.
            double best_gain = 0.0;
            std::size_t best_feature = 0;
            double best_threshold = 0.0;
            const double parent_score =
                node.g_sum * node.g_sum / (node.h_sum + params.reg_lambda);
            for (std::size_t f = 0; f < d; ++f) {
                const auto* block = work.data() + f * n;
                double gl = 0.0, hl = 0.0;
                for (std::size_t i = node.begin; i + 1 < node.end; ++i) {
                    const auto row = static_cast<std::size_t>(block[i]);
                    gl += g[row];
                    hl += h[row];
                    const double v = X(row, f);
                    const double v_next = X(static_cast<std::size_t>(block[i + 1]), f);
                    if (v == v_next) continue;
                    const double gr = node.g_sum - gl, hr = node.h_sum - hl;
                    const double gain = 0.5 * (gl * gl / (hl + params.reg_lambda) +
                                               gr * gr / (hr + params.reg_lambda) - parent_score) -
                                        params.gamma;
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_feature = f;
                        best_threshold = 0.5 * (v + v_next);
                    }
                }
            }

            if (best_gain <= 0.0) {
                tn.value = leaf_value();
                continue;
            }

            double gl = 0.0, hl = 0.0;
            std::size_t left_count = 0;
            {
                const auto* block = work.data() + best_feature * n;
                for (std::size_t i = node.begin; i < node.end; ++i) {
                    const auto row = static_cast<std::size_t>(block[i]);
                    const bool left = X(row, best_feature) <= best_threshold;
                    goes_left[row] = left;
                    if (left) {
                        gl += g[row];
                        hl += h[row];
                        ++left_count;
                    }
                }
            }
            for (std::size_t f = 0; f < d; ++f) {
                auto* block = work.data() + f * n;
                std::size_t lo = node.begin, hi = 0;
                for (std::size_t i = node.begin; i < node.end; ++i) {
                    const auto row = block[i];
                    if (goes_left[static_cast<std::size_t>(row)])
                        block[lo++] = row;
                    else
                        buffer[hi++] = row;
                }
                std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(hi),
                          block + lo);
            }

            if (importance) (*importance)[best_feature] += best_gain;

            const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            const auto right_id = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            auto& tn2 = tree.nodes[static_cast<std::size_t>(node.id)];  // emplace may reallocate
            tn2.feature = static_cast<std::int32_t>(best_feature);
            tn2.threshold = best_threshold;
            tn2.left = left_id;
            tn2.right = right_id;
            stack.push_back({right_id, node.begin + left_count, node.end, node.g_sum - gl,
                             node.h_sum - hl, node.depth + 1});
            stack.push_back({left_id, node.begin, node.begin + left_count, gl, hl, node.depth + 1});
        }
        return tree;
    }
};

double sigmoid_raw(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

FittedModel fit_cart(const Matrix& X, std::span<const double> y, Task task, const CartParams& params) {
    if (X.rows() != y.size() || X.rows() == 0) throw std::invalid_argument("fit_cart: empty or mismatched input");
    if (X.rows() < 2 * params.min_leaf)
        throw std::invalid_argument("fit_cart: need at least 2*min_leaf rows");

    FittedModel m;
    m.spec = EstimatorSpec::of(Algorithm::cart);
    m.spec.cart = params;
    m.task = task;
    m.train_feature_count = X.cols();
    m.split_importance.assign(X.cols(), 0.0);

    CartConfig cfg;
    cfg.max_depth = params.max_depth;
    cfg.min_leaf = params.min_leaf;
    cfg.classification = task != Task::regression;
    if (cfg.classification) {
        cfg.n_classes = count_classes(y);
        for (std::size_t c = 0; c < cfg.n_classes; ++c) m.classes.push_back(static_cast<int>(c));
    }
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    m.trees.push_back(build_cart_tree(X, y, std::move(rows), cfg, &m.split_importance));
    return m;
}

FittedModel fit_random_forest(const Matrix& X, std::span<const double> y, Task task,
                              const ForestParams& params) {
    if (X.rows() != y.size() || X.rows() == 0)
        throw std::invalid_argument("fit_random_forest: empty or mismatched input");
    const std::size_t n = X.rows(), d = X.cols();

    FittedModel m;
    m.spec = EstimatorSpec::of(Algorithm::random_forest);
    m.spec.forest = params;
    m.task = task;
    m.train_feature_count = d;
    m.split_importance.assign(d, 0.0);

    CartConfig cfg;
    cfg.max_depth = params.max_depth;
    cfg.min_leaf = 2;
    cfg.classification = task != Task::regression;
    if (cfg.classification) {
        cfg.n_classes = count_classes(y);
        for (std::size_t c = 0; c < cfg.n_classes; ++c) m.classes.push_back(static_cast<int>(c));
    }
    const std::size_t default_mtry =
        cfg.classification
            ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))
            : static_cast<std::size_t>(std::ceil(static_cast<double>(d) / 3.0));
    cfg.mtry = params.mtry == 0 ? default_mtry : std::min(params.mtry, d);

    m.trees.resize(params.n_trees);
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        Rng rng(mix_seed(params.seed, t));
        cfg.rng = &rng;
        std::vector<std::size_t> rows(n);
        if (params.bootstrap)
            for (auto& r : rows) r = rng.below(n);
        else
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        m.trees[t] = build_cart_tree(X, y, std::move(rows), cfg, &m.split_importance);
    }
    return m;
}

FittedModel fit_gbt(const Matrix& X, std::span<const double> y, Task task, const GbtParams& params,
                    std::vector<double>* objective_trace) {
    if (X.rows() != y.size() || X.rows() == 0) throw std::invalid_argument("fit_gbt: empty or mismatched input");
    const std::size_t n = X.rows();

    FittedModel m;
    m.spec = EstimatorSpec::of(Algorithm::gbt);
    m.spec.gbt = params;
    m.task = task;
    m.train_feature_count = X.cols();
    m.split_importance.assign(X.cols(), 0.0);

    const auto sorted = SortedColumns::build(X);
    GhTreeBuilder builder{X, params, params.eta, &m.split_importance, {}, {}, {}};

    std::vector<double> g(n), h(n), raw(n);

    auto boost_chain = [&](std::span<const double> targets, bool classification) {
        std::vector<Tree> chain;
        double base;
        if (classification) {
            double p = 0.0;
            for (double t : targets) p += t;
            p = std::clamp(p / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
            base = std::log(p / (1.0 - p));
        } else {
            base = 0.0;
            for (double t : targets) base += t;
            base /= static_cast<double>(n);
        }
        std::fill(raw.begin(), raw.end(), base);
        for (std::size_t round = 0; round < params.n_rounds; ++round) {
            if (classification) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double p = sigmoid_raw(raw[i]);
                    g[i] = p - targets[i];
                    h[i] = p * (1.0 - p);
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    g[i] = raw[i] - targets[i];
                    h[i] = 1.0;
                }
            }
            Tree tree = builder.build(sorted, g, h);
            for (std::size_t i = 0; i < n; ++i) raw[i] += tree.leaf_for(X.row(i)).value;
            chain.push_back(std::move(tree));
            if (objective_trace) {
                double loss = 0.0;
                if (classification)
                    for (std::size_t i = 0; i < n; ++i)
                        loss += std::max(raw[i], 0.0) - raw[i] * targets[i] +
                                std::log1p(std::exp(-std::abs(raw[i])));
                else
                    for (std::size_t i = 0; i < n; ++i)
                        loss += 0.5 * (raw[i] - targets[i]) * (raw[i] - targets[i]);
                objective_trace->push_back(loss / static_cast<double>(n));
            }
        }
        m.boosted.push_back(std::move(chain));
        m.base_score.push_back(base);
    };

    if (task == Task::regression) {
        boost_chain(y, false);
    } else {
        check_class_target(y);
        const std::size_t n_classes = count_classes(y);
        for (std::size_t c = 0; c < n_classes; ++c) m.classes.push_back(static_cast<int>(c));
        if (n_classes == 2) {
            boost_chain(y, true);
        } else {
            std::vector<double> indicator(n);
            for (std::size_t c = 0; c < n_classes; ++c) {
                for (std::size_t i = 0; i < n; ++i)
                    indicator[i] = static_cast<std::size_t>(y[i]) == c ? 1.0 : 0.0;
                boost_chain(indicator, true);
            }
        }
    }
    return m;
}

}  // namespace fsel
