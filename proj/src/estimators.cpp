#include "fsel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fsel {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::ols: return "ols";
        case Algorithm::elastic_net: return "elastic_net";
        case Algorithm::logistic: return "logistic";
        case Algorithm::linear_svm: return "linear_svm";
        case Algorithm::cart: return "cart";
        case Algorithm::random_forest: return "random_forest";
        case Algorithm::gbt: return "gbt";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "ols") return Algorithm::ols;
    if (s == "elastic_net" || s == "lasso") return Algorithm::elastic_net;
    if (s == "logistic") return Algorithm::logistic;
    if (s == "linear_svm") return Algorithm::linear_svm;
    if (s == "cart") return Algorithm::cart;
    if (s == "random_forest") return Algorithm::random_forest;
    if (s == "gbt") return Algorithm::gbt;
    throw std::invalid_argument("unknown algorithm: " + s);
}

void EstimatorSpec::validate() const {
    if (elastic_net.lambda < 0.0) throw std::invalid_argument("elastic_net.lambda must be >= 0");
    if (elastic_net.l1_ratio < 0.0 || elastic_net.l1_ratio > 1.0)
        throw std::invalid_argument("elastic_net.l1_ratio outside [0,1]");
    if (logistic.l2_lambda < 0.0) throw std::invalid_argument("logistic.l2_lambda must be >= 0");
    if (svm.l2_lambda < 0.0) throw std::invalid_argument("linear_svm.l2_lambda must be >= 0");
    if (cart.min_leaf == 0) throw std::invalid_argument("cart.min_leaf must be positive");
    if (forest.n_trees == 0) throw std::invalid_argument("random_forest.n_trees must be positive");
    if (gbt.eta <= 0.0 || gbt.eta > 1.0) throw std::invalid_argument("gbt.eta outside (0,1]");
    if (gbt.reg_lambda < 0.0) throw std::invalid_argument("gbt.reg_lambda must be >= 0");
    if (gbt.gamma < 0.0) throw std::invalid_argument("gbt.gamma must be >= 0");
}

FittedModel fit(const EstimatorSpec& spec, const Matrix& X, std::span<const double> y, Task task) {
    spec.validate();
    const bool classification = task != Task::regression;
    switch (spec.algorithm) {
        case Algorithm::ols:
            if (classification) throw std::invalid_argument("ols cannot be fit as a classifier");
            return fit_ols(X, y);
        case Algorithm::elastic_net:
            if (classification) throw std::invalid_argument("elastic_net cannot be fit as a classifier");
            return fit_elastic_net(X, y, spec.elastic_net);
        case Algorithm::logistic:
            if (!classification) throw std::invalid_argument("logistic requires a classification task");
            return fit_logistic(X, y, spec.logistic);
        case Algorithm::linear_svm:
            if (!classification) throw std::invalid_argument("linear_svm requires a classification task");
            return fit_linear_svm(X, y, spec.svm);
        case Algorithm::cart: return fit_cart(X, y, task, spec.cart);
        case Algorithm::random_forest: return fit_random_forest(X, y, task, spec.forest);
        case Algorithm::gbt: return fit_gbt(X, y, task, spec.gbt);
    }
    throw std::logic_error("fit: unhandled algorithm");
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double linear_score(const LinearWeights& w, std::span<const double> row) {
    double f = w.intercept;
    for (std::size_t j = 0; j < w.coef.size(); ++j) f += w.coef[j] * row[j];
    return f;
}

// Fills labels/values from a per-class score matrix by argmax, ties to the
// lowest class code. Column k of `scores` belongs to classes[k].
void finalize_classification(Predictions& out, const Matrix& scores, const std::vector<int>& classes) {
    const std::size_t n = scores.rows(), c = scores.cols();
    out.labels.resize(n);
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < c; ++k)
            if (scores(i, k) > scores(i, best)) best = k;
        out.labels[i] = classes[best];
        out.values[i] = static_cast<double>(classes[best]);
    }
    out.scores = scores;
}

}  // namespace

Predictions predict(const FittedModel& model, const Matrix& X) {
    if (X.cols() != model.train_feature_count)
        throw std::invalid_argument("predict: input has " + std::to_string(X.cols()) +
                                    " features, model was trained on " +
                                    std::to_string(model.train_feature_count));
    const std::size_t n = X.rows();
    Predictions out;

    switch (model.spec.algorithm) {
        case Algorithm::ols:
        case Algorithm::elastic_net: {
            out.values.resize(n);
            for (std::size_t i = 0; i < n; ++i) out.values[i] = linear_score(model.linear[0], X.row(i));
            return out;
        }
        case Algorithm::logistic:
        case Algorithm::linear_svm: {
            const bool prob = model.spec.algorithm == Algorithm::logistic;
            const std::size_t n_classes = model.classes.size();
            Matrix scores(n, n_classes, 0.0);
            if (model.linear.size() == 1) {  // binary: one machine for class 1
                for (std::size_t i = 0; i < n; ++i) {
                    const double f = linear_score(model.linear[0], X.row(i));
                    scores(i, 1) = prob ? sigmoid(f) : f;
                    scores(i, 0) = prob ? 1.0 - scores(i, 1) : -f;
                }
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t c = 0; c < model.linear.size(); ++c) {
                        const double f = linear_score(model.linear[c], X.row(i));
                        scores(i, c) = prob ? sigmoid(f) : f;
                    }
            }
            finalize_classification(out, scores, model.classes);
            return out;
        }
        case Algorithm::cart:
        case Algorithm::random_forest: {
            if (model.task == Task::regression) {
                out.values.assign(n, 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    double sum = 0.0;
                    for (const auto& tree : model.trees) sum += tree.leaf_for(X.row(i)).value;
                    out.values[i] = sum / static_cast<double>(model.trees.size());
                }
                return out;
            }
            const std::size_t n_classes = model.classes.size();
            Matrix probs(n, n_classes, 0.0);
            out.labels.resize(n);
            out.values.resize(n);
            std::vector<std::size_t> votes(n_classes);
            for (std::size_t i = 0; i < n; ++i) {
                std::fill(votes.begin(), votes.end(), std::size_t{0});
                for (const auto& tree : model.trees) {
                    const auto& leaf = tree.leaf_for(X.row(i));
                    ++votes[static_cast<std::size_t>(leaf.value)];
                    for (std::size_t c = 0; c < leaf.class_probs.size(); ++c)
                        probs(i, c) += leaf.class_probs[c];
                }
                for (std::size_t c = 0; c < n_classes; ++c)
                    probs(i, c) /= static_cast<double>(model.trees.size());
                // Majority vote, ties to the lowest class code.
                std::size_t best = 0;
                for (std::size_t c = 1; c < n_classes; ++c)
                    if (votes[c] > votes[best]) best = c;
                out.labels[i] = model.classes[best];
                out.values[i] = static_cast<double>(model.classes[best]);
            }
            out.scores = std::move(probs);
            return out;
        }
        case Algorithm::gbt: {
            if (model.task == Task::regression) {
                out.values.assign(n, model.base_score[0]);
                for (std::size_t i = 0; i < n; ++i)
                    for (const auto& tree : model.boosted[0]) out.values[i] += tree.leaf_for(X.row(i)).value;
                return out;
            }
            const std::size_t n_classes = model.classes.size();
            Matrix scores(n, n_classes, 0.0);
            if (model.boosted.size() == 1) {  // binary: single chain scores class 1
                for (std::size_t i = 0; i < n; ++i) {
                    double raw = model.base_score[0];
                    for (const auto& tree : model.boosted[0]) raw += tree.leaf_for(X.row(i)).value;
                    const double p = sigmoid(raw);
                    scores(i, 1) = p;
                    scores(i, 0) = 1.0 - p;
                }
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t c = 0; c < model.boosted.size(); ++c) {
                        double raw = model.base_score[c];
                        for (const auto& tree : model.boosted[c]) raw += tree.leaf_for(X.row(i)).value;
                        scores(i, c) = sigmoid(raw);
                    }
            }
            finalize_classification(out, scores, model.classes);
            return out;
        }
    }
    throw std::logic_error("predict: unhandled algorithm");
}

std::vector<double> feature_importance(const FittedModel& model) {
    switch (model.spec.algorithm) {
        case Algorithm::ols:
        case Algorithm::elastic_net:
        case Algorithm::logistic:
        case Algorithm::linear_svm: {
            std::vector<double> imp(model.train_feature_count, 0.0);
            for (const auto& w : model.linear)
                for (std::size_t j = 0; j < w.coef.size(); ++j) imp[j] += std::abs(w.coef[j]);
            if (model.linear.size() > 1)
                for (double& v : imp) v /= static_cast<double>(model.linear.size());
            return imp;
        }
        case Algorithm::cart:
        case Algorithm::random_forest:
        case Algorithm::gbt: {
            std::vector<double> imp = model.split_importance;
            const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
            if (total > 0.0)
                for (double& v : imp) v /= total;
            return imp;
        }
    }
    throw std::logic_error("feature_importance: unhandled algorithm");
}

}  // namespace fsel
