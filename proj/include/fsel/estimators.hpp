#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsel/dataset.hpp"
#include "fsel/matrix.hpp"

namespace fsel {

enum class Algorithm { ols, elastic_net, logistic, linear_svm, cart, random_forest, gbt };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct ElasticNetParams {
    double lambda = 1.0;
    double l1_ratio = 1.0;  // 1 = lasso, 0 = ridge
    std::size_t max_sweeps = 1000;
    double tol = 1e-6;
};

struct LogisticParams {
    double l2_lambda = 1e-4;
    std::size_t max_iter = 500;
    double tol = 1e-6;
};

struct LinearSvmParams {
    double l2_lambda = 1e-2;
    std::size_t max_iter = 500;
};

struct CartParams {
    std::size_t max_depth = 10;
    std::size_t min_leaf = 2;
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 10;
    std::size_t mtry = 0;   // 0 = auto: ceil(sqrt(d)) classification, ceil(d/3) regression
    bool bootstrap = true;  // disabled only in tests
    std::uint64_t seed = 0;
};

struct GbtParams {
    std::size_t n_rounds = 100;
    double eta = 0.3;
    std::size_t max_depth = 3;
    double reg_lambda = 1.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
};

// Algorithm choice plus every hyperparameter block; only the block matching
// `algorithm` is consulted.
struct EstimatorSpec {
    Algorithm algorithm = Algorithm::gbt;
    ElasticNetParams elastic_net;
    LogisticParams logistic;
    LinearSvmParams svm;
    CartParams cart;
    ForestParams forest;
    GbtParams gbt;

    static EstimatorSpec of(Algorithm a) {
        EstimatorSpec s;
        s.algorithm = a;
        return s;
    }
    std::string name() const { return to_string(algorithm); }
    void validate() const;
};

struct LinearWeights {
    std::vector<double> coef;
    double intercept = 0.0;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 = leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;               // leaf payload: mean, majority code, or boosted weight
    std::vector<double> class_probs;  // leaf class distribution (cart/forest classification)
};

struct Tree {
    std::vector<TreeNode> nodes;
    const TreeNode& leaf_for(std::span<const double> row) const;
};

// Trained artifact. Linear models hold one weight vector per output (one for
// regression and binary, one per class for one-vs-rest multiclass); tree
// models hold their ensembles. Immutable after fitting.
struct FittedModel {
    EstimatorSpec spec;
    Task task = Task::regression;
    std::vector<int> classes;  // classification codes 0..C-1
    std::size_t train_feature_count = 0;

    std::vector<LinearWeights> linear;
    std::vector<Tree> trees;                 // cart: 1 tree; forest: n_trees
    std::vector<std::vector<Tree>> boosted;  // gbt: [output][round], leaf values include eta
    std::vector<double> base_score;          // gbt initial raw score per output
    std::vector<double> split_importance;    // tree family, unnormalized

    bool is_classification() const { return task != Task::regression; }
};

struct Predictions {
    std::vector<double> values;  // regression predictions, or class codes as doubles
    std::vector<int> labels;     // classification only
    Matrix scores;               // classification only: n x C probabilities / decision values
};

// Task-checked dispatch used by the benchmark and the wrapper selectors.
// ols/elastic_net fit regression targets only; logistic/linear_svm fit
// classification only; the tree family handles both.
FittedModel fit(const EstimatorSpec& spec, const Matrix& X, std::span<const double> y, Task task);
Predictions predict(const FittedModel& model, const Matrix& X);

// Tree family: normalized split-gain (gbt) or impurity decrease (cart/forest).
// Linear family: |coefficient| per feature, averaged over one-vs-rest outputs.
std::vector<double> feature_importance(const FittedModel& model);

// Direct entry points.
FittedModel fit_ols(const Matrix& X, std::span<const double> y);
FittedModel fit_elastic_net(const Matrix& X, std::span<const double> y, const ElasticNetParams& params);
// objective_trace, when given, receives the objective value at every accepted
// iterate (per one-vs-rest machine for multiclass) / after every boosting round.
FittedModel fit_logistic(const Matrix& X, std::span<const double> y, const LogisticParams& params,
                         std::vector<double>* objective_trace = nullptr);
FittedModel fit_linear_svm(const Matrix& X, std::span<const double> y, const LinearSvmParams& params,
                           std::vector<double>* objective_trace = nullptr);
FittedModel fit_cart(const Matrix& X, std::span<const double> y, Task task, const CartParams& params);
FittedModel fit_random_forest(const Matrix& X, std::span<const double> y, Task task, const ForestParams& params);
FittedModel fit_gbt(const Matrix& X, std::span<const double> y, Task task, const GbtParams& params,
                    std::vector<double>* objective_trace = nullptr);

// Objective values with analytic gradients, exposed so tests can check them
// against finite differences. y_pm holds +/-1 labels.
double logistic_objective(const Matrix& X, std::span<const double> y_pm, std::span<const double> w,
                          double intercept, double l2_lambda, std::vector<double>* grad_w = nullptr,
                          double* grad_intercept = nullptr);
double squared_hinge_objective(const Matrix& X, std::span<const double> y_pm, std::span<const double> w,
                               double intercept, double l2_lambda, std::vector<double>* grad_w = nullptr,
                               double* grad_intercept = nullptr);
// (1/2n)||y - b - X beta||^2 + lambda (alpha ||beta||_1 + (1-alpha)/2 ||beta||^2)
double elastic_net_objective(const Matrix& X, std::span<const double> y, std::span<const double> beta,
                             double intercept, double lambda, double l1_ratio);

}  // namespace fsel
