#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsel/dataset.hpp"
#include "fsel/estimators.hpp"

namespace fsel {

enum class SelectorMethod { variance_threshold, select_k_best, mutual_info, model_select, rfe, forward, frame };
enum class ScoreFn { auto_select, anova_f, f_regression, mutual_info };

std::string to_string(SelectorMethod m);
SelectorMethod selector_method_from_string(const std::string& s);
std::string to_string(ScoreFn f);
ScoreFn score_fn_from_string(const std::string& s);

struct SelectorConfig {
    SelectorMethod method = SelectorMethod::frame;
    std::size_t k = 10;                       // target feature count where applicable
    ScoreFn score_fn = ScoreFn::auto_select;  // auto: anova_f for classification, f_regression otherwise
    double threshold = 0.0;                   // variance_threshold cutoff
    EstimatorSpec estimator;                  // rfe / forward / frame / model_select
    double rfe_step_fraction = 0.1;
    std::size_t frame_pool = 0;  // 0 = auto: min(d, max(2k, k + 10))
    double epsilon = 1e-4;       // forward-selection improvement tolerance
    std::size_t cv_folds = 3;
    std::uint64_t seed = 0;
    std::string name;  // report label; defaults to the method name

    std::string label() const { return name.empty() ? to_string(method) : name; }
};

struct StageRecord {
    std::string stage;
    std::size_t feature_set_size = 0;
    double score = 0.0;
};

// Outcome of one selector run. `ranks` semantics per method:
//   filter methods  — position in the descending score order (0 = best);
//   rfe             — elimination order (0 = dropped first, larger = kept longer);
//   forward / frame — addition order (0 = added first), -1 = never added.
struct SelectionResult {
    std::vector<std::size_t> selected;  // unique, in-bounds
    std::vector<double> scores;         // per input feature, method-specific meaning
    std::vector<int> ranks;
    std::vector<StageRecord> stage_trace;
    double elapsed_seconds = 0.0;
};

// Keeps columns whose population variance exceeds `threshold`.
SelectionResult variance_threshold(const Matrix& X, double threshold);

// anova_f: one-way F statistic (classification). f_regression: F from the
// Pearson correlation (any target). mutual_info: plug-in MI in nats over 10
// equal-frequency feature bins; regression targets are binned the same way.
// F statistics are capped at 1e12 where the exact value diverges.
std::vector<double> univariate_scores(const Matrix& X, std::span<const double> y, Task task, ScoreFn fn);

SelectionResult select_k_best(const Matrix& X, std::span<const double> y, Task task, std::size_t k,
                              ScoreFn fn);

// Embedded selection: nonzero coefficients (elastic_net) or importance above
// the mean importance (random_forest / gbt).
SelectionResult model_select(const Matrix& X, std::span<const double> y, Task task,
                             const EstimatorSpec& estimator);

// Backward elimination dropping max(1, floor(step_fraction * current)) of the
// least important features per refit, never below n_target.
SelectionResult rfe(const Matrix& X, std::span<const double> y, Task task, const EstimatorSpec& estimator,
                    std::size_t n_target, double step_fraction = 0.1);

// Greedy forward construction scored by mean k-fold CV accuracy / R^2;
// stops at k_max features or when the best improvement drops below epsilon.
SelectionResult forward_select(const Matrix& X, std::span<const double> y, Task task,
                               const EstimatorSpec& estimator, std::size_t k_max, double epsilon,
                               std::size_t cv_folds, std::uint64_t seed, unsigned threads = 1);

// The hybrid: RFE shrinks the space to config.frame_pool columns, then forward
// selection builds the final subset from that pool. Both stages drive the
// configured estimator (gbt by default) and both traces are kept.
SelectionResult frame_select(const Matrix& X, std::span<const double> y, Task task,
                             const SelectorConfig& config, unsigned threads = 1);

// Dispatch on config.method; stamps elapsed_seconds.
SelectionResult run_selector(const SelectorConfig& config, const Matrix& X, std::span<const double> y,
                             Task task, unsigned threads = 1);

}  // namespace fsel
