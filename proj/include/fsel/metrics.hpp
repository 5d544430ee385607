#pragma once

#include <optional>
#include <span>

#include "fsel/matrix.hpp"

namespace fsel {

struct RegressionReport {
    double r2 = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> msle;  // absent when any value is <= -1
    double mape_percent = 0.0;
};

// Precision/recall/F1 are support-weighted across classes, which makes the
// weighted recall coincide with accuracy.
struct ClassificationReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<double> auc_roc;  // absent when no scores were supplied
};

RegressionReport regression_metrics(std::span<const double> y_true, std::span<const double> y_pred);

// scores: n x C matrix of per-class scores (probabilities or decision values);
// pass nullptr to skip AUC. Predicted codes outside the true class set count
// as plain misclassifications.
ClassificationReport classification_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                                            const Matrix* scores = nullptr);

// Rank-based AUC with midrank tie handling; y_true must contain both classes.
double auc_roc(std::span<const int> y_true, std::span<const double> scores);

// One-vs-rest macro average over the classes present in y_true.
double auc_roc_ovr(std::span<const int> y_true, const Matrix& scores);

}  // namespace fsel
