#include "fsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fsel {

RegressionReport regression_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("regression_metrics: length mismatch");
    const std::size_t n = y_true.size();
    if (n < 2) throw std::invalid_argument("regression_metrics: need at least 2 values");

    double mean_true = 0.0;
    for (double t : y_true) mean_true += t;
    mean_true /= static_cast<double>(n);

    double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0, msle_sum = 0.0;
    bool msle_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = y_true[i], p = y_pred[i];
        const double err = t - p;
        ss_res += err * err;
        const double dev = t - mean_true;
        ss_tot += dev * dev;
        sq_sum += err * err;
        abs_sum += std::abs(err);
        pct_sum += std::abs(err) / std::max(std::abs(t), 1e-8);
        if (t <= -1.0 || p <= -1.0)
            msle_ok = false;
        else {
            const double diff = std::log1p(t) - std::log1p(p);
            msle_sum += diff * diff;
        }
    }

    RegressionReport r;
    r.mse = sq_sum / static_cast<double>(n);
    r.rmse = std::sqrt(r.mse);
    r.mae = abs_sum / static_cast<double>(n);
    r.mape_percent = 100.0 * pct_sum / static_cast<double>(n);
    if (msle_ok) r.msle = msle_sum / static_cast<double>(n);
    if (ss_tot > 0.0)
        r.r2 = 1.0 - ss_res / ss_tot;
    else
        r.r2 = ss_res == 0.0 ? 1.0 : 0.0;
    return r;
}

ClassificationReport classification_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                                            const Matrix* scores) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("classification_metrics: length mismatch");
    const std::size_t n = y_true.size();
    if (n == 0) throw std::invalid_argument("classification_metrics: empty input");

    int max_code = 0;
    for (std::size_t i = 0; i < n; ++i) max_code = std::max({max_code, y_true[i], y_pred[i]});
    const auto n_codes = static_cast<std::size_t>(max_code) + 1;

    // confusion[t][p]
    std::vector<std::vector<std::size_t>> confusion(n_codes, std::vector<std::size_t>(n_codes, 0));
    for (std::size_t i = 0; i < n; ++i)
        ++confusion[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];

    ClassificationReport rep;
    std::size_t correct = 0;
    for (std::size_t c = 0; c < n_codes; ++c) correct += confusion[c][c];
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(n);

    double precision = 0.0, recall = 0.0, f1 = 0.0;
    for (std::size_t c = 0; c < n_codes; ++c) {
        std::size_t support = 0, predicted = 0;
        for (std::size_t k = 0; k < n_codes; ++k) {
            support += confusion[c][k];
            predicted += confusion[k][c];
        }
        if (support == 0) continue;  // class absent from y_true carries no weight
        const double weight = static_cast<double>(support) / static_cast<double>(n);
        const double tp = static_cast<double>(confusion[c][c]);
        const double prec_c = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
        const double rec_c = tp / static_cast<double>(support);
        const double f1_c = (prec_c + rec_c) == 0.0 ? 0.0 : 2.0 * prec_c * rec_c / (prec_c + rec_c);
        precision += weight * prec_c;
        recall += weight * rec_c;
        f1 += weight * f1_c;
    }
    rep.precision = precision;
    rep.recall = recall;
    rep.f1 = f1;

    if (scores != nullptr && scores->rows() == n && scores->cols() >= 2) {
        bool multi = false;
        for (int t : y_true)
            if (t > 1) multi = true;
        rep.auc_roc = multi ? auc_roc_ovr(y_true, *scores) : auc_roc(y_true, scores->column(1));
    }
    return rep;
}

double auc_roc(std::span<const int> y_true, std::span<const double> scores) {
    if (y_true.size() != scores.size()) throw std::invalid_argument("auc_roc: length mismatch");
    const std::size_t n = y_true.size();
    std::size_t n_pos = 0;
    for (int t : y_true) n_pos += (t == 1);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc_roc: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tie groups; AUC from the rank-sum of the positive class.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
        for (std::size_t k = i; k <= j; ++k)
            if (y_true[order[k]] == 1) pos_rank_sum += midrank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double auc_roc_ovr(std::span<const int> y_true, const Matrix& scores) {
    int max_code = 0;
    for (int t : y_true) max_code = std::max(max_code, t);
    if (static_cast<std::size_t>(max_code) >= scores.cols())
        throw std::invalid_argument("auc_roc_ovr: score matrix narrower than class count");

    double total = 0.0;
    std::size_t used = 0;
    for (int c = 0; c <= max_code; ++c) {
        std::vector<int> indicator(y_true.size());
        bool any_pos = false, any_neg = false;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            indicator[i] = y_true[i] == c ? 1 : 0;
            (indicator[i] ? any_pos : any_neg) = true;
        }
        if (!any_pos || !any_neg) continue;
        total += auc_roc(indicator, scores.column(static_cast<std::size_t>(c)));
        ++used;
    }
    if (used == 0) throw std::invalid_argument("auc_roc_ovr: no class has both positives and negatives");
    return total / static_cast<double>(used);
}

}  // namespace fsel
