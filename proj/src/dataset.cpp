#include "fsel/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fsel {

std::string to_string(Task task) {
    switch (task) {
        case Task::regression: return "regression";
        case Task::binary: return "binary";
        case Task::multiclass: return "multiclass";
    }
    return "?";
}

Task task_from_string(const std::string& s) {
    if (s == "regression") return Task::regression;
    if (s == "binary") return Task::binary;
    if (s == "multiclass") return Task::multiclass;
    throw std::invalid_argument("unknown task: " + s);
}

bool Dataset::has_missing() const {
    return std::any_of(missing.begin(), missing.end(), [](std::uint8_t m) { return m != 0; });
}

std::size_t Dataset::n_classes() const {
    if (!is_classification()) throw std::logic_error("n_classes on a regression dataset");
    double max_code = -1.0;
    for (double t : target) max_code = std::max(max_code, t);
    return static_cast<std::size_t>(max_code) + 1;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(n_classes(), 0);
    for (double t : target) ++counts[static_cast<std::size_t>(t)];
    return counts;
}

std::vector<int> Dataset::class_codes() const {
    std::vector<int> codes(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) codes[i] = static_cast<int>(target[i]);
    return codes;
}

Dataset Dataset::take_rows(std::span<const std::size_t> idx) const {
    Dataset out;
    out.features = features.take_rows(idx);
    out.target.reserve(idx.size());
    for (std::size_t i : idx) out.target.push_back(target[i]);
    out.feature_names = feature_names;
    out.task = task;
    out.target_name = target_name;
    out.informative_truth = informative_truth;
    const std::size_t d = n_cols();
    out.missing.resize(idx.size() * d);
    for (std::size_t r = 0; r < idx.size(); ++r)
        std::copy(missing.begin() + static_cast<std::ptrdiff_t>(idx[r] * d),
                  missing.begin() + static_cast<std::ptrdiff_t>((idx[r] + 1) * d),
                  out.missing.begin() + static_cast<std::ptrdiff_t>(r * d));
    for (const auto& [col, values] : raw_categoricals) {
        std::vector<std::string> sub;
        sub.reserve(idx.size());
        for (std::size_t i : idx) sub.push_back(values[i]);
        out.raw_categoricals.emplace(col, std::move(sub));
    }
    return out;
}

void Dataset::validate() const {
    if (features.rows() != target.size())
        throw std::invalid_argument("dataset: row count does not match target length");
    if (feature_names.size() != features.cols())
        throw std::invalid_argument("dataset: feature_names length does not match column count");
    if (missing.size() != features.rows() * features.cols())
        throw std::invalid_argument("dataset: missing mask shape mismatch");
    for (const auto& [col, values] : raw_categoricals) {
        if (col >= n_cols()) throw std::invalid_argument("dataset: raw categorical column out of range");
        if (values.size() != n_rows())
            throw std::invalid_argument("dataset: raw categorical column length mismatch");
    }
    if (is_classification()) {
        std::vector<bool> seen;
        for (double t : target) {
            if (t < 0.0 || t != std::floor(t))
                throw std::invalid_argument("dataset: classification target is not a non-negative integer code");
            const auto code = static_cast<std::size_t>(t);
            if (code >= seen.size()) seen.resize(code + 1, false);
            seen[code] = true;
        }
        if (seen.size() < 2) throw std::invalid_argument("dataset: classification needs at least 2 classes");
        for (std::size_t c = 0; c < seen.size(); ++c)
            if (!seen[c])
                throw std::invalid_argument("dataset: class codes are not contiguous (missing code " +
                                            std::to_string(c) + ")");
    }
    for (std::size_t r = 0; r < n_rows(); ++r)
        for (std::size_t c = 0; c < n_cols(); ++c)
            if (is_missing(r, c) && !std::isnan(features(r, c)) && !raw_categoricals.count(c))
                throw std::invalid_argument("dataset: masked cell is not NaN at row " + std::to_string(r));
}

void SyntheticSpec::validate() const {
    if (n_samples == 0 || n_features == 0 || n_informative == 0)
        throw std::invalid_argument("synthetic spec: sizes must be positive");
    if (n_informative + n_redundant > n_features)
        throw std::invalid_argument("synthetic spec: n_informative + n_redundant exceeds n_features");
    if (sparsity < 0.0 || sparsity > 1.0) throw std::invalid_argument("synthetic spec: sparsity outside [0,1]");
    if (noise_sigma < 0.0) throw std::invalid_argument("synthetic spec: negative noise_sigma");
    if (label_flip < 0.0 || label_flip >= 1.0) throw std::invalid_argument("synthetic spec: label_flip outside [0,1)");
    if (class_sep <= 0.0) throw std::invalid_argument("synthetic spec: class_sep must be positive");
    if (n_classes < 2) throw std::invalid_argument("synthetic spec: need at least 2 classes");
    if (n_informative < 64 && n_classes > (std::size_t{1} << n_informative))
        throw std::invalid_argument("synthetic spec: n_classes exceeds 2^n_informative");
}

}  // namespace fsel
