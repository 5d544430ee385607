#include "fsel/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsel/rng.hpp"

namespace fsel {

CategoryMap fit_categories(const std::vector<std::string>& column, const std::vector<bool>& observed) {
    CategoryMap map;
    for (std::size_t i = 0; i < column.size(); ++i) {
        if (!observed.empty() && !observed[i]) continue;
        if (map.codes.emplace(column[i], static_cast<int>(map.categories.size())).second)
            map.categories.push_back(column[i]);
    }
    return map;
}

Dataset encode_categoricals(const Dataset& data, PreprocessState& state, bool fit) {
    Dataset out = data;
    for (const auto& [col, values] : data.raw_categoricals) {
        std::vector<bool> observed(data.n_rows());
        for (std::size_t r = 0; r < data.n_rows(); ++r) observed[r] = !data.is_missing(r, col);
        if (fit) state.encoders[col] = fit_categories(values, observed);
        auto it = state.encoders.find(col);
        if (it == state.encoders.end())
            throw std::logic_error("encode_categoricals: column " + std::to_string(col) +
                                   " was not seen at fit time");
        for (std::size_t r = 0; r < data.n_rows(); ++r)
            if (observed[r]) out.features(r, col) = it->second.code_of(values[r]);
    }
    out.raw_categoricals.clear();
    return out;
}

Dataset impute_mean(const Dataset& data, PreprocessState& state, bool fit) {
    if (!data.raw_categoricals.empty())
        throw std::logic_error("impute_mean: encode categorical columns first");
    const std::size_t n = data.n_rows(), d = data.n_cols();
    if (fit) {
        state.impute_means.assign(d, 0.0);
        for (std::size_t c = 0; c < d; ++c) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (data.is_missing(r, c)) continue;
                sum += data.features(r, c);
                ++count;
            }
            if (count == 0)
                throw std::runtime_error("impute_mean: column \"" + data.feature_names[c] +
                                         "\" has no observed values");
            state.impute_means[c] = sum / static_cast<double>(count);
        }
        state.fitted_on = n;
    }
    if (state.impute_means.size() != d)
        throw std::logic_error("impute_mean: state fitted on a different column count");

    Dataset out = data;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c)
            if (out.is_missing(r, c)) {
                out.features(r, c) = state.impute_means[c];
                out.set_missing(r, c, false);
            }
    return out;
}

Dataset standardize(const Dataset& data, PreprocessState& state, bool fit) {
    const std::size_t n = data.n_rows(), d = data.n_cols();
    if (data.has_missing()) throw std::logic_error("standardize: impute missing values first");
    if (fit) {
        state.scale_means.assign(d, 0.0);
        state.scale_stds.assign(d, 0.0);
        state.zero_variance_columns.clear();
        for (std::size_t c = 0; c < d; ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) sum += data.features(r, c);
            const double mean = sum / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double dev = data.features(r, c) - mean;
                ss += dev * dev;
            }
            const double var = ss / static_cast<double>(n);  // population variance
            state.scale_means[c] = mean;
            state.scale_stds[c] = std::sqrt(var);
            if (state.scale_stds[c] == 0.0) state.zero_variance_columns.push_back(c);
        }
        state.fitted_on = n;
    }
    if (state.scale_means.size() != d)
        throw std::logic_error("standardize: state fitted on a different column count");

    Dataset out = data;
    for (std::size_t c = 0; c < d; ++c) {
        const double mean = state.scale_means[c];
        const double std_ = state.scale_stds[c] > 0.0 ? state.scale_stds[c] : 1.0;
        for (std::size_t r = 0; r < n; ++r) out.features(r, c) = (data.features(r, c) - mean) / std_;
    }
    return out;
}

Dataset undersample(const Dataset& data, std::uint64_t seed) {
    if (!data.is_classification())
        throw std::invalid_argument("undersample: requires a classification dataset");
    const auto counts = data.class_counts();
    const std::size_t minority = *std::min_element(counts.begin(), counts.end());

    std::vector<std::vector<std::size_t>> members(counts.size());
    const auto codes = data.class_codes();
    for (std::size_t i = 0; i < codes.size(); ++i) members[static_cast<std::size_t>(codes[i])].push_back(i);

    std::vector<std::size_t> keep;
    keep.reserve(minority * counts.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
        Rng rng(mix_seed(seed, c));
        auto pick = rng.sample_without_replacement(members[c].size(), minority);
        for (std::size_t p : pick) keep.push_back(members[c][p]);
    }
    Rng rng(mix_seed(seed, members.size()));
    rng.shuffle(keep);
    return data.take_rows(keep);
}

Dataset fit_transform(const Dataset& train, PreprocessState& state, const PreprocessSwitches& sw) {
    Dataset out = train;
    if (sw.encode) out = encode_categoricals(out, state, true);
    if (sw.impute) out = impute_mean(out, state, true);
    if (sw.standardize) out = standardize(out, state, true);
    state.fitted_on = train.n_rows();
    return out;
}

Dataset transform(const Dataset& data, const PreprocessState& state, const PreprocessSwitches& sw) {
    PreprocessState scratch = state;  // ops leave it untouched when fit=false
    Dataset out = data;
    if (sw.encode) out = encode_categoricals(out, scratch, false);
    if (sw.impute) out = impute_mean(out, scratch, false);
    if (sw.standardize) out = standardize(out, scratch, false);
    return out;
}

}  // namespace fsel
