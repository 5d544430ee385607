#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fsel/dataset.hpp"

namespace fsel {

// Categories in first-appearance order; strings unseen at fit time map to the
// reserved code categories.size().
struct CategoryMap {
    std::vector<std::string> categories;
    std::map<std::string, int> codes;

    int code_of(const std::string& s) const {
        auto it = codes.find(s);
        return it == codes.end() ? static_cast<int>(categories.size()) : it->second;
    }
};

CategoryMap fit_categories(const std::vector<std::string>& column,
                           const std::vector<bool>& observed);

// Training statistics for the encode -> impute -> standardize chain. Immutable
// once fitted; safe to share across threads for transform.
struct PreprocessState {
    std::map<std::size_t, CategoryMap> encoders;
    std::vector<double> impute_means;               // per column
    std::vector<double> scale_means;                // per column
    std::vector<double> scale_stds;                 // population std; 0 recorded as-is
    std::vector<std::size_t> zero_variance_columns;
    std::size_t fitted_on = 0;
};

struct PreprocessSwitches {
    bool encode = true;
    bool impute = true;
    bool standardize = true;
};

// Individual steps. `fit` computes statistics from `data` into `state`;
// otherwise the previously fitted statistics are applied unchanged.
Dataset encode_categoricals(const Dataset& data, PreprocessState& state, bool fit);
Dataset impute_mean(const Dataset& data, PreprocessState& state, bool fit);
Dataset standardize(const Dataset& data, PreprocessState& state, bool fit);

// Downsamples every class to the minority-class count, then shuffles rows.
Dataset undersample(const Dataset& data, std::uint64_t seed);

// The full chain in the fixed order encode -> impute -> standardize.
Dataset fit_transform(const Dataset& train, PreprocessState& state, const PreprocessSwitches& sw = {});
Dataset transform(const Dataset& data, const PreprocessState& state, const PreprocessSwitches& sw = {});

}  // namespace fsel
