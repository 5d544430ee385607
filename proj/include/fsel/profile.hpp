#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>

#include "fsel/dataset.hpp"

namespace fsel {

// One statistical summary row per dataset.
struct DatasetProfile {
    std::size_t instances = 0;
    std::map<int, double> class_distribution;       // class -> percent; classification only
    std::optional<double> max_feature_correlation;  // absent with fewer than 2 usable columns
    double avg_variance = 0.0;                      // mean of per-column population variances
    double target_skewness = 0.0;
    double outlier_fraction = 0.0;
    double dimensionality_ratio = 0.0;  // n_features / n_samples
};

// Sample skewness m3 / m2^1.5 with 1/n central moments; 0 for constant input.
double skewness(std::span<const double> values);

struct CorrelationOptions {
    bool exact = false;               // force the exhaustive pair scan
    std::size_t exact_limit = 500;    // exhaustive up to this many usable columns
    std::size_t sample_pairs = 100000;
    std::uint64_t seed = 0;
};

// Max |Pearson r| over distinct non-constant column pairs. Exhaustive up to
// exact_limit columns, beyond that a seeded sample of column pairs.
double max_abs_correlation(const Matrix& features, const CorrelationOptions& options = {});

// Assembles the full profile; requires encoded, imputed features.
DatasetProfile profile_dataset(const Dataset& data, std::uint64_t seed = 0);

}  // namespace fsel
