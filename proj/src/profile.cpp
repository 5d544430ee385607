#include "fsel/profile.hpp"

#include <cmath>
#include <stdexcept>

#include "fsel/isolation_forest.hpp"
#include "fsel/rng.hpp"

namespace fsel {

double skewness(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("skewness: need at least 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (m2 == 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

double max_abs_correlation(const Matrix& features, const CorrelationOptions& options) {
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    if (n < 2) throw std::invalid_argument("max_abs_correlation: need at least 2 rows");

    // Standardize usable (non-constant) columns once; a pair correlation is
    // then a dot product over n.
    std::vector<std::vector<double>> cols;
    cols.reserve(d);
    for (std::size_t c = 0; c < d; ++c) {
        auto col = features.column(c);
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double& v : col) {
            v -= mean;
            ss += v * v;
        }
        if (ss <= 0.0) continue;  // constant column: skipped
        const double inv = 1.0 / std::sqrt(ss);
        for (double& v : col) v *= inv;
        cols.push_back(std::move(col));
    }
    const std::size_t usable = cols.size();
    if (usable < 2)
        throw std::invalid_argument("max_abs_correlation: fewer than 2 non-constant columns");

    auto pair_abs_r = [&](std::size_t a, std::size_t b) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += cols[a][i] * cols[b][i];
        return std::min(std::abs(dot), 1.0);
    };

    double best = 0.0;
    if (options.exact || usable <= options.exact_limit) {
        for (std::size_t a = 0; a + 1 < usable; ++a)
            for (std::size_t b = a + 1; b < usable; ++b) best = std::max(best, pair_abs_r(a, b));
    } else {
        Rng rng(options.seed);
        for (std::size_t k = 0; k < options.sample_pairs; ++k) {
            const std::size_t a = rng.below(usable);
            std::size_t b = rng.below(usable - 1);
            if (b >= a) ++b;
            best = std::max(best, pair_abs_r(a, b));
        }
    }
    return best;
}

DatasetProfile profile_dataset(const Dataset& data, std::uint64_t seed) {
    if (!data.raw_categoricals.empty())
        throw std::invalid_argument("profile_dataset: encode categorical columns first");
    if (data.has_missing())
        throw std::invalid_argument("profile_dataset: impute missing values first");

    DatasetProfile p;
    const std::size_t n = data.n_rows();
    const std::size_t d = data.n_cols();
    p.instances = n;
    p.dimensionality_ratio = static_cast<double>(d) / static_cast<double>(n);

    if (data.is_classification()) {
        const auto counts = data.class_counts();
        for (std::size_t c = 0; c < counts.size(); ++c)
            p.class_distribution[static_cast<int>(c)] =
                100.0 * static_cast<double>(counts[c]) / static_cast<double>(n);
    }

    double var_sum = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += data.features(r, c);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dev = data.features(r, c) - mean;
            ss += dev * dev;
        }
        var_sum += ss / static_cast<double>(n);
    }
    p.avg_variance = var_sum / static_cast<double>(d);

    try {
        p.max_feature_correlation = max_abs_correlation(data.features, {.seed = seed});
    } catch (const std::invalid_argument&) {
        p.max_feature_correlation = std::nullopt;
    }

    p.target_skewness = skewness(data.target);

    IsolationForestParams iso;
    iso.seed = mix_seed(seed, 0x150);
    p.outlier_fraction = isolation_forest_outliers(data.features, iso).outlier_fraction;
    return p;
}

}  // namespace fsel
