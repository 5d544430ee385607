#pragma once

#include <cstdint>
#include <vector>

#include "fsel/matrix.hpp"

namespace fsel {

struct IsolationForestParams {
    std::size_t n_trees = 100;
    std::size_t subsample = 0;  // 0 -> min(256, n)
    std::uint64_t seed = 0;
    double threshold = 0.6;  // a point is an outlier when its score exceeds this
    unsigned threads = 1;
};

struct IsolationResult {
    std::vector<double> scores;  // anomaly score per row, in (0, 1)
    double outlier_fraction = 0.0;
};

// Standard isolation forest: each tree grows on a seeded subsample with a
// uniformly random split feature and split point, height-limited at
// ceil(log2(subsample)); truncated leaves extend path lengths by c(leaf_size).
// Scores are 2^(-E[h(x)] / c(subsample)). Per-tree RNG streams are derived
// from (seed, tree index) so results do not depend on thread count.
IsolationResult isolation_forest_outliers(const Matrix& features, const IsolationForestParams& params);

}  // namespace fsel
