#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fsel/dataset.hpp"

namespace fsel {

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Deterministic row partition with test size round(test_fraction * n).
// Stratified splits keep each class within one sample of its exact quota;
// stratification is ignored for regression targets.
SplitIndices split_indices(const Dataset& data, double test_fraction, std::uint64_t seed, bool stratify);
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed, bool stratify);

// Test-fold index lists for k-fold cross validation (sorted within folds).
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);
std::vector<std::vector<std::size_t>> stratified_kfold_indices(const std::vector<int>& codes,
                                                               std::size_t k, std::uint64_t seed);

}  // namespace fsel
