#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsel/matrix.hpp"

namespace fsel {

enum class Task { regression, binary, multiclass };

std::string to_string(Task task);
Task task_from_string(const std::string& s);

// Feature matrix + target + provenance. The universal currency of the toolkit.
//
// Classification targets are stored as contiguous integer codes 0..C-1 (held in
// doubles like everything else). Cells flagged in `missing` hold NaN until
// imputation. Columns that arrived as free text from a CSV live unencoded in
// `raw_categoricals` (keyed by column index) with NaN placeholders in `features`
// until encode_categoricals runs.
struct Dataset {
    Matrix features;
    std::vector<double> target;
    std::vector<std::string> feature_names;
    Task task = Task::regression;
    std::vector<std::uint8_t> missing;  // row-major n*d, 1 = originally missing
    std::map<std::size_t, std::vector<std::string>> raw_categoricals;
    std::optional<std::vector<std::size_t>> informative_truth;  // synthetic data only, sorted
    std::string target_name = "target";

    std::size_t n_rows() const { return features.rows(); }
    std::size_t n_cols() const { return features.cols(); }
    bool is_classification() const { return task != Task::regression; }

    bool is_missing(std::size_t r, std::size_t c) const { return missing[r * n_cols() + c] != 0; }
    void set_missing(std::size_t r, std::size_t c, bool m) { missing[r * n_cols() + c] = m ? 1 : 0; }
    bool has_missing() const;

    std::size_t n_classes() const;             // classification only
    std::vector<std::size_t> class_counts() const;
    std::vector<int> class_codes() const;      // target cast to int

    Dataset take_rows(std::span<const std::size_t> idx) const;

    void validate() const;  // throws std::invalid_argument on broken invariants
};

// Dials for the synthetic generator. Informative columns are Gaussian clusters
// around per-class hypercube vertices, redundant columns are seeded linear
// combinations of them, the rest is independent standard normal.
struct SyntheticSpec {
    std::size_t n_samples = 500;
    std::size_t n_features = 2000;
    std::size_t n_informative = 20;
    std::size_t n_redundant = 0;
    double sparsity = 0.0;      // probability each entry is zeroed
    double noise_sigma = 0.0;   // std of additive Gaussian feature noise
    double label_flip = 0.0;    // probability a label moves to a random other class
    double class_sep = 2.0;
    std::size_t n_classes = 2;
    std::uint64_t seed = 0;

    void validate() const;
};

}  // namespace fsel
