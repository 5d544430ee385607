#pragma once

#include "fsel/dataset.hpp"

namespace fsel {

// Deterministic synthetic classification data. Pipeline order: informative
// Gaussian clusters around per-class hypercube vertices (+/- class_sep per
// coordinate), redundant linear combinations, independent noise columns,
// column shuffle, additive Gaussian noise, sparsification, label flips.
// Identical specs (including seed) produce byte-identical datasets.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace fsel
