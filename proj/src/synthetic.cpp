#include "fsel/synthetic.hpp"

#include <cmath>
#include <algorithm>
#include <set>

#include "fsel/rng.hpp"

namespace fsel {

namespace {

// Distinct hypercube vertices, one per class. For the binary case the second
// vertex is the complement of the first so every informative coordinate
// separates the classes; with more classes vertices are sampled distinct.
std::vector<std::vector<int>> pick_vertices(std::size_t n_classes, std::size_t dims, Rng& rng) {
    std::vector<std::vector<int>> vertices;
    std::vector<int> first(dims);
    for (auto& b : first) b = rng.next_u64() & 1 ? 1 : 0;
    vertices.push_back(first);
    if (n_classes == 2) {
        std::vector<int> complement(dims);
        for (std::size_t i = 0; i < dims; ++i) complement[i] = 1 - first[i];
        vertices.push_back(complement);
        return vertices;
    }
    std::set<std::vector<int>> seen{first};
    while (vertices.size() < n_classes) {
        std::vector<int> v(dims);
        for (auto& b : v) b = rng.next_u64() & 1 ? 1 : 0;
        if (seen.insert(v).second) vertices.push_back(std::move(v));
    }
    return vertices;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_samples;
    const std::size_t d = spec.n_features;
    const std::size_t n_inf = spec.n_informative;
    const std::size_t n_red = spec.n_redundant;

    // Independent streams per phase so each stage draws a fixed sequence.
    Rng rng_vertices(mix_seed(spec.seed, 1));
    Rng rng_informative(mix_seed(spec.seed, 2));
    Rng rng_coeffs(mix_seed(spec.seed, 3));
    Rng rng_noise_cols(mix_seed(spec.seed, 4));
    Rng rng_shuffle(mix_seed(spec.seed, 5));
    Rng rng_noise(mix_seed(spec.seed, 6));
    Rng rng_sparsity(mix_seed(spec.seed, 7));
    Rng rng_flip(mix_seed(spec.seed, 8));

    std::vector<double> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<double>(i % spec.n_classes);

    const auto vertices = pick_vertices(spec.n_classes, n_inf, rng_vertices);

    // Per-coordinate offsets shrink with sqrt(n_informative) so class_sep
    // controls the overall centroid distance; every informative column then
    // carries a comparable share of the signal instead of any one column
    // separating the classes on its own.
    const double coord_scale = spec.class_sep / std::sqrt(static_cast<double>(n_inf));
    Matrix raw(n, d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& vertex = vertices[static_cast<std::size_t>(labels[i])];
        for (std::size_t j = 0; j < n_inf; ++j) {
            const double center = (vertex[j] ? 1.0 : -1.0) * coord_scale;
            raw(i, j) = center + rng_informative.gaussian();
        }
    }
    for (std::size_t j = 0; j < n_red; ++j) {
        std::vector<double> coeffs(n_inf);
        for (auto& c : coeffs) c = rng_coeffs.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < n_inf; ++k) v += coeffs[k] * raw(i, k);
            raw(i, n_inf + j) = v;
        }
    }
    for (std::size_t j = n_inf + n_red; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i) raw(i, j) = rng_noise_cols.gaussian();

    // Column shuffle: output column j takes source column perm[j].
    const auto perm = rng_shuffle.permutation(d);
    Matrix shuffled(n, d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i) shuffled(i, j) = raw(i, perm[j]);

    std::vector<std::size_t> truth;
    for (std::size_t j = 0; j < d; ++j)
        if (perm[j] < n_inf) truth.push_back(j);

    if (spec.noise_sigma > 0.0)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) shuffled(i, j) += spec.noise_sigma * rng_noise.gaussian();

    if (spec.sparsity > 0.0)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (rng_sparsity.uniform() < spec.sparsity) shuffled(i, j) = 0.0;

    if (spec.label_flip > 0.0)
        for (std::size_t i = 0; i < n; ++i)
            if (rng_flip.uniform() < spec.label_flip) {
                const auto other = rng_flip.below(spec.n_classes - 1);
                const auto old = static_cast<std::size_t>(labels[i]);
                labels[i] = static_cast<double>(other >= old ? other + 1 : other);
            }

    Dataset out;
    out.features = std::move(shuffled);
    out.target = std::move(labels);
    out.task = spec.n_classes == 2 ? Task::binary : Task::multiclass;
    out.missing.assign(n * d, 0);
    out.feature_names.reserve(d);
    for (std::size_t j = 0; j < d; ++j) out.feature_names.push_back("f" + std::to_string(j));
    out.informative_truth = std::move(truth);
    out.validate();
    return out;
}

}  // namespace fsel
