#include "fsel/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsel/parallel.hpp"
#include "fsel/rng.hpp"

namespace fsel {

namespace {

struct IsoNode {
    int feature = -1;  // -1 = leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    std::size_t size = 0;  // leaf population
};

struct IsoTree {
    std::vector<IsoNode> nodes;
};

// Average unsuccessful-search path length of a BST with k external nodes,
// using exact harmonic numbers: c(k) = 2 H(k-1) - 2 (k-1) / k, c(<=1) = 0.
class PathNormalizer {
public:
    explicit PathNormalizer(std::size_t max_size) : harmonic_(max_size + 1, 0.0) {
        for (std::size_t i = 1; i <= max_size; ++i)
            harmonic_[i] = harmonic_[i - 1] + 1.0 / static_cast<double>(i);
    }
    double c(std::size_t k) const {
        if (k <= 1) return 0.0;
        const double km1 = static_cast<double>(k - 1);
        return 2.0 * harmonic_[k - 1] - 2.0 * km1 / static_cast<double>(k);
    }

private:
    std::vector<double> harmonic_;
};

int grow(IsoTree& tree, const Matrix& X, std::vector<std::size_t>& rows, std::size_t begin,
         std::size_t end, std::size_t depth, std::size_t height_limit, Rng& rng) {
    const std::size_t count = end - begin;
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (count <= 1 || depth >= height_limit) {
        tree.nodes[id].size = count;
        return id;
    }

    // Candidate features are those that actually vary inside this node.
    std::vector<std::pair<std::size_t, std::pair<double, double>>> usable;
    for (std::size_t f = 0; f < X.cols(); ++f) {
        double lo = X(rows[begin], f), hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double v = X(rows[i], f);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi > lo) usable.push_back({f, {lo, hi}});
    }
    if (usable.empty()) {
        tree.nodes[id].size = count;
        return id;
    }

    const auto& [feature, range] = usable[rng.below(usable.size())];
    const double split = rng.uniform(range.first, range.second);  // [lo, hi): both sides non-empty

    auto middle = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                 rows.begin() + static_cast<std::ptrdiff_t>(end),
                                 [&](std::size_t r) { return X(r, feature) <= split; });
    const auto mid = static_cast<std::size_t>(middle - rows.begin());

    tree.nodes[id].feature = static_cast<int>(feature);
    tree.nodes[id].split = split;
    const int left = grow(tree, X, rows, begin, mid, depth + 1, height_limit, rng);
    const int right = grow(tree, X, rows, mid, end, depth + 1, height_limit, rng);
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    return id;
}

double path_length(const IsoTree& tree, const Matrix& X, std::size_t row, const PathNormalizer& norm) {
    int node = 0;
    double depth = 0.0;
    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
        node = X(row, static_cast<std::size_t>(nd.feature)) <= nd.split ? nd.left : nd.right;
        depth += 1.0;
    }
    return depth + norm.c(tree.nodes[static_cast<std::size_t>(node)].size);
}

}  // namespace

IsolationResult isolation_forest_outliers(const Matrix& features, const IsolationForestParams& params) {
    const std::size_t n = features.rows();
    if (n < 8) throw std::invalid_argument("isolation forest: need at least 8 rows");
    const std::size_t psi = params.subsample == 0 ? std::min<std::size_t>(256, n)
                                                  : std::min(params.subsample, n);
    const auto height_limit =
        static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi))));
    PathNormalizer norm(std::max(psi, n));

    std::vector<IsoTree> trees(params.n_trees);
    parallel_for(params.n_trees, params.threads, [&](std::size_t t) {
        Rng rng(mix_seed(params.seed, t));
        auto rows = rng.sample_without_replacement(n, psi);
        grow(trees[t], features, rows, 0, rows.size(), 0, height_limit, rng);
    });

    IsolationResult result;
    result.scores.resize(n);
    const double denom = std::max(norm.c(psi), 1e-12);
    std::size_t outliers = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (const auto& tree : trees) total += path_length(tree, features, i, norm);
        const double mean_path = total / static_cast<double>(params.n_trees);
        result.scores[i] = std::pow(2.0, -mean_path / denom);
        if (result.scores[i] > params.threshold) ++outliers;
    }
    result.outlier_fraction = static_cast<double>(outliers) / static_cast<double>(n);
    return result;
}

}  // namespace fsel
