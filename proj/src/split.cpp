#include "fsel/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fsel/rng.hpp"

namespace fsel {

namespace {

std::vector<std::vector<std::size_t>> members_by_class(const std::vector<int>& codes) {
    int max_code = 0;
    for (int c : codes) max_code = std::max(max_code, c);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_code) + 1);
    for (std::size_t i = 0; i < codes.size(); ++i) members[static_cast<std::size_t>(codes[i])].push_back(i);
    return members;
}

}  // namespace

SplitIndices split_indices(const Dataset& data, double test_fraction, std::uint64_t seed, bool stratify) {
    const std::size_t n = data.n_rows();
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw std::invalid_argument("test_fraction must be in (0,1)");
    if (n < 4) throw std::invalid_argument("train_test_split needs at least 4 rows");

    const auto test_total = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    SplitIndices out;

    if (!stratify || !data.is_classification()) {
        Rng rng(seed);
        auto perm = rng.permutation(n);
        out.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(test_total));
        out.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(test_total), perm.end());
    } else {
        auto members = members_by_class(data.class_codes());
        for (std::size_t c = 0; c < members.size(); ++c) {
            if (members[c].size() < 2)
                throw std::invalid_argument("stratified split: class " + std::to_string(c) +
                                            " has fewer than 2 members");
            Rng rng(mix_seed(seed, c));
            rng.shuffle(members[c]);
        }
        // Largest-remainder allocation: every class lands within one sample of
        // its exact quota and the totals match round(test_fraction * n).
        std::vector<std::size_t> take(members.size());
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t c = 0; c < members.size(); ++c) {
            const double quota = test_fraction * static_cast<double>(members[c].size());
            take[c] = static_cast<std::size_t>(std::floor(quota));
            assigned += take[c];
            remainders.emplace_back(quota - std::floor(quota), c);
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t i = 0; assigned < test_total && i < remainders.size(); ++i, ++assigned)
            ++take[remainders[i].second];
        for (std::size_t c = 0; c < members.size(); ++c) {
            for (std::size_t i = 0; i < members[c].size(); ++i)
                (i < take[c] ? out.test : out.train).push_back(members[c][i]);
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed, bool stratify) {
    const auto idx = split_indices(data, test_fraction, seed, stratify);
    return {data.take_rows(idx.train), data.take_rows(idx.test)};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) throw std::invalid_argument("kfold: need 2 <= k <= n");
    Rng rng(seed);
    auto perm = rng.permutation(n);
    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                        perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
        std::sort(folds[f].begin(), folds[f].end());
        pos += size;
    }
    return folds;
}

std::vector<std::vector<std::size_t>> stratified_kfold_indices(const std::vector<int>& codes,
                                                               std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > codes.size()) throw std::invalid_argument("stratified kfold: need 2 <= k <= n");
    auto members = members_by_class(codes);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t c = 0; c < members.size(); ++c) {
        Rng rng(mix_seed(seed, c));
        rng.shuffle(members[c]);
        // Class offset staggers which folds receive the remainder members.
        for (std::size_t i = 0; i < members[c].size(); ++i) folds[(i + c) % k].push_back(members[c][i]);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

}  // namespace fsel
