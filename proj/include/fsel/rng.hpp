#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace fsel {

std::uint64_t splitmix64(std::uint64_t& state);

// Order-sensitive mixing used to derive child seeds (per tree, per fold, per cell).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t hash_str(std::uint64_t seed, std::string_view s);

// Self-contained xoshiro256++ generator. Every distribution is hand-rolled so
// streams are identical across standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double gaussian();                     // standard normal, Box-Muller
    std::size_t below(std::size_t n);      // uniform in [0, n), n > 0

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    std::vector<std::size_t> permutation(std::size_t n);
    // k distinct values from [0, n), in shuffled order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fsel
