#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "rankcsp/rational.hpp"

namespace rankcsp {

/// Seeded generator whose draws are identical on every platform: the engine
/// output of mt19937_64 is fully specified, and the range reductions below
/// avoid the implementation-defined standard distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// True with probability exactly p (p clamped to [0, 1]).
    bool bernoulli(const Rational& p) {
        if (p <= 0) return false;
        if (p >= 1) return true;
        return below(static_cast<std::uint64_t>(p.denominator())) <
               static_cast<std::uint64_t>(p.numerator());
    }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    /// Uniform r-subset of {0..n-1}, ascending (Floyd's algorithm).
    std::vector<int> subset(int n, int r) {
        std::vector<int> chosen;
        chosen.reserve(static_cast<std::size_t>(r));
        for (int j = n - r; j < n; ++j) {
            int t = static_cast<int>(below(static_cast<std::uint64_t>(j) + 1));
            if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
                chosen.push_back(t);
            else
                chosen.push_back(j);
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace rankcsp
