#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace mortml {

/// Deterministic random source. Every stochastic operation in the toolkit
/// takes an explicit seed and consumes draws in a documented order, so a
/// seed fully reproduces a result.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), bound > 0. Multiply-shift mapping;
    /// the bias is O(bound / 2^64).
    std::uint64_t below(std::uint64_t bound) {
        const unsigned __int128 product =
            static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(bound);
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(below(i + 1));
            std::swap(items[i], items[j]);
        }
    }

    /// `count` distinct values drawn from [0, pool), returned sorted.
    std::vector<int> sample_without_replacement(int pool, int count) {
        std::vector<int> all(static_cast<std::size_t>(pool));
        std::iota(all.begin(), all.end(), 0);
        if (count > pool) count = pool;
        for (int i = 0; i < count; ++i) {
            const auto j = i + static_cast<int>(below(static_cast<std::uint64_t>(pool - i)));
            std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
        }
        all.resize(static_cast<std::size_t>(count));
        std::sort(all.begin(), all.end());
        return all;
    }

    std::uint64_t next_raw() { return engine_(); }

    /// Stable sub-stream seed for (seed, stream) pairs, e.g. per-tree seeds
    /// in a forest. SplitMix64 finalizer, so streams are order-independent.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace mortml
