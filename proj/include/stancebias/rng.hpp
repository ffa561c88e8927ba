#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace stancebias {

// FNV-1a over bytes. Used for cache keys and seed derivation; stable across
// platforms, not cryptographic.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state);

std::uint64_t splitmix64(std::uint64_t x);

// Derives the per-sample generator key: a pure function of (seed, index) so
// sample streams are reproducible regardless of evaluation order.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index);

// Maps a 64-bit hash to [0, 1) using the top 53 bits.
double unit_double(std::uint64_t h);

// Deterministic generator: mt19937_64 output is pinned by the standard, and
// bounded draws below avoid the implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased integer in [0, bound); bound must be nonzero.
    std::uint64_t below(std::uint64_t bound);

    double unit() { return unit_double(next()); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices drawn uniformly from [0, n), k <= n. Partial
    // Fisher-Yates; order of the result is the draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
};

} // namespace stancebias
