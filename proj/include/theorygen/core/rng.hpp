#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "theorygen/core/digest.hpp"

namespace theorygen {

/// Deterministic RNG used for every seeded decision in the pipeline
/// (subsampling, bootstrap, Monte Carlo, law sampling, mock responses).
///
/// SplitMix64 with fixed draw algorithms, so sequences are identical across
/// compilers and platforms (the standard <random> distributions are
/// implementation-defined and would not be). Contract, relied on by the
/// reference oracles in the tests:
///   next()            : SplitMix64 step
///   below(n)          : next() % n
///   unit()            : (next() >> 11) * 2^-53, in [0, 1)
///   shuffle(v)        : Fisher-Yates, for i = size-1 .. 1 swap(v[i], v[below(i+1)])
///   sample_indices(n,k): shuffle [0..n), take first k, sort ascending
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    /// k distinct indices drawn uniformly from [0, n), returned in ascending order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::uint64_t state_;
};

/// Independent seed for a named sub-stream of a root seed. Labels keep the
/// pipeline's consumers (subsampler, bootstrap, ...) from sharing a sequence.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
    return fnv1a64(label, fnv1a64_mix(root, 0xcbf29ce484222325ull));
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index) {
    return fnv1a64_mix(index, derive_seed(root, label));
}

}  // namespace theorygen
