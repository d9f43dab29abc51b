#pragma once
// Deterministic randomness for sampling, splitting, and training.
//
// The engine is std::mt19937_64, whose seeded output sequence is pinned
// bit-exactly by the standard, so runs reproduce across platforms and
// compilers. The distribution helpers are hand-rolled because the standard
// <random> distributions are implementation-defined:
//   below(n)  - rejection sampling on the top range, unbiased
//   unit()    - 53 high bits scaled by 2^-53, uniform in [0,1)
//   shuffle   - Fisher-Yates, descending index

#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include "ukge/errors.hpp"

namespace ukge {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng from_entropy() {
        std::random_device rd;
        std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        return Rng(seed);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw DataError("Rng::below: empty range");
        std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return r % n;
    }

    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

    bool coin() { return (next_u64() >> 63) != 0; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct values from [0, n), in draw order. Partial Fisher-Yates with
    // sparse displacement tracking; O(k) memory.
    std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k) {
        if (k > n) throw DataError("sample_without_replacement: k > n");
        std::unordered_map<std::uint64_t, std::uint64_t> displaced;
        auto slot = [&](std::uint64_t i) {
            auto it = displaced.find(i);
            return it == displaced.end() ? i : it->second;
        };
        std::vector<std::uint64_t> out;
        out.reserve(static_cast<std::size_t>(k));
        for (std::uint64_t i = 0; i < k; ++i) {
            std::uint64_t j = i + below(n - i);
            out.push_back(slot(j));
            displaced[j] = slot(i);
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

// Stateless mix for deriving independent stream seeds (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace ukge
