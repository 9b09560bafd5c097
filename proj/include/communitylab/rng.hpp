#pragma once

// Seeded randomness. std::mt19937_64 output is fixed by the standard, but the
// std distributions are not, so bounded draws use rejection sampling here and
// every generated artifact is identical across standard libraries.
//
// Seed scheme: one root seed per run. A stage derives its own stream with
// derive_seed(root, "stage-name") and per-item streams with
// derive_seed(stage_seed, index). Both are splitmix64 finalizers over the
// combined value, so streams never depend on how many draws another stage made.

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace communitylab {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) noexcept {
    return splitmix64(seed ^ fnv1a(stage));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ (index * 0xd1342543de82ef95ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Bernoulli trial with probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

    /// Bernoulli trial with real probability, resolved on a 2^53 grid.
    bool chance(double p) {
        const double u = static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
        return u < p;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace communitylab
