#pragma once

#include <cstdint>
#include <cstddef>
#include <string_view>
#include <vector>

namespace ada {

// Deterministic, platform-independent generator. std::random distributions
// are implementation-defined, so every draw the artifact makes goes through
// this splitmix64 core instead; identical seeds give identical byte streams
// on every compiler and platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; never exactly zero (safe to normalize by).
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling over the top multiple of n
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Derive an independent child seed from (seed, label[, index]). The fixed
/// scheme is what makes one master seed reproducibly fan out across modules.
inline std::uint64_t split_seed(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
    Rng mix(seed ^ fnv1a64(label));
    mix.next_u64();
    std::uint64_t a = mix.next_u64();
    Rng mix2(a ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    mix2.next_u64();
    return mix2.next_u64();
}

/// k distinct indices drawn from [0, n) (partial Fisher-Yates), in draw order.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

} // namespace ada
