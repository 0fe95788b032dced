#pragma once

// Deterministic random streams. Everything stochastic in this library draws
// from splitmix64 streams seeded through derive_seed, so a run is a pure
// function of its master seed: std:: engines and distributions are
// implementation-defined and would not reproduce across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace fapareto {

/// splitmix64 finalizer (Vigna). Also used as the seed-mixing primitive.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t seed_combine(std::uint64_t h, std::uint64_t v) noexcept {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return mix64(h);
}

/// Stable hash of (master, word...). Sub-seeds for independent streams are
/// derived from a master seed plus context words (purpose tag, generation,
/// index), which makes results independent of evaluation order.
template <typename... Words>
constexpr std::uint64_t derive_seed(std::uint64_t master, Words... words) noexcept {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
    ((h = seed_combine(h, static_cast<std::uint64_t>(words))), ...);
    return h;
}

class rng_stream {
public:
    explicit constexpr rng_stream(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next_u64() noexcept {
        return mix64(state_ += 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    constexpr double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, n). Fixed-point multiply; bias is O(n / 2^64).
    std::uint64_t next_below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller; the spare draw is cached.
    double next_gaussian() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        if (u1 == 0.0) u1 = 0x1.0p-53;
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Fisher-Yates driven by an rng_stream.
template <typename T>
void shuffle(std::vector<T>& v, rng_stream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace fapareto
