#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace faassim {

// splitmix64 finalizer; also used as a stateless stable hash for
// locality-style placement decisions.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Maps a 64-bit hash onto [0, n) without modulo bias (multiply-shift).
inline constexpr std::uint64_t bounded_hash(std::uint64_t h, std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(h) * static_cast<unsigned __int128>(n)) >> 64);
}

// Seeded pseudo-random stream: xoshiro256** with splitmix64 state expansion.
//
// Streams for distinct purposes are derived from (seed, purpose-tag) via
// Rng::substream, so the arrival/execution/popularity draws of a workload
// are unaffected by how many random decisions a policy makes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) {
            x = mix64(x);
            s = x;
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    static Rng substream(std::uint64_t seed, std::string_view purpose) {
        return Rng(mix64(seed ^ fnv1a64(purpose)));
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1): 52-bit mantissa offset by 1/2 ulp,
    // so log() and inverse-CDF transforms never see 0 or 1.
    double uniform01() noexcept {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    double uniform(double a, double b) noexcept { return a + (b - a) * uniform01(); }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller (cosine branch; the sine value is
    // discarded to keep the stream position a fixed two draws per sample).
    double normal() noexcept {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t seed_echo() const noexcept { return state_[0]; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// exp(N(mu, sigma^2)); strictly positive.
inline double sample_lognormal(Rng& rng, double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sample_lognormal: sigma must be > 0");
    return std::exp(mu + sigma * rng.normal());
}

// Exponential with the given mean; strictly positive.
inline double sample_exponential(Rng& rng, double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("sample_exponential: mean must be > 0");
    return -mean * std::log(rng.uniform01());
}

// Draws an index from a cumulative probability vector (ascending, last ~1).
inline std::size_t sample_cumulative(Rng& rng, const std::vector<double>& cumulative) {
    const double u = rng.uniform01();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cumulative[mid] < u)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

} // namespace faassim
