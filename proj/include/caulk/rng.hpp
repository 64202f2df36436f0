#ifndef CAULK_RNG_HPP
#define CAULK_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "caulk/common.hpp"

namespace caulk {

/// Deterministic splitmix64 generator. Self-contained so that results are
/// bit-identical across platforms and standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer uniform on [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (no cached spare, for reproducibility
    /// independent of call interleaving).
    double normal() {
        double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Child generator for an independent stream.
    Rng split() { return Rng(next_u64() ^ 0xA5A5A5A5A5A5A5A5ULL); }

  private:
    std::uint64_t state_;
};

/// Derives a per-cell seed from a master seed and a textual cell key.
/// All sweeps and generators key their randomness this way; there is no
/// shared mutable generator state anywhere.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = fnv1a64(tag);
    h ^= 0x9E3779B97F4A7C15ULL + a + (h << 6) + (h >> 2);
    h ^= 0xC2B2AE3D27D4EB4FULL + b + (h << 6) + (h >> 2);
    Rng r(master ^ h);
    return r.next_u64();
}

}  // namespace caulk

#endif  // CAULK_RNG_HPP
