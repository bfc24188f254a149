#pragma once

// Counter-based splittable RNG: every trajectory derives its own stream from
// (master_seed, index) without any shared state, so parallel runs are
// reproducible and order-independent.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace abreact {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// k-th element of the SplitMix64 stream seeded by `master` — random access,
// no sequential dependency.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) noexcept {
    return mix64(master + (k + 1) * kGolden);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform on (0, 1]; never returns 0 so it is safe under log().
    double next_unit() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // One Box-Muller pair of independent standard normals.
    std::pair<double, double> next_normal_pair() noexcept {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

  private:
    std::uint64_t state_;
};

}  // namespace abreact
