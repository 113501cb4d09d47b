#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace collapse {

// SplitMix64 finalizer (Steele, Lea & Flood / Vigna). Integer-only, so the
// derived streams are identical on every platform and thread schedule.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-path random stream: SplitMix64 core with uniform/Gaussian/exponential
// variate generation. Gaussian variates come from an explicit Box-Muller
// transform rather than std::normal_distribution, whose draw sequence is
// implementation-defined.
class PathRng {
public:
    explicit PathRng(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        return mix64(z);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe under log().
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal. Box-Muller; the second variate of each pair is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    // Exponential variate with the given mean.
    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Keyed derivation of an independent stream per path: (master_seed, path_index)
// is hashed through two SplitMix64 finalizer rounds with distinct odd salts.
// Pure integer math; identical result for any thread count or platform.
inline PathRng derive_path_rng(std::uint64_t master_seed, std::uint64_t path_index) {
    const std::uint64_t key = mix64(master_seed + 0x9E3779B97F4A7C15ULL);
    const std::uint64_t state = mix64(key ^ (path_index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    return PathRng(state);
}

} // namespace collapse
