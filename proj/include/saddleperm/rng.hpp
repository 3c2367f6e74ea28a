#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace saddleperm {

// Reproducibility contract
// ------------------------
// All randomness in this library flows through one fixed, fully specified
// generator so that a run is reproducible bit for bit from its 64-bit seed,
// on any platform and for any worker count.
//
// Generator: splitmix64 (Steele, Lea & Flood, 2014).
//   state += 0x9e3779b97f4a7c15
//   z = state
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   return z ^ (z >> 31)
//
// Uniform doubles take the top 53 bits: (x >> 11) * 2^-53, in [0, 1).
// Normals come from Box-Muller on two uniforms; bounded integers use
// rejection sampling, so every draw is exactly uniform.
//
// Independent sub-streams are derived, never split from shared state:
// stream `index` for purpose tag `purpose` under master seed `seed` starts at
//   mix(mix(mix(seed) ^ purpose) ^ index)
// where mix() is the splitmix64 output function above applied once.

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return splitmix64_mix(state_);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double next_positive() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller, second value cached.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_positive();
        const double u2 = next_double();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        spare_ = mag * std::sin(two_pi * u2);
        have_spare_ = true;
        return mag * std::cos(two_pi * u2);
    }

    // Uniform integer in [0, n); unbiased by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Uniform direction on the unit sphere in R^dim (normalized normals).
    std::vector<double> unit_vector(int dim) {
        std::vector<double> s(static_cast<std::size_t>(dim));
        for (;;) {
            double norm_sq = 0.0;
            for (auto& c : s) {
                c = next_normal();
                norm_sq += c * c;
            }
            if (norm_sq > 1e-300) {
                const double inv = 1.0 / std::sqrt(norm_sq);
                for (auto& c : s) c *= inv;
                return s;
            }
        }
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Purpose tags for derived streams. Values are part of the reproducibility
// contract; renumbering changes all seeded output.
namespace streams {
constexpr std::uint64_t sphere_direction = 1;
constexpr std::uint64_t permutation = 2;
constexpr std::uint64_t data_generation = 3;
constexpr std::uint64_t grid_cell = 4;
}  // namespace streams

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                                 std::uint64_t index) {
    return splitmix64_mix(splitmix64_mix(splitmix64_mix(seed) ^ purpose) ^ index);
}

inline Rng derive_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    return Rng(derive_seed(seed, purpose, index));
}

}  // namespace saddleperm
