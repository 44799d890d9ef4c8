// rng.hpp — counter-based splittable random streams (SplitMix64 + Box-Muller)
//
// Streams are keyed by (master seed, trajectory, component, step).  Every draw
// is a pure function of the key and the draw index, so ensembles are
// bit-reproducible under any parallel schedule.

#pragma once

#include <cmath>
#include <cstdint>

namespace gravdec::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Fold one key field into a stream key.
inline std::uint64_t mix_key(std::uint64_t key, std::uint64_t field) noexcept {
    return splitmix64(key ^ (splitmix64(field) + (key << 6) + (key >> 2)));
}

class Stream {
public:
    explicit Stream(std::uint64_t key) noexcept : state_(key) {}

    // Substream for (trajectory, component, step) style addressing.
    static Stream keyed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                        std::uint64_t c = 0) noexcept {
        return Stream(mix_key(mix_key(mix_key(master, a), b), c));
    }

    std::uint64_t next_u64() noexcept { return splitmix64(state_ += kGolden); }

    // Uniform in (0, 1]; never 0 so log() is safe.
    double next_uniform() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal pair (Box-Muller; no libm distribution objects so the
    // byte stream is identical across standard library implementations).
    void next_gaussian_pair(double& a, double& b) noexcept {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        a = r * std::cos(phi);
        b = r * std::sin(phi);
    }

    double next_gaussian() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double a, b;
        next_gaussian_pair(a, b);
        spare_ = b;
        have_spare_ = true;
        return a;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace gravdec::rng
