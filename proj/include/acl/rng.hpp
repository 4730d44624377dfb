#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace acl {

// splitmix64 step; used to derive independent stream seeds from
// (master seed, replicate index, role) triples.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index, std::uint64_t role) {
    return splitmix64(splitmix64(splitmix64(master) ^ index) ^ (role * 0x9e3779b97f4a7c15ULL));
}

// Gaussian sampler on top of mt19937_64 with an explicit Box-Muller
// transform. std::normal_distribution's algorithm is implementation
// defined; spelling the transform out keeps streams reproducible for a
// given seed on any platform.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

    // uniform on (0, 1]
    double uniform() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // uniform integer in [0, n); n > 0. Modulo reduction: the bias is
    // negligible for simulation-sized n and the result is fully specified.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace acl
