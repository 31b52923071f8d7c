#ifndef KS2_PRNG_HPP
#define KS2_PRNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace ks2 {

// splitmix64 (Steele, Lea, Flood 2014). Chosen as the fixed, documented
// generator so corpora regenerate bit-identically on any platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in (0, 1]
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // standard normal pair via Box-Muller
    std::pair<double, double> next_gaussian_pair() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    // angle in [0, 2*pi)
    double next_angle() {
        return 2.0 * std::numbers::pi * static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // derive an independent stream, e.g. one per generated object
    SplitMix64 split() { return SplitMix64(next_u64()); }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

}  // namespace ks2

#endif
