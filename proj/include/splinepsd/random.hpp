#ifndef SPLINEPSD_RANDOM_HPP
#define SPLINEPSD_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <initializer_list>
#include <limits>
#include <random>

namespace splinepsd {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for an independent stream identified by (master, path...).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(master);
    for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double sample_beta(double a, double b, Rng& rng) {
    const double x = std::gamma_distribution<double>(a, 1.0)(rng);
    const double y = std::gamma_distribution<double>(b, 1.0)(rng);
    return x / (x + y);
}

/// Inverse-gamma draw with density proportional to x^(-shape-1) exp(-scale/x).
/// For tiny shapes (the 0.001 default) the gamma variate underflows to zero
/// about half the time; such draws are clamped to the largest finite double.
inline double sample_inverse_gamma(double shape, double scale, Rng& rng) {
    const double g = std::gamma_distribution<double>(shape, 1.0)(rng);
    constexpr double top = std::numeric_limits<double>::max();
    if (!(g > 0.0)) return top;
    return std::min(scale / g, top);
}

} // namespace splinepsd

#endif // SPLINEPSD_RANDOM_HPP
