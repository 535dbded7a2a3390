#pragma once

#include "sadic/numeric.hpp"
#include "sadic/simplex_point.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace sadic {

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: output k of stream s under seed is a pure
/// function of (seed, s, k), so results do not depend on scheduling.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL)))
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return UINT64_MAX; }

    result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1).
    double uniform_open()
    {
        double u;
        do u = uniform();
        while (u == 0.0);
        return u;
    }

    /// Uniform float in [0, 1) carrying `bits` random bits; call inside a guard.
    BigFloat uniform_float(unsigned bits)
    {
        BigFloat v = 0, scale = 1;
        for (unsigned b = 0; b < bits + 64; b += 64) {
            scale = ldexp(scale, -64);
            v += BigFloat((*this)()) * scale;
        }
        return v;
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Lebesgue-uniform point of the simplex in double precision.
inline std::vector<double> random_simplex_double(CounterRng& rng, int d)
{
    std::vector<double> u(d - 1);
    for (auto& v : u) v = rng.uniform();
    std::sort(u.begin(), u.end());
    std::vector<double> x(d);
    double prev = 0;
    for (int i = 0; i < d - 1; ++i) {
        x[i] = u[i] - prev;
        prev = u[i];
    }
    x[d - 1] = 1.0 - prev;
    return x;
}

/// Lebesgue-uniform point of the simplex at `bits` bits of precision.
inline SimplexPoint random_simplex_point(CounterRng& rng, int d, unsigned bits = kDefaultPrecisionBits)
{
    PrecisionGuard guard(bits);
    std::vector<BigFloat> u;
    for (int i = 0; i < d - 1; ++i) u.push_back(rng.uniform_float(bits));
    std::sort(u.begin(), u.end());
    std::vector<BigFloat> x;
    BigFloat prev = 0;
    for (const auto& v : u) {
        x.push_back(v - prev);
        prev = v;
    }
    x.push_back(BigFloat(1) - prev);
    return SimplexPoint::floating(std::move(x), bits);
}

inline SimplexPoint random_simplex_point(std::uint64_t seed, int d, unsigned bits = kDefaultPrecisionBits)
{
    CounterRng rng(seed);
    return random_simplex_point(rng, d, bits);
}

} // namespace sadic
