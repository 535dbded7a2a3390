#pragma once

#include "sadic/cloud.hpp"
#include "sadic/directive_sequence.hpp"
#include "sadic/error.hpp"
#include "sadic/limit_word.hpp"
#include "sadic/numeric.hpp"
#include "sadic/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace sadic {

/// x -> x + t (mod 1) on the torus R^k / Z^k.
struct TorusTranslation {
    std::vector<BigFloat> t;
    std::vector<BigFloat> x0;
    unsigned bits = kDefaultPrecisionBits;

    /// Precision for N steps: 64 bits beyond log2 N.
    static unsigned bits_for(std::size_t N)
    {
        unsigned b = 64;
        while (N > 1) {
            ++b;
            N >>= 1;
        }
        return std::max(b, 128u);
    }

    static TorusTranslation from_double(const std::vector<double>& t, const std::vector<double>& x0, unsigned bits)
    {
        if (t.size() != x0.size()) fail(ErrorKind::InvalidArgument, "translation and start dimensions differ");
        PrecisionGuard guard(bits);
        TorusTranslation r;
        r.bits = bits;
        for (double v : t) r.t.emplace_back(v);
        for (double v : x0) r.x0.emplace_back(v);
        return r;
    }
};

inline BigFloat frac(const BigFloat& v) { return v - floor(v); }

/// R_t^n(x0) = x0 + n t (mod 1) for n < N, by the direct formula.
inline std::vector<std::vector<double>> translation_orbit(const TorusTranslation& r, std::size_t N)
{
    PrecisionGuard guard(r.bits);
    std::vector<std::vector<double>> out;
    out.reserve(N);
    for (std::size_t n = 0; n < N; ++n) {
        std::vector<double> p;
        for (std::size_t k = 0; k < r.t.size(); ++k)
            p.push_back(static_cast<double>(frac(r.x0[k] + BigFloat(n) * r.t[k])));
        out.push_back(std::move(p));
    }
    return out;
}

/// The same orbit by N-fold addition, for cross-checking the direct formula.
inline std::vector<std::vector<double>> translation_orbit_iterated(const TorusTranslation& r, std::size_t N)
{
    PrecisionGuard guard(r.bits);
    std::vector<std::vector<double>> out;
    out.reserve(N);
    std::vector<BigFloat> x = r.x0;
    for (auto& v : x) v = frac(v);
    for (std::size_t n = 0; n < N; ++n) {
        std::vector<double> p;
        for (const auto& v : x) p.push_back(static_cast<double>(v));
        out.push_back(std::move(p));
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = frac(x[k] + r.t[k]);
    }
    return out;
}

/// Distance between a and b on R / Z.
inline double circle_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), 1.0);
    return std::min(d, 1.0 - d);
}

struct CodingReport {
    std::size_t N = 0;
    double epsilon = 0;
    std::size_t depth = 0;
    std::size_t cloud_points = 0;
    std::size_t matches = 0;
    double match_fraction = 1;
    /// -1 for the natural coding convention, +1 for the negative control.
    int sign = -1;
    /// First n whose orbit point has no cloud point of letter w_n nearby.
    std::vector<std::size_t> misses;
};

/// For n < N, checks that R_t^n(0) with t = pi(u) lies within epsilon
/// (mod Z^{d-1}) of sign * pi(c) for a cloud point c of subtile w_n, where
/// w is the limit word and pi omits the last coordinate.
inline CodingReport coding_consistency(const DirectiveSequence& seq, const SimplexPoint& u, std::size_t N,
                                       double epsilon, int sign = -1, std::size_t max_misses = 16)
{
    int d = seq.dimension();
    CodingReport rep;
    rep.N = N;
    rep.epsilon = epsilon;
    rep.sign = sign;
    if (N == 0) return rep;
    if (epsilon <= 0 || epsilon >= 0.5) fail(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1/2)");

    ProjectionFrame frame(u);
    std::size_t depth = depth_for_points(seq, 10 * N);
    FractalCloud c = cloud(seq, frame, depth, 1);
    if (c.size() < 10 * N)
        fail(ErrorKind::CloudTooSparse, "cloud has " + std::to_string(c.size()) + " points, need " + std::to_string(10 * N));
    rep.depth = depth;
    rep.cloud_points = c.size();

    // Cloud points by letter, keyed by torus cells of side >= epsilon.
    auto cells_per_axis = static_cast<std::int64_t>(std::floor(1.0 / epsilon));
    auto cell_of = [&](const std::vector<double>& p) {
        std::vector<std::int64_t> key;
        for (double v : p)
            key.push_back(std::min(cells_per_axis - 1, static_cast<std::int64_t>(std::floor(v * cells_per_axis))));
        return key;
    };
    std::vector<std::map<std::vector<std::int64_t>, std::vector<std::vector<double>>>> index(d);
    for (std::size_t k = 0; k < c.size(); ++k) {
        auto w = frame.ambient(c.point(k));
        std::vector<double> p;
        for (int i = 0; i + 1 < d; ++i) {
            double v = static_cast<double>(sign * w[i]);
            p.push_back(v - std::floor(v));
        }
        index[c.letter(k) - 1][cell_of(p)].push_back(p);
    }

    Word word = limit_word_prefix(seq, N);
    {
        unsigned bits = TorusTranslation::bits_for(N);
        PrecisionGuard guard(bits);
        TorusTranslation r;
        r.bits = bits;
        auto uf = u.as_float(bits);
        for (int i = 0; i + 1 < d; ++i) {
            r.t.push_back(uf[i]);
            r.x0.push_back(BigFloat(0));
        }
        auto orbit = translation_orbit(r, N);
        for (std::size_t n = 0; n < N; ++n) {
            const auto& x = orbit[n];
            auto key = cell_of(x);
            const auto& idx = index[word[n] - 1];
            bool hit = false;
            std::vector<std::int64_t> off(d - 1, -1);
            while (!hit) {
                std::vector<std::int64_t> k2(d - 1);
                for (int i = 0; i + 1 < d; ++i) k2[i] = ((key[i] + off[i]) % cells_per_axis + cells_per_axis) % cells_per_axis;
                auto it = idx.find(k2);
                if (it != idx.end())
                    for (const auto& p : it->second) {
                        bool close = true;
                        for (int i = 0; i + 1 < d && close; ++i) close = circle_distance(p[i], x[i]) <= epsilon;
                        if (close) {
                            hit = true;
                            break;
                        }
                    }
                int i = 0;
                while (i + 1 < d && off[i] == 1) {
                    off[i] = -1;
                    ++i;
                }
                if (i + 1 >= d) break;
                ++off[i];
            }
            if (hit) ++rep.matches;
            else if (rep.misses.size() < max_misses) rep.misses.push_back(n);
        }
    }
    rep.match_fraction = static_cast<double>(rep.matches) / static_cast<double>(N);
    return rep;
}

} // namespace sadic
