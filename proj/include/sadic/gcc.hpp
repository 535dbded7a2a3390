#pragma once

#include "sadic/directive_sequence.hpp"
#include "sadic/error.hpp"
#include "sadic/language.hpp"
#include "sadic/limit_word.hpp"
#include "sadic/numeric.hpp"
#include "sadic/simplex_point.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sadic {

struct GccWitness {
    std::size_t n = 0;
    double C = 0;
    /// Shift in 1-perp, ambient coordinates.
    std::vector<double> z;
    Letter i = 1;
    /// Pairs (y, j) enumerated on the left-hand side.
    std::size_t left_size = 0;
    /// Pairs (l(p), j) with p i a prefix of sigma_[0,n)(j).
    std::size_t prefix_set_size = 0;
    /// Lattice points y' visited by the enumeration.
    std::size_t lattice_points = 0;
    bool verdict = false;
    /// C < 0: empty left-hand side.
    bool degenerate = false;
    /// First (y, j) of the left-hand side outside the prefix set.
    std::optional<std::pair<std::vector<std::int64_t>, Letter>> counterexample;
    /// Depth at which the balance constant C was measured, when searched.
    std::optional<std::size_t> balance_depth;
};

struct GccOptions {
    std::size_t budget = 10'000'000;
    unsigned bits = kDefaultPrecisionBits;
};

namespace detail {

inline std::int64_t to_i64(const BigInt& v)
{
    if (v > BigInt(INT64_MAX / 4) || v < BigInt(INT64_MIN / 4))
        fail(ErrorKind::EnumerationTooLarge, "matrix entries exceed 64-bit enumeration range");
    return static_cast<std::int64_t>(v);
}

/// Data of sigma_[0,n) shared by the check and the search.
struct GccLevel {
    int d = 0;
    std::size_t n = 0;
    std::vector<std::int64_t> m, minv; // row-major d x d
    std::vector<std::int64_t> lengths;
    std::vector<Word> images;
    /// prefix[j][s * d + k] = |p|_k for the prefix p of length s of image j.
    std::vector<std::vector<std::int32_t>> prefix;
    /// u^(n) rescaled to coordinate sum 1.
    std::vector<long double> uhat;

    std::vector<long double> renormalized(const std::vector<std::int64_t>& y) const
    {
        std::vector<long double> out(d, 0);
        long double s = 0;
        std::vector<std::int64_t> yp(d, 0);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) yp[a] += minv[a * d + b] * y[b];
            s += static_cast<long double>(yp[a]);
        }
        for (int a = 0; a < d; ++a) out[a] = static_cast<long double>(yp[a]) - s * uhat[a];
        return out;
    }
};

inline GccLevel gcc_level(const DirectiveSequence& seq, const SimplexPoint& u, std::size_t n, unsigned bits)
{
    GccLevel g;
    g.d = seq.dimension();
    g.n = n;
    int d = g.d;
    if (u.dimension() != d) fail(ErrorKind::InvalidArgument, "eigenvector and sequence dimensions differ");
    const IntMatrix& M = seq.product(n);
    for (auto L : M.column_sums())
        if (L > BigInt(400'000'000)) fail(ErrorKind::EnumerationTooLarge, "images of sigma_[0,n) are too long");
    IntMatrix Mi = M.inverse_unimodular();
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            g.m.push_back(to_i64(M(a, b)));
            g.minv.push_back(to_i64(Mi(a, b)));
        }
    {
        PrecisionGuard guard(bits);
        auto uf = u.as_float(bits);
        std::vector<BigFloat> un(d, BigFloat(0));
        BigFloat s = 0;
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) un[a] += BigFloat(Mi(a, b)) * uf[b];
            s += un[a];
        }
        for (int a = 0; a < d; ++a) g.uhat.push_back(static_cast<long double>(un[a] / s));
    }
    for (Letter j = 1; j <= d; ++j) {
        g.images.push_back(image(seq, n, j));
        const Word& w = g.images.back();
        g.lengths.push_back(static_cast<std::int64_t>(w.size()));
        std::vector<std::int32_t> pre(static_cast<std::size_t>(w.size() + 1) * d, 0);
        for (std::size_t s = 0; s < w.size(); ++s) {
            for (int k = 0; k < d; ++k) pre[(s + 1) * d + k] = pre[s * d + k];
            ++pre[(s + 1) * d + (w[s] - 1)];
        }
        g.prefix.push_back(std::move(pre));
    }
    return g;
}

inline GccWitness gcc_check(const GccLevel& g, double C, const std::vector<double>& z, Letter i, std::size_t budget)
{
    int d = g.d;
    GccWitness w;
    w.n = g.n;
    w.C = C;
    w.z = z;
    w.i = i;
    for (int j = 0; j < d; ++j)
        for (std::size_t s = 0; s < g.images[j].size(); ++s)
            if (g.images[j][s] == i) ++w.prefix_set_size;
    if (C < 0) {
        w.degenerate = true;
        w.verdict = true;
        return w;
    }

    constexpr long double eps = 1e-9L;
    std::int64_t lmax = *std::max_element(g.lengths.begin(), g.lengths.end());
    // <1, M y'> = <L, y'> with L the image lengths; y' - s uhat lies in z + [-C, C]^d.
    long double a = 0, lz = 0, lsum = 0;
    for (int k = 0; k < d; ++k) {
        a += g.lengths[k] * g.uhat[k];
        lz += g.lengths[k] * static_cast<long double>(z[k]);
        lsum += g.lengths[k];
    }
    auto s_lo = static_cast<std::int64_t>(std::ceil((-lz - C * lsum) / a - eps));
    auto s_hi = static_cast<std::int64_t>(std::floor((lmax - 1 - lz + C * lsum) / a + eps));

    auto range = [&](std::int64_t s, int k) {
        long double c = z[k] + s * g.uhat[k];
        return std::make_pair(static_cast<std::int64_t>(std::ceil(c - C - eps)),
                              static_cast<std::int64_t>(std::floor(c + C + eps)));
    };
    long double count = 0;
    for (std::int64_t s = s_lo; s <= s_hi; ++s) {
        long double p = 1;
        for (int k = 0; k + 1 < d; ++k) {
            auto [lo, hi] = range(s, k);
            p *= static_cast<long double>(std::max<std::int64_t>(0, hi - lo + 1));
        }
        count += p;
    }
    if (count > static_cast<long double>(budget))
        fail(ErrorKind::EnumerationTooLarge, "GCC enumeration needs " + std::to_string(static_cast<double>(count)) +
                                                 " lattice points, budget " + std::to_string(budget));

    bool ok = true;
    std::vector<std::int64_t> yp(d), y(d), lo(d), hi(d);
    for (std::int64_t s = s_lo; s <= s_hi; ++s) {
        for (int k = 0; k < d; ++k) std::tie(lo[k], hi[k]) = range(s, k);
        bool empty = false;
        for (int k = 0; k + 1 < d; ++k) {
            if (lo[k] > hi[k]) empty = true;
            yp[k] = lo[k];
        }
        if (empty) continue;
        while (true) {
            ++w.lattice_points;
            std::int64_t rest = s;
            for (int k = 0; k + 1 < d; ++k) rest -= yp[k];
            yp[d - 1] = rest;
            if (rest >= lo[d - 1] && rest <= hi[d - 1]) {
                std::int64_t len = 0;
                for (int k = 0; k < d; ++k) len += g.lengths[k] * yp[k];
                if (len >= 0 && len < lmax) {
                    for (int r = 0; r < d; ++r) {
                        y[r] = 0;
                        for (int c = 0; c < d; ++c) y[r] += g.m[r * d + c] * yp[c];
                    }
                    for (int j = 0; j < d; ++j) {
                        if (len >= g.lengths[j]) continue;
                        ++w.left_size;
                        const std::int32_t* pc = &g.prefix[j][static_cast<std::size_t>(len) * d];
                        bool hit = g.images[j][static_cast<std::size_t>(len)] == i;
                        for (int k = 0; k < d && hit; ++k) hit = pc[k] == y[k];
                        if (!hit && ok) {
                            ok = false;
                            w.counterexample = std::make_pair(y, static_cast<Letter>(j + 1));
                        }
                    }
                }
            }
            int k = 0;
            while (k + 1 < d && yp[k] == hi[k]) {
                yp[k] = lo[k];
                ++k;
            }
            if (k + 1 >= d) break;
            ++yp[k];
        }
    }
    w.verdict = ok;
    return w;
}

} // namespace detail

/// The effective coincidence condition at level n: every integer y with
/// 0 <= <1, y> < |sigma_[0,n)(j)| and ||pi'_{u(n)} M^-1 y - z||_inf <= C
/// must be l(p) for a prefix p i of sigma_[0,n)(j), where M = M_[0,n) and
/// u(n) = M^-1 u. z is an ambient vector of 1-perp.
inline GccWitness effective_gcc(const DirectiveSequence& seq, const SimplexPoint& u, std::size_t n, double C,
                                const std::vector<double>& z, Letter i, const GccOptions& opt = {})
{
    int d = seq.dimension();
    if (static_cast<int>(z.size()) != d) fail(ErrorKind::InvalidArgument, "shift has the wrong dimension");
    double zs = 0;
    for (double v : z) zs += v;
    if (std::abs(zs) > 1e-9) fail(ErrorKind::InvalidArgument, "shift must have coordinate sum 0");
    if (i < 1 || i > d) fail(ErrorKind::InvalidArgument, "letter out of range");
    auto g = detail::gcc_level(seq, u, n, opt.bits);
    return detail::gcc_check(g, C, z, i, opt.budget);
}

struct GccSearchOptions {
    std::size_t n_min = 1;
    std::size_t n_max = 40;
    std::size_t n_step = 1;
    /// Fixed C; otherwise the measured letter balance of the shifted sequence.
    std::optional<double> C;
    /// Window length for the balance measurement.
    std::size_t balance_scan = 64;
    /// Renormalized prefix points tested per (n, i), most isolated first.
    std::size_t candidates = 32;
    /// Extra shifts on a grid with this many steps per axis over the
    /// bounding box of the prefix points; 0 disables it.
    std::size_t grid = 0;
    std::vector<Letter> letters;
    GccOptions gcc;
};

struct GccSearchResult {
    std::optional<GccWitness> witness;
    std::size_t tuples_tested = 0;
    std::size_t last_n = 0;
};

/// Searches (n, z, i) for a passing effective coincidence check. Shift
/// candidates are the renormalized prefix points pi'_{u(n)} M^-1 l(p) of
/// p i, ranked by sup-norm distance to the nearest renormalized prefix
/// point followed by another letter; optionally a grid over their bounding
/// box follows.
inline GccSearchResult gcc_search(const DirectiveSequence& seq, const SimplexPoint& u,
                                  const GccSearchOptions& opt = {})
{
    int d = seq.dimension();
    GccSearchResult res;
    std::vector<Letter> letters = opt.letters;
    if (letters.empty())
        for (Letter j = 1; j <= d; ++j) letters.push_back(j);

    for (std::size_t n = opt.n_min; n <= opt.n_max; n += std::max<std::size_t>(1, opt.n_step)) {
        res.last_n = n;
        double C = 0;
        std::optional<std::size_t> depth;
        if (opt.C) {
            C = *opt.C;
        } else {
            DirectiveSequence tail = seq.shifted(n);
            depth = balance_depth(tail, opt.balance_scan);
            if (!depth) continue;
            C = static_cast<double>(balance(tail, opt.balance_scan, *depth, 0).max_constant());
        }
        detail::GccLevel g;
        try {
            g = detail::gcc_level(seq, u, n, opt.gcc.bits);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::EnumerationTooLarge) break;
            throw;
        }

        // Renormalized prefix points, keyed by the cell of their first d-1 coordinates.
        struct Pt {
            std::vector<double> z;
            Letter next;
        };
        std::vector<Pt> pts;
        std::vector<double> bmin(d, 1e300), bmax(d, -1e300);
        std::vector<std::int64_t> y(d);
        for (int j = 0; j < d; ++j) {
            const Word& w = g.images[j];
            for (std::size_t s = 0; s < w.size(); ++s) {
                for (int k = 0; k < d; ++k) y[k] = g.prefix[j][s * d + k];
                auto r = g.renormalized(y);
                Pt p{std::vector<double>(r.begin(), r.end()), w[s]};
                for (int k = 0; k < d; ++k) {
                    bmin[k] = std::min(bmin[k], p.z[k]);
                    bmax[k] = std::max(bmax[k], p.z[k]);
                }
                pts.push_back(std::move(p));
            }
        }
        auto key = [&](const std::vector<double>& zz) {
            std::vector<std::int64_t> c(d - 1);
            for (int k = 0; k + 1 < d; ++k) c[k] = static_cast<std::int64_t>(std::floor(zz[k]));
            return c;
        };
        std::map<std::vector<std::int64_t>, std::vector<std::size_t>> cells;
        for (std::size_t t = 0; t < pts.size(); ++t) cells[key(pts[t].z)].push_back(t);

        auto test = [&](const std::vector<double>& z, Letter i) {
            ++res.tuples_tested;
            auto wit = detail::gcc_check(g, C, z, i, opt.gcc.budget);
            wit.balance_depth = depth;
            if (wit.verdict) res.witness = std::move(wit);
            return res.witness.has_value();
        };

        for (Letter i : letters) {
            // Isolation: sup distance to the nearest point followed by another letter,
            // searched over rings of unit cells up to radius rmax.
            const int rmax = 6;
            std::vector<std::pair<double, std::size_t>> ranked;
            std::map<std::vector<double>, bool> seen;
            for (std::size_t t = 0; t < pts.size(); ++t) {
                if (pts[t].next != i) continue;
                if (!seen.emplace(pts[t].z, true).second) continue;
                auto c0 = key(pts[t].z);
                double best = rmax + 1.0;
                std::vector<std::int64_t> off(d - 1, -rmax);
                while (true) {
                    std::vector<std::int64_t> c(d - 1);
                    for (int k = 0; k + 1 < d; ++k) c[k] = c0[k] + off[k];
                    auto it = cells.find(c);
                    if (it != cells.end())
                        for (auto q : it->second) {
                            if (pts[q].next == i) continue;
                            double dist = 0;
                            for (int k = 0; k < d; ++k) dist = std::max(dist, std::abs(pts[q].z[k] - pts[t].z[k]));
                            best = std::min(best, dist);
                        }
                    int k = 0;
                    while (k + 1 < d && off[k] == rmax) {
                        off[k] = -rmax;
                        ++k;
                    }
                    if (k + 1 >= d) break;
                    ++off[k];
                }
                ranked.emplace_back(best, t);
            }
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            for (std::size_t r = 0; r < ranked.size() && r < opt.candidates; ++r) {
                const auto& zz = pts[ranked[r].second].z;
                if (test(zz, i)) return res;
            }
            if (opt.grid > 1 && d >= 2) {
                std::vector<std::size_t> idx(d - 1, 0);
                while (true) {
                    std::vector<double> z(d, 0);
                    double sum = 0;
                    for (int k = 0; k + 1 < d; ++k) {
                        z[k] = bmin[k] + (bmax[k] - bmin[k]) * (static_cast<double>(idx[k]) + 0.5) /
                                             static_cast<double>(opt.grid);
                        sum += z[k];
                    }
                    z[d - 1] = -sum;
                    if (test(z, i)) return res;
                    int k = 0;
                    while (k + 1 < d && idx[k] + 1 == opt.grid) {
                        idx[k] = 0;
                        ++k;
                    }
                    if (k + 1 >= d) break;
                    ++idx[k];
                }
            }
        }
    }
    return res;
}

} // namespace sadic
