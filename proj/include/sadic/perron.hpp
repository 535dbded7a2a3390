#pragma once

#include "sadic/error.hpp"
#include "sadic/int_matrix.hpp"
#include "sadic/numeric.hpp"
#include "sadic/simplex_point.hpp"

#include <vector>

namespace sadic {

/// Smallest k <= (d-1)^2 + 1 with M^k positive, or 0 if there is none.
inline unsigned primitivity_exponent(const IntMatrix& m)
{
    int d = m.size();
    if (!m.is_nonnegative()) return 0;
    IntMatrix p = m;
    unsigned bound = static_cast<unsigned>((d - 1) * (d - 1) + 1);
    for (unsigned k = 1; k <= bound; ++k) {
        if (p.is_positive()) return k;
        p = p * m;
        // Keep only the zero pattern so entries stay small.
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (p(i, j) > 0) p(i, j) = 1;
    }
    return 0;
}

/// Perron eigenvector of a primitive nonnegative matrix, l1-normalized,
/// by power iteration at `bits` bits. Call inside a PrecisionGuard.
inline std::vector<BigFloat> perron_vector_raw(const IntMatrix& m, unsigned bits)
{
    unsigned k = primitivity_exponent(m);
    if (k == 0) fail(ErrorKind::NotPrimitive, "matrix has no positive power");
    int d = m.size();
    IntMatrix p = m.power(k);
    std::vector<BigFloat> a(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a[static_cast<std::size_t>(i) * d + j] = BigFloat(p(i, j));
    std::vector<BigFloat> v(d, BigFloat(1) / d), w(d);
    BigFloat tol = ldexp(BigFloat(1), -static_cast<int>(bits) + 4);
    for (int iter = 0; iter < 200000; ++iter) {
        BigFloat s = 0;
        for (int i = 0; i < d; ++i) {
            w[i] = 0;
            for (int j = 0; j < d; ++j) w[i] += a[static_cast<std::size_t>(i) * d + j] * v[j];
            s += w[i];
        }
        BigFloat change = 0;
        for (int i = 0; i < d; ++i) {
            w[i] /= s;
            change += abs(w[i] - v[i]);
        }
        v.swap(w);
        if (change <= tol) break;
        // Squaring accelerates the slow cases; the vector is unchanged.
        if (iter % 64 == 63) {
            std::vector<BigFloat> sq(a.size());
            BigFloat norm = 0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    BigFloat t = 0;
                    for (int l = 0; l < d; ++l) t += a[static_cast<std::size_t>(i) * d + l] * a[static_cast<std::size_t>(l) * d + j];
                    sq[static_cast<std::size_t>(i) * d + j] = t;
                    norm += t;
                }
            for (auto& t : sq) t /= norm;
            a.swap(sq);
        }
    }
    return v;
}

inline SimplexPoint perron_vector(const IntMatrix& m, unsigned bits = kDefaultPrecisionBits)
{
    PrecisionGuard guard(bits + 32);
    std::vector<BigFloat> v = perron_vector_raw(m, bits + 32);
    return SimplexPoint::floating(std::move(v), bits);
}

} // namespace sadic
