#pragma once

#include "sadic/error.hpp"
#include "sadic/numeric.hpp"
#include "sadic/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace sadic {

struct BigComplex {
    BigFloat re = 0, im = 0;

    friend BigComplex operator+(const BigComplex& a, const BigComplex& b) { return {a.re + b.re, a.im + b.im}; }
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b) { return {a.re - b.re, a.im - b.im}; }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b)
    {
        BigFloat den = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
    }
    BigComplex conj() const { return {re, -im}; }
    BigFloat abs() const { return sqrt(re * re + im * im); }
};

/// A disk known to contain exactly one root of a squarefree factor; the
/// root has the given multiplicity in the certified polynomial.
struct RootEnclosure {
    BigComplex center;
    BigFloat radius;
    int multiplicity = 1;
    /// Certified real by the conjugate-disk test.
    bool real = false;
};

struct PisotCertificate {
    IntPoly poly;
    std::vector<RootEnclosure> roots;
    unsigned precision_bits = 0;
    bool irreducible = false;
    bool unit = false;
    /// Undecided flags are empty; they are always decided when the
    /// polynomial is irreducible.
    std::optional<bool> dominant_real_gt_one;
    std::optional<bool> conjugates_inside;
    bool pisot = false;
    /// |prod of root moduli| against |p(0)|, within the enclosure error.
    bool norm_consistent = false;
};

namespace detail {

inline BigComplex eval(const IntPoly& p, const BigComplex& z)
{
    BigComplex r{BigFloat(0), BigFloat(0)};
    const auto& c = p.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * z + BigComplex{BigFloat(*it), BigFloat(0)};
    return r;
}

inline std::vector<std::complex<double>> initial_roots(const IntPoly& p)
{
    int n = p.degree();
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    double lead = to_double(p.leading());
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -to_double(p.coeff(i)) / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<std::complex<double>> r;
    for (int i = 0; i < n; ++i) r.push_back(es.eigenvalues()[i]);
    // Weierstrass iteration needs distinct starting points.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(r[i] - r[j]) < 1e-9) r[i] += std::complex<double>(1e-6 * (i + 1), 1e-6 * (j + 2));
    return r;
}

/// Weierstrass corrections W_i = p(z_i) / (lc prod_{j != i} (z_i - z_j)).
inline std::vector<BigComplex> weierstrass(const IntPoly& p, const std::vector<BigComplex>& z)
{
    std::vector<BigComplex> w(z.size());
    BigComplex lc{BigFloat(p.leading()), BigFloat(0)};
    for (std::size_t i = 0; i < z.size(); ++i) {
        BigComplex den = lc;
        for (std::size_t j = 0; j < z.size(); ++j)
            if (j != i) den = den * (z[i] - z[j]);
        w[i] = eval(p, z[i]) / den;
    }
    return w;
}

/// Root disks of a squarefree polynomial: Durand-Kerner refinement, then
/// the inclusion disks |z - z_i| <= n |W_i|. Empty if they overlap.
inline std::vector<RootEnclosure> enclose_roots(const IntPoly& p, unsigned bits)
{
    int n = p.degree();
    std::vector<RootEnclosure> out;
    if (n < 1) return out;
    if (n == 1) {
        Rational r(-p.coeff(0), p.coeff(1));
        out.push_back({BigComplex{to_float(r), BigFloat(0)}, BigFloat(0), 1, true});
        return out;
    }
    std::vector<BigComplex> z;
    for (auto c : initial_roots(p)) z.push_back({BigFloat(c.real()), BigFloat(c.imag())});
    BigFloat tiny = pow(BigFloat(2), -static_cast<int>(bits) + 16);
    for (int iter = 0; iter < 200 + static_cast<int>(bits); ++iter) {
        auto w = weierstrass(p, z);
        BigFloat worst = 0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] = z[i] - w[i];
            worst = std::max(worst, w[i].abs());
        }
        if (worst < tiny) break;
    }
    auto w = weierstrass(p, z);
    // Rounding slack on top of the inclusion radius.
    BigFloat slack = pow(BigFloat(2), -static_cast<int>(bits) + 24);
    for (std::size_t i = 0; i < z.size(); ++i) {
        BigFloat r = BigFloat(n) * w[i].abs() + slack * (1 + z[i].abs());
        out.push_back({z[i], r, 1, false});
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if ((out[i].center - out[j].center).abs() <= out[i].radius + out[j].radius) return {};
    // The conjugate of root i is a root; if the mirrored disk meets no other
    // disk it lies in disk i, so the root is real.
    for (std::size_t i = 0; i < out.size(); ++i) {
        BigComplex m = out[i].center.conj();
        bool alone = true;
        for (std::size_t j = 0; j < out.size(); ++j)
            if (j != i && (m - out[j].center).abs() <= out[i].radius + out[j].radius) alone = false;
        out[i].real = alone;
        if (alone) out[i].center.im = 0;
    }
    return out;
}

inline bool is_reciprocal(const IntPoly& p)
{
    return p == p.reversed() || p == IntPoly() - p.reversed();
}

/// Whether the monic irreducible p divides X^N - 1 for some small N.
inline bool is_cyclotomic(const IntPoly& p)
{
    int n = p.degree();
    for (int N = 1; N <= 4 * n * n + 8; ++N) {
        std::vector<BigInt> c(N + 1);
        c[0] = -1;
        c[N] = 1;
        if (poly::divides(p, IntPoly(std::move(c)))) return true;
    }
    return false;
}

enum class Tri { No, Yes, Unknown };

/// Searches for a factor of the squarefree p among products of root
/// subsets. Unknown when the coefficient intervals are too wide.
inline Tri has_factor(const IntPoly& p, const std::vector<RootEnclosure>& roots)
{
    int n = static_cast<int>(roots.size());
    bool unknown = false;
    std::vector<int> idx;
    for (int k = 1; k <= n / 2; ++k) {
        idx.resize(k);
        for (int t = 0; t < k; ++t) idx[t] = t;
        for (;;) {
            // Coefficients of prod (X - z_i) and an error bound from the radii.
            std::vector<BigComplex> c{BigComplex{BigFloat(1), BigFloat(0)}};
            std::vector<BigFloat> hi{BigFloat(1)}, lo{BigFloat(1)};
            for (int t : idx) {
                const auto& r = roots[t];
                std::vector<BigComplex> nc(c.size() + 1, BigComplex{BigFloat(0), BigFloat(0)});
                std::vector<BigFloat> nh(hi.size() + 1, BigFloat(0)), nl(lo.size() + 1, BigFloat(0));
                BigFloat a = r.center.abs();
                for (std::size_t q = 0; q < c.size(); ++q) {
                    nc[q + 1] = nc[q + 1] + c[q];
                    nc[q] = nc[q] - c[q] * r.center;
                    nh[q + 1] += hi[q];
                    nh[q] += hi[q] * (a + r.radius);
                    nl[q + 1] += lo[q];
                    nl[q] += lo[q] * a;
                }
                c = std::move(nc);
                hi = std::move(nh);
                lo = std::move(nl);
            }
            bool candidate = true;
            std::vector<BigInt> coeffs;
            for (std::size_t q = 0; q < c.size() && candidate; ++q) {
                BigFloat err = hi[q] - lo[q];
                if (err >= BigFloat(0.25)) {
                    unknown = true;
                    candidate = false;
                    break;
                }
                if (abs(c[q].im) > err) {
                    candidate = false;
                    break;
                }
                BigFloat nearest = round(c[q].re);
                if (abs(c[q].re - nearest) > err) {
                    candidate = false;
                    break;
                }
                coeffs.push_back(nearest.convert_to<BigInt>());
            }
            if (candidate && poly::divides(IntPoly(coeffs), p)) return Tri::Yes;
            int t = k - 1;
            while (t >= 0 && idx[t] == n - k + t) --t;
            if (t < 0) break;
            ++idx[t];
            for (int s = t + 1; s < k; ++s) idx[s] = idx[s - 1] + 1;
        }
    }
    return unknown ? Tri::Unknown : Tri::No;
}

} // namespace detail

/// Certifies (or refutes) that a monic integer polynomial is the minimal
/// polynomial of a Pisot number, with root enclosures as evidence.
///
/// Unit-circle and dominance decisions need a margin of 2^-32; the
/// precision doubles up to four times before IndeterminatePrecision.
inline PisotCertificate pisot_certify(const IntPoly& p, unsigned bits = kDefaultPrecisionBits)
{
    if (p.degree() < 1) fail(ErrorKind::InvalidArgument, "polynomial must have degree at least 1");
    if (!p.is_monic()) fail(ErrorKind::InvalidArgument, "polynomial must be monic");

    auto factors = poly::squarefree_factors(p);
    bool squarefree = factors.size() == 1 && factors[0].second == 1;

    for (int attempt = 0; attempt <= 4; ++attempt, bits *= 2) {
        PrecisionGuard guard(bits);
        PisotCertificate cert;
        cert.poly = p;
        cert.precision_bits = bits;
        cert.unit = abs(p.coeff(0)) == 1;

        bool ok = true;
        for (const auto& [f, mult] : factors) {
            auto r = detail::enclose_roots(f, bits);
            if (r.empty()) {
                ok = false;
                break;
            }
            for (auto& e : r) {
                e.multiplicity = mult;
                cert.roots.push_back(std::move(e));
            }
        }
        if (!ok) continue;

        bool irreducible_known = true;
        if (!squarefree) {
            cert.irreducible = false;
        } else if (p.degree() == 1) {
            cert.irreducible = true;
        } else {
            auto t = detail::has_factor(p, cert.roots);
            irreducible_known = t != detail::Tri::Unknown;
            cert.irreducible = t == detail::Tri::No;
        }

        BigFloat margin = pow(BigFloat(2), -32);
        // Dominant candidate: largest center modulus.
        std::size_t dom = 0;
        for (std::size_t i = 1; i < cert.roots.size(); ++i)
            if (cert.roots[i].center.abs() > cert.roots[dom].center.abs()) dom = i;
        const auto& D = cert.roots[dom];

        if (p.degree() == 1) {
            cert.dominant_real_gt_one = -p.coeff(0) > 1;
            cert.conjugates_inside = true;
        } else if (cert.irreducible && detail::is_cyclotomic(p)) {
            cert.dominant_real_gt_one = false;
            cert.conjugates_inside = false;
        } else {
            // Exact (integer) roots have radius 0 and need no margin.
            auto gap = [&](const RootEnclosure& e) { return e.radius == 0 ? BigFloat(0) : margin; };
            if (D.real && D.center.re - D.radius > 1 + gap(D))
                cert.dominant_real_gt_one = true;
            else if (D.real && (D.radius == 0 ? D.center.re <= 1 : D.center.re + D.radius < 1 - margin))
                cert.dominant_real_gt_one = false;
            else if (!D.real && D.center.abs() > D.radius)
                cert.dominant_real_gt_one = false; // largest root is not real
            bool all_in = true, some_out = D.multiplicity > 1;
            for (std::size_t i = 0; i < cert.roots.size(); ++i) {
                if (i == dom) continue;
                const auto& e = cert.roots[i];
                BigFloat m = e.center.abs();
                if (m + e.radius >= 1 - gap(e)) all_in = false;
                if (e.radius == 0 ? m >= 1 : m - e.radius > 1 + margin) some_out = true;
            }
            if (some_out)
                cert.conjugates_inside = false;
            else if (all_in)
                cert.conjugates_inside = true;
            else if (cert.irreducible && detail::is_reciprocal(p) && p.degree() >= 3)
                cert.conjugates_inside = false; // roots pair as z, 1/z
        }

        // A non-real dominant root has its conjugate among the others.
        if (cert.dominant_real_gt_one == false || cert.conjugates_inside == false || (irreducible_known && !cert.irreducible))
            cert.pisot = false;
        else
            cert.pisot = cert.irreducible && cert.dominant_real_gt_one.value_or(false) && cert.conjugates_inside.value_or(false);

        // Norm check: prod |z_i|^mult against |p(0)|.
        BigFloat prod = 1, prod_hi = 1, prod_lo = 1;
        for (const auto& e : cert.roots)
            for (int k = 0; k < e.multiplicity; ++k) {
                BigFloat a = e.center.abs();
                prod *= a;
                prod_hi *= a + e.radius;
                prod_lo *= max(BigFloat(0), a - e.radius);
            }
        BigFloat c0 = abs(BigFloat(p.coeff(0)));
        cert.norm_consistent = prod_lo <= c0 + margin && c0 <= prod_hi + margin;

        bool decided = irreducible_known && cert.dominant_real_gt_one && cert.conjugates_inside;
        if (decided || (irreducible_known && !cert.irreducible)) return cert;
    }
    fail(ErrorKind::IndeterminatePrecision,
         "could not separate the roots of " + p.to_string() + " from the unit circle after 4 precision doublings");
}

} // namespace sadic
