#pragma once

#include "sadic/error.hpp"
#include "sadic/int_matrix.hpp"
#include "sadic/numeric.hpp"

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sadic {

/// Integer polynomial; coeffs[k] multiplies X^k. The zero polynomial has
/// no coefficients.
class IntPoly {
public:
    IntPoly() = default;
    explicit IntPoly(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }

    /// Coefficients from the leading one down, e.g. {1, -2, 1, -1}.
    static IntPoly from_high(const std::vector<long long>& high)
    {
        std::vector<BigInt> c(high.rbegin(), high.rend());
        return IntPoly(std::move(c));
    }

    /// Comma-separated coefficients from the leading one down.
    static IntPoly parse(std::string_view text)
    {
        std::vector<BigInt> high;
        std::string item;
        std::stringstream ss{std::string(text)};
        while (std::getline(ss, item, ',')) {
            auto b = item.find_first_not_of(" \t");
            auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) fail(ErrorKind::Parse, "empty coefficient");
            std::string t = item.substr(b, e - b + 1);
            std::size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
            if (start == t.size() || t.find_first_not_of("0123456789", start) != std::string::npos)
                fail(ErrorKind::Parse, "bad coefficient '" + t + "'");
            if (t[0] == '+') t.erase(0, 1);
            high.emplace_back(t);
        }
        return IntPoly(std::vector<BigInt>(high.rbegin(), high.rend()));
    }

    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }
    const std::vector<BigInt>& coeffs() const noexcept { return c_; }
    BigInt coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : BigInt(0); }
    BigInt leading() const { return c_.empty() ? BigInt(0) : c_.back(); }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }

    BigInt operator()(const BigInt& x) const
    {
        BigInt r = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
        return r;
    }

    /// X^d p(1/X).
    IntPoly reversed() const { return IntPoly(std::vector<BigInt>(c_.rbegin(), c_.rend())); }

    IntPoly derivative() const
    {
        std::vector<BigInt> d;
        for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * static_cast<long long>(k));
        return IntPoly(std::move(d));
    }

    friend IntPoly operator*(const IntPoly& a, const IntPoly& b)
    {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<BigInt> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return IntPoly(std::move(c));
    }

    friend IntPoly operator-(const IntPoly& a, const IntPoly& b)
    {
        std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
        return IntPoly(std::move(c));
    }

    friend IntPoly operator+(const IntPoly& a, const IntPoly& b)
    {
        std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        return IntPoly(std::move(c));
    }

    friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }

    /// "X^3 - 2X^2 + X - 1"
    std::string to_string() const
    {
        if (c_.empty()) return "0";
        std::string r;
        for (int k = degree(); k >= 0; --k) {
            const BigInt& a = c_[k];
            if (a == 0) continue;
            BigInt m = abs(a);
            if (r.empty())
                r += a < 0 ? "-" : "";
            else
                r += a < 0 ? " - " : " + ";
            if (m != 1 || k == 0) r += m.str();
            if (k >= 1) r += "X";
            if (k >= 2) r += "^" + std::to_string(k);
        }
        return r;
    }

    /// Coefficients from the leading one down, as decimal strings.
    std::vector<std::string> to_strings_high() const
    {
        std::vector<std::string> r;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r.push_back(it->str());
        return r;
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<BigInt> c_;
};

/// Polynomial over Q, used for exact gcds.
using RatPoly = std::vector<Rational>;

namespace poly {

inline void trim(RatPoly& p)
{
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline RatPoly to_rat(const IntPoly& p)
{
    RatPoly r;
    for (const auto& c : p.coeffs()) r.emplace_back(c);
    return r;
}

/// Quotient and remainder of a by nonzero b.
inline std::pair<RatPoly, RatPoly> divmod(RatPoly a, const RatPoly& b)
{
    trim(a);
    if (b.empty()) fail(ErrorKind::InvalidArgument, "division by the zero polynomial");
    if (a.size() < b.size()) return {RatPoly{}, a};
    RatPoly q(a.size() - b.size() + 1);
    while (!a.empty() && a.size() >= b.size()) {
        std::size_t shift = a.size() - b.size();
        Rational f = a.back() / b.back();
        q[shift] = f;
        for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] -= f * b[k];
        a.pop_back();
        trim(a);
    }
    trim(q);
    return {q, a};
}

inline RatPoly monic(RatPoly p)
{
    trim(p);
    if (p.empty()) return p;
    Rational l = p.back();
    for (auto& c : p) c /= l;
    return p;
}

inline RatPoly gcd(RatPoly a, RatPoly b)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        RatPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

inline RatPoly derivative(const RatPoly& p)
{
    RatPoly d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * static_cast<long long>(k));
    trim(d);
    return d;
}

/// Primitive integer polynomial with positive leading coefficient that is
/// a rational multiple of p.
inline IntPoly to_primitive(const RatPoly& p)
{
    BigInt den = 1;
    for (const auto& c : p) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(c));
    std::vector<BigInt> c;
    BigInt g = 0;
    for (const auto& v : p) {
        Rational s = v * den;
        c.push_back(boost::multiprecision::numerator(s));
        g = boost::multiprecision::gcd(g, c.back());
    }
    if (g == 0) return {};
    if (c.back() < 0) g = -g;
    for (auto& v : c) v /= g;
    return IntPoly(std::move(c));
}

/// Squarefree decomposition p = lc * prod_k f_k^k (Yun). Returns the pairs
/// (f_k, k) with nonconstant f_k.
inline std::vector<std::pair<IntPoly, int>> squarefree_factors(const IntPoly& p)
{
    std::vector<std::pair<IntPoly, int>> out;
    RatPoly a = to_rat(p);
    if (a.size() <= 1) return out;
    RatPoly da = derivative(a);
    RatPoly g = gcd(a, da);
    RatPoly b = divmod(a, g).first;
    RatPoly c = divmod(da, g).first;
    RatPoly d = c;
    {
        RatPoly db = derivative(b);
        d.resize(std::max(c.size(), db.size()));
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = (k < c.size() ? c[k] : 0) - (k < db.size() ? db[k] : 0);
        trim(d);
    }
    int k = 1;
    while (b.size() > 1) {
        RatPoly f = gcd(b, d);
        if (f.size() > 1) out.emplace_back(to_primitive(f), k);
        b = divmod(b, f).first;
        c = divmod(d, f).first;
        RatPoly db = derivative(b);
        d.assign(std::max(c.size(), db.size()), Rational(0));
        for (std::size_t t = 0; t < d.size(); ++t) d[t] = (t < c.size() ? c[t] : 0) - (t < db.size() ? db[t] : 0);
        trim(d);
        ++k;
    }
    return out;
}

/// Whether b divides a exactly over Z (b primitive, monic or not).
inline bool divides(const IntPoly& b, const IntPoly& a)
{
    if (b.is_zero()) return false;
    auto [q, r] = divmod(to_rat(a), to_rat(b));
    if (!r.empty()) return false;
    for (const auto& c : q)
        if (boost::multiprecision::denominator(c) != 1) return false;
    return true;
}

} // namespace poly

/// det(X I - M) by Faddeev-LeVerrier.
inline IntPoly char_poly_faddeev(const IntMatrix& a)
{
    int n = a.size();
    std::vector<BigInt> c(n + 1);
    c[n] = 1;
    IntMatrix mk(n);
    for (int k = 1; k <= n; ++k) {
        IntMatrix next = a * mk;
        for (int i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
        mk = std::move(next);
        IntMatrix am = a * mk;
        BigInt tr = 0;
        for (int i = 0; i < n; ++i) tr += am(i, i);
        if (tr % k != 0) throw std::logic_error("Faddeev-LeVerrier division is not exact");
        c[n - k] = -tr / k;
    }
    return IntPoly(std::move(c));
}

namespace detail {

inline IntPoly cofactor_det(const std::vector<std::vector<IntPoly>>& m)
{
    std::size_t n = m.size();
    if (n == 1) return m[0][0];
    IntPoly r;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<IntPoly>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<IntPoly> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(std::move(row));
        }
        IntPoly t = m[0][j] * cofactor_det(minor);
        r = j % 2 == 0 ? r + t : r - t;
    }
    return r;
}

} // namespace detail

/// det(X I - M) by cofactor expansion with polynomial entries (d <= 5),
/// otherwise by interpolating exact determinants at d + 1 integer points.
inline IntPoly char_poly_cofactor(const IntMatrix& a)
{
    int n = a.size();
    if (n <= 5) {
        std::vector<std::vector<IntPoly>> m(n, std::vector<IntPoly>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<BigInt> c{-a(i, j)};
                if (i == j) c.push_back(1);
                m[i][j] = IntPoly(std::move(c));
            }
        return detail::cofactor_det(m);
    }
    // Lagrange interpolation through (t, det(tI - M)), t = 0..n.
    RatPoly acc(n + 1, Rational(0));
    for (int t = 0; t <= n; ++t) {
        IntMatrix b(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) = (i == j ? BigInt(t) : BigInt(0)) - a(i, j);
        Rational yt(b.determinant());
        RatPoly basis{Rational(1)};
        Rational denom = 1;
        for (int s = 0; s <= n; ++s) {
            if (s == t) continue;
            RatPoly nb(basis.size() + 1, Rational(0));
            for (std::size_t k = 0; k < basis.size(); ++k) {
                nb[k + 1] += basis[k];
                nb[k] -= basis[k] * s;
            }
            basis = std::move(nb);
            denom *= t - s;
        }
        for (std::size_t k = 0; k < basis.size(); ++k) acc[k] += yt * basis[k] / denom;
    }
    std::vector<BigInt> c;
    for (const auto& q : acc) c.push_back(boost::multiprecision::numerator(q));
    return IntPoly(std::move(c));
}

/// Characteristic polynomial, computed two ways and cross-checked.
inline IntPoly char_poly(const IntMatrix& a)
{
    IntPoly f = char_poly_faddeev(a);
    if (f != char_poly_cofactor(a)) throw std::logic_error("characteristic polynomial routes disagree");
    return f;
}

} // namespace sadic
