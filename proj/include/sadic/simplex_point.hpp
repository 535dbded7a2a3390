#pragma once

#include "sadic/error.hpp"
#include "sadic/numeric.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sadic {

/// A point of the standard simplex, exact or at a fixed binary precision.
class SimplexPoint {
public:
    SimplexPoint() = default;

    /// Exact coordinates; they must be nonnegative and sum to 1.
    static SimplexPoint rational(std::vector<Rational> x)
    {
        check_nonnegative(x);
        Rational s = 0;
        for (const auto& v : x) s += v;
        if (s != 1) fail(ErrorKind::InvalidArgument, "coordinates must sum to 1");
        SimplexPoint p;
        p.coords_ = std::move(x);
        return p;
    }

    /// Normalizes a nonzero nonnegative vector onto the simplex.
    static SimplexPoint projective(std::vector<Rational> x)
    {
        check_nonnegative(x);
        Rational s = 0;
        for (const auto& v : x) s += v;
        if (s == 0) fail(ErrorKind::InvalidArgument, "zero vector");
        for (auto& v : x) v /= s;
        return rational(std::move(x));
    }

    /// Float coordinates, renormalized at `bits` bits.
    static SimplexPoint floating(std::vector<BigFloat> x, unsigned bits)
    {
        PrecisionGuard guard(bits);
        BigFloat s = 0;
        for (auto& v : x) {
            v.precision(digits10_for_bits(bits));
            if (v < 0) fail(ErrorKind::InvalidArgument, "negative coordinate");
            s += v;
        }
        if (s <= 0) fail(ErrorKind::InvalidArgument, "zero vector");
        for (auto& v : x) v /= s;
        SimplexPoint p;
        p.coords_ = std::move(x);
        p.bits_ = bits;
        return p;
    }

    static SimplexPoint from_double(const std::vector<double>& x, unsigned bits = kDefaultPrecisionBits)
    {
        PrecisionGuard guard(bits);
        std::vector<BigFloat> v;
        for (double c : x) v.emplace_back(c);
        return floating(std::move(v), bits);
    }

    /// Comma-separated `p/q` rationals (exact mode) or decimals (float mode).
    ///
    /// Rational input must sum to exactly 1. Decimal input must sum to 1
    /// within 1e-9 and is then renormalized at `bits` bits.
    static SimplexPoint parse(std::string_view text, unsigned bits = kDefaultPrecisionBits)
    {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : text) {
            if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else if (c != ' ') {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        bool decimal = false;
        for (const auto& p : parts) {
            if (p.empty()) fail(ErrorKind::Parse, "empty coordinate in '" + std::string(text) + "'");
            if (p.find_first_of(".eE") != std::string::npos) decimal = true;
        }
        try {
            if (!decimal) {
                std::vector<Rational> q;
                for (const auto& p : parts) q.emplace_back(p);
                return rational(std::move(q));
            }
            PrecisionGuard guard(bits);
            std::vector<BigFloat> f;
            BigFloat s = 0;
            for (const auto& p : parts) {
                if (p.find('/') != std::string::npos) fail(ErrorKind::Parse, "cannot mix rationals and decimals");
                f.emplace_back(p);
                s += f.back();
            }
            if (abs(s - 1) > BigFloat("1e-9")) fail(ErrorKind::InvalidArgument, "coordinates must sum to 1");
            return floating(std::move(f), bits);
        } catch (const std::runtime_error& e) {
            if (dynamic_cast<const Error*>(&e)) throw;
            fail(ErrorKind::Parse, "cannot parse vector '" + std::string(text) + "'");
        }
    }

    bool is_rational() const noexcept { return std::holds_alternative<std::vector<Rational>>(coords_); }
    int dimension() const noexcept
    {
        return static_cast<int>(std::visit([](const auto& v) { return v.size(); }, coords_));
    }
    unsigned precision_bits() const noexcept { return bits_; }

    const std::variant<std::vector<Rational>, std::vector<BigFloat>>& coords() const noexcept { return coords_; }
    const std::vector<Rational>& rational_coords() const { return std::get<std::vector<Rational>>(coords_); }
    const std::vector<BigFloat>& float_coords() const { return std::get<std::vector<BigFloat>>(coords_); }

    /// Coordinates converted to floats at `bits` bits; call inside a guard
    /// of at least that precision.
    std::vector<BigFloat> as_float(unsigned bits) const
    {
        std::vector<BigFloat> r;
        if (is_rational()) {
            for (const auto& q : rational_coords()) {
                BigFloat v = to_float(q);
                r.push_back(v);
            }
        } else {
            for (const auto& v : float_coords()) {
                BigFloat c(v, digits10_for_bits(bits));
                r.push_back(c);
            }
        }
        return r;
    }

    std::vector<double> as_double() const
    {
        std::vector<double> r;
        std::visit([&](const auto& v) {
            for (const auto& c : v) r.push_back(c.template convert_to<double>());
        }, coords_);
        return r;
    }

    std::vector<std::string> to_strings(int digits = 40) const
    {
        std::vector<std::string> r;
        if (is_rational()) {
            for (const auto& q : rational_coords()) r.push_back(q.str());
        } else {
            for (const auto& v : float_coords()) r.push_back(v.str(digits, std::ios_base::scientific));
        }
        return r;
    }

    friend bool operator==(const SimplexPoint& a, const SimplexPoint& b)
    {
        return a.bits_ == b.bits_ && a.coords_ == b.coords_;
    }

private:
    template <class V>
    static void check_nonnegative(const V& x)
    {
        if (x.empty()) fail(ErrorKind::InvalidArgument, "empty point");
        for (const auto& v : x)
            if (v < 0) fail(ErrorKind::InvalidArgument, "negative coordinate");
    }

    std::variant<std::vector<Rational>, std::vector<BigFloat>> coords_;
    unsigned bits_ = 0;
};

} // namespace sadic
