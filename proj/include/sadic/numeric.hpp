#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace sadic {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using BigFloat = boost::multiprecision::mpfr_float;

using IntVector = std::vector<BigInt>;

inline constexpr unsigned kDefaultPrecisionBits = 256;

inline unsigned digits10_for_bits(unsigned bits)
{
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

/// Sets the default BigFloat precision for the lifetime of the guard.
///
/// Boost.Multiprecision keeps a single process-wide default, so BigFloat
/// work stays on one thread; parallel code paths use double.
class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned bits)
        : saved_(BigFloat::default_precision())
    {
        BigFloat::default_precision(digits10_for_bits(bits));
    }
    ~PrecisionGuard() { BigFloat::default_precision(saved_); }

    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned saved_;
};

inline BigFloat to_float(const Rational& q)
{
    return BigFloat(boost::multiprecision::numerator(q)) /
           BigFloat(boost::multiprecision::denominator(q));
}

inline std::string to_decimal(const BigFloat& x, int digits = 20)
{
    return x.str(digits, std::ios_base::scientific);
}

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }
inline double to_double(const BigFloat& v) { return v.convert_to<double>(); }
inline double to_double(double v) { return v; }

template <class Real>
Real real_from_int(std::int64_t v)
{
    return Real(v);
}

template <class Real>
Real real_floor(const Real& x)
{
    using std::floor;
    return floor(x);
}

template <>
inline Rational real_floor<Rational>(const Rational& x)
{
    BigInt n = boost::multiprecision::numerator(x);
    BigInt d = boost::multiprecision::denominator(x);
    BigInt q = n / d;
    if (n < 0 && q * d != n) q -= 1;
    return Rational(q);
}

} // namespace sadic
