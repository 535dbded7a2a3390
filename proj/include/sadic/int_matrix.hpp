#pragma once

#include "sadic/error.hpp"
#include "sadic/numeric.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace sadic {

/// Square matrix of arbitrary-size integers, row-major.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}
    IntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
        : IntMatrix(static_cast<int>(rows.size()))
    {
        int i = 0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != n_) fail(ErrorKind::InvalidArgument, "matrix is not square");
            int j = 0;
            for (long long v : row) (*this)(i, j++) = v;
            ++i;
        }
    }

    static IntMatrix identity(int n)
    {
        IntMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int size() const noexcept { return n_; }
    BigInt& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const BigInt& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    IntVector column(int j) const
    {
        IntVector c(n_);
        for (int i = 0; i < n_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    IntVector column_sums() const
    {
        IntVector s(n_);
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i) s[j] += (*this)(i, j);
        return s;
    }

    IntMatrix transpose() const
    {
        IntMatrix t(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b)
    {
        if (a.n_ != b.n_) fail(ErrorKind::InvalidArgument, "matrix size mismatch");
        IntMatrix c(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k) {
                const BigInt& aik = a(i, k);
                if (aik == 0) continue;
                for (int j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend IntVector operator*(const IntMatrix& a, const IntVector& v)
    {
        if (static_cast<int>(v.size()) != a.n_) fail(ErrorKind::InvalidArgument, "vector size mismatch");
        IntVector r(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int j = 0; j < a.n_; ++j) r[i] += a(i, j) * v[j];
        return r;
    }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

    IntMatrix power(unsigned k) const
    {
        IntMatrix r = identity(n_), b = *this;
        while (k) {
            if (k & 1u) r = r * b;
            b = b * b;
            k >>= 1u;
        }
        return r;
    }

    bool is_nonnegative() const
    {
        for (const auto& x : a_)
            if (x < 0) return false;
        return true;
    }
    bool is_positive() const
    {
        for (const auto& x : a_)
            if (x <= 0) return false;
        return true;
    }

    /// Fraction-free Gaussian elimination (Bareiss).
    BigInt determinant() const
    {
        if (n_ == 0) return 1;
        std::vector<BigInt> m = a_;
        auto at = [&](int i, int j) -> BigInt& { return m[static_cast<std::size_t>(i) * n_ + j]; };
        BigInt prev = 1;
        int sign = 1;
        for (int k = 0; k < n_ - 1; ++k) {
            if (at(k, k) == 0) {
                int p = k + 1;
                while (p < n_ && at(p, k) == 0) ++p;
                if (p == n_) return 0;
                for (int j = 0; j < n_; ++j) std::swap(at(k, j), at(p, j));
                sign = -sign;
            }
            for (int i = k + 1; i < n_; ++i)
                for (int j = k + 1; j < n_; ++j) at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
            prev = at(k, k);
        }
        return sign * at(n_ - 1, n_ - 1);
    }

    /// Exact inverse of a unimodular matrix.
    IntMatrix inverse_unimodular() const
    {
        std::vector<Rational> m(static_cast<std::size_t>(n_) * 2 * n_);
        auto at = [&](int i, int j) -> Rational& { return m[static_cast<std::size_t>(i) * 2 * n_ + j]; };
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) at(i, j) = Rational((*this)(i, j));
            at(i, n_ + i) = 1;
        }
        for (int c = 0; c < n_; ++c) {
            int p = c;
            while (p < n_ && at(p, c) == 0) ++p;
            if (p == n_) fail(ErrorKind::InvalidArgument, "matrix is singular");
            if (p != c)
                for (int j = 0; j < 2 * n_; ++j) std::swap(at(c, j), at(p, j));
            Rational piv = at(c, c);
            for (int j = 0; j < 2 * n_; ++j) at(c, j) /= piv;
            for (int i = 0; i < n_; ++i) {
                if (i == c || at(i, c) == 0) continue;
                Rational f = at(i, c);
                for (int j = 0; j < 2 * n_; ++j) at(i, j) -= f * at(c, j);
            }
        }
        IntMatrix inv(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                const Rational& q = at(i, n_ + j);
                if (boost::multiprecision::denominator(q) != 1)
                    fail(ErrorKind::InvalidArgument, "matrix is not unimodular");
                inv(i, j) = boost::multiprecision::numerator(q);
            }
        return inv;
    }

    std::vector<std::vector<std::string>> to_strings() const
    {
        std::vector<std::vector<std::string>> rows(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) rows[i].push_back((*this)(i, j).str());
        return rows;
    }

    std::string to_string() const
    {
        std::string s = "[";
        for (int i = 0; i < n_; ++i) {
            s += i ? ",[" : "[";
            for (int j = 0; j < n_; ++j) s += (j ? "," : "") + (*this)(i, j).str();
            s += "]";
        }
        return s + "]";
    }

    std::vector<double> to_double() const
    {
        std::vector<double> r(a_.size());
        for (std::size_t k = 0; k < a_.size(); ++k) r[k] = a_[k].convert_to<double>();
        return r;
    }

private:
    int n_ = 0;
    std::vector<BigInt> a_;
};

} // namespace sadic
