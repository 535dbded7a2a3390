#pragma once

#include "sadic/directive_sequence.hpp"
#include "sadic/error.hpp"
#include "sadic/numeric.hpp"
#include "sadic/perron.hpp"
#include "sadic/simplex_point.hpp"

#include <cmath>
#include <string>
#include <variant>
#include <vector>

namespace sadic {

/// Projection along a direction u onto the hyperplane 1-perp, with a fixed
/// orthonormal basis of 1-perp obtained by Gram-Schmidt on e_i - e_d.
class ProjectionFrame {
public:
    explicit ProjectionFrame(SimplexPoint u) : u_(std::move(u)), ud_(u_.as_double())
    {
        int d = u_.dimension();
        for (int i = 0; i + 1 < d; ++i) {
            std::vector<long double> v(d, 0);
            v[i] = 1;
            v[d - 1] = -1;
            for (const auto& b : basis_) {
                long double dot = 0;
                for (int k = 0; k < d; ++k) dot += v[k] * b[k];
                for (int k = 0; k < d; ++k) v[k] -= dot * b[k];
            }
            long double norm = 0;
            for (auto c : v) norm += c * c;
            norm = std::sqrt(norm);
            for (auto& c : v) c /= norm;
            basis_.push_back(std::move(v));
        }
        std::visit([&](const auto& v) {
            for (const auto& c : v) ul_.push_back(c.template convert_to<long double>());
        }, u_.coords());
    }

    int dimension() const noexcept { return u_.dimension(); }
    const SimplexPoint& direction() const noexcept { return u_; }
    const std::vector<double>& direction_double() const noexcept { return ud_; }
    const std::vector<std::vector<long double>>& basis() const noexcept { return basis_; }

    /// pi'_u v = v - <1, v> u, in ambient coordinates.
    template <class T>
    std::vector<long double> project(const std::vector<T>& v) const
    {
        long double s = 0;
        for (const auto& c : v) s += static_cast<long double>(c);
        std::vector<long double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) r[i] = static_cast<long double>(v[i]) - s * ul_[i];
        return r;
    }

    /// Basis coordinates of a vector of 1-perp.
    std::vector<long double> coordinates(const std::vector<long double>& w) const
    {
        std::vector<long double> c(basis_.size(), 0);
        for (std::size_t k = 0; k < basis_.size(); ++k)
            for (std::size_t i = 0; i < w.size(); ++i) c[k] += basis_[k][i] * w[i];
        return c;
    }

    /// Ambient vector of 1-perp from basis coordinates.
    template <class T>
    std::vector<long double> ambient(const T* coords) const
    {
        std::vector<long double> w(dimension(), 0);
        for (std::size_t k = 0; k < basis_.size(); ++k)
            for (int i = 0; i < dimension(); ++i) w[i] += basis_[k][i] * static_cast<long double>(coords[k]);
        return w;
    }

    template <class T>
    std::vector<long double> project_coordinates(const std::vector<T>& v) const
    {
        return coordinates(project(v));
    }

    /// pi: omit the last coordinate.
    template <class T>
    static std::vector<T> drop_last(std::vector<T> v)
    {
        v.pop_back();
        return v;
    }

private:
    SimplexPoint u_;
    std::vector<double> ud_;
    std::vector<long double> ul_;
    std::vector<std::vector<long double>> basis_;
};

enum class EigenvectorMode { CfPoint, Periodic, Cone };

inline std::string to_string(EigenvectorMode m)
{
    switch (m) {
    case EigenvectorMode::CfPoint: return "cf-point";
    case EigenvectorMode::Periodic: return "periodic";
    case EigenvectorMode::Cone: return "cone";
    }
    return "?";
}

inline EigenvectorMode parse_eigenvector_mode(const std::string& s)
{
    if (s == "cf-point") return EigenvectorMode::CfPoint;
    if (s == "periodic") return EigenvectorMode::Periodic;
    if (s == "cone") return EigenvectorMode::Cone;
    fail(ErrorKind::InvalidArgument, "unknown eigenvector mode '" + s + "'");
}

/// The natural mode for a sequence: the expanded point for CF sequences,
/// the Perron vector for (eventually) periodic ones.
inline EigenvectorMode default_mode(const DirectiveSequence& seq)
{
    return seq.source() == DirectiveSequence::Source::ContinuedFraction ? EigenvectorMode::CfPoint
                                                                        : EigenvectorMode::Periodic;
}

struct EigenvectorResult {
    SimplexPoint u;
    EigenvectorMode mode = EigenvectorMode::CfPoint;
    /// Cone mode: the n at which iteration stopped.
    std::size_t depth = 0;
    /// Cone mode: l1 distance between the last two normalized iterates.
    double residual = 0;
};

struct EigenvectorOptions {
    double tol = 1e-14;
    std::size_t window = 256;
    std::size_t max_depth = 4096;
    unsigned bits = kDefaultPrecisionBits;
};

inline EigenvectorResult right_eigenvector(const DirectiveSequence& seq, EigenvectorMode mode,
                                           const EigenvectorOptions& opt = {})
{
    EigenvectorResult r;
    r.mode = mode;
    int d = seq.dimension();
    switch (mode) {
    case EigenvectorMode::CfPoint:
        if (seq.source() != DirectiveSequence::Source::ContinuedFraction)
            fail(ErrorKind::InvalidArgument, "cf-point mode needs a CF-driven sequence");
        r.u = seq.iterate(0);
        return r;
    case EigenvectorMode::Periodic: {
        auto pw = seq.period_window();
        if (!pw) fail(ErrorKind::InvalidArgument, "periodic mode needs an (eventually) periodic sequence");
        auto [start, len] = *pw;
        IntMatrix period = seq.product(start, start + len);
        SimplexPoint v = perron_vector(period, opt.bits);
        if (start == 0) {
            r.u = v;
            return r;
        }
        PrecisionGuard guard(opt.bits + 32);
        const IntMatrix& pre = seq.product(start);
        auto vf = v.as_float(opt.bits + 32);
        std::vector<BigFloat> w(d, BigFloat(0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) w[i] += BigFloat(pre(i, j)) * vf[j];
        r.u = SimplexPoint::floating(std::move(w), opt.bits);
        return r;
    }
    case EigenvectorMode::Cone: {
        if (!seq.positive_product_index(opt.window))
            fail(ErrorKind::NotPrimitive, "no positive product within " + std::to_string(opt.window) + " steps");
        auto normalized = [&](std::size_t n) {
            IntVector s(d, BigInt(0));
            const IntMatrix& m = seq.product(n);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) s[i] += m(i, j);
            PrecisionGuard guard(opt.bits);
            std::vector<BigFloat> f;
            for (auto& v : s) f.emplace_back(v);
            return SimplexPoint::floating(std::move(f), opt.bits);
        };
        SimplexPoint prev = normalized(0);
        for (std::size_t n = 1; n <= opt.max_depth; ++n) {
            SimplexPoint cur = normalized(n);
            auto a = prev.as_double(), b = cur.as_double();
            double res = 0;
            for (int i = 0; i < d; ++i) res += std::abs(a[i] - b[i]);
            r.depth = n;
            r.residual = res;
            prev = std::move(cur);
            if (res < opt.tol) break;
        }
        r.u = std::move(prev);
        return r;
    }
    }
    return r;
}

} // namespace sadic
