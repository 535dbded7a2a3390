#pragma once

#include "sadic/error.hpp"
#include "sadic/int_matrix.hpp"
#include "sadic/numeric.hpp"
#include "sadic/simplex_point.hpp"
#include "sadic/substitution.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sadic {

enum class AlgorithmKind { CassaigneSelmer, ArnouxRauzy, Brun, JacobiPerron };

/// Cell of an algorithm's partition.
///
/// Cassaigne-Selmer and Arnoux-Rauzy use `first` only (1-based). Brun uses
/// the ordered pair (i, j) of largest and second largest coordinate. Jacobi-
/// Perron stores its digits (a, b).
struct CellLabel {
    std::int64_t first = 0;
    std::int64_t second = 0;

    friend auto operator<=>(const CellLabel&, const CellLabel&) = default;
};

class Algorithm {
public:
    static Algorithm cassaigne_selmer() { return {AlgorithmKind::CassaigneSelmer, 3}; }
    static Algorithm arnoux_rauzy(int d) { return {AlgorithmKind::ArnouxRauzy, d}; }
    static Algorithm brun(int d) { return {AlgorithmKind::Brun, d}; }
    static Algorithm jacobi_perron() { return {AlgorithmKind::JacobiPerron, 3}; }

    /// Accepts "cs", "ar", "brun", "jp" and their long names.
    static Algorithm from_name(std::string name, int d = 3)
    {
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
        if (name == "cs" || name == "cassaigne" || name == "cassaigne-selmer") {
            if (d != 3) fail(ErrorKind::InvalidArgument, "Cassaigne-Selmer is defined for d = 3");
            return cassaigne_selmer();
        }
        if (name == "ar" || name == "arnoux-rauzy") return arnoux_rauzy(d);
        if (name == "brun") return brun(d);
        if (name == "jp" || name == "jacobi-perron") {
            if (d != 3) fail(ErrorKind::InvalidArgument, "Jacobi-Perron is implemented for d = 3");
            return jacobi_perron();
        }
        fail(ErrorKind::InvalidArgument, "unknown algorithm '" + name + "'");
    }

    AlgorithmKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return d_; }

    std::string name() const
    {
        switch (kind_) {
        case AlgorithmKind::CassaigneSelmer: return "cs";
        case AlgorithmKind::ArnouxRauzy: return "ar";
        case AlgorithmKind::Brun: return "brun";
        case AlgorithmKind::JacobiPerron: return "jp";
        }
        return "?";
    }

    bool valid_label(CellLabel c) const
    {
        switch (kind_) {
        case AlgorithmKind::CassaigneSelmer: return (c.first == 1 || c.first == 2) && c.second == 0;
        case AlgorithmKind::ArnouxRauzy: return c.first >= 1 && c.first <= d_ && c.second == 0;
        case AlgorithmKind::Brun:
            return c.first >= 1 && c.first <= d_ && c.second >= 1 && c.second <= d_ && c.first != c.second;
        case AlgorithmKind::JacobiPerron: return c.first >= 0 && c.first <= c.second && c.second != 0;
        }
        return false;
    }

    /// Incidence matrix of the selected substitution, i.e. the transpose
    /// of A(x) on the cell, as small integers in row-major order.
    std::vector<std::int64_t> incidence_entries(CellLabel c) const
    {
        check_label(c);
        int d = d_;
        std::vector<std::int64_t> m(static_cast<std::size_t>(d) * d, 0);
        auto at = [&](int i, int j) -> std::int64_t& { return m[static_cast<std::size_t>(i) * d + j]; };
        switch (kind_) {
        case AlgorithmKind::CassaigneSelmer:
            if (c.first == 1) {
                at(0, 0) = 1; at(0, 1) = 1; at(1, 2) = 1; at(2, 1) = 1;
            } else {
                at(0, 1) = 1; at(1, 0) = 1; at(2, 1) = 1; at(2, 2) = 1;
            }
            break;
        case AlgorithmKind::ArnouxRauzy: {
            int i = static_cast<int>(c.first) - 1;
            for (int k = 0; k < d; ++k) at(k, k) = 1;
            for (int j = 0; j < d; ++j) at(i, j) = 1;
            break;
        }
        case AlgorithmKind::Brun:
            for (int k = 0; k < d; ++k) at(k, k) = 1;
            at(static_cast<int>(c.first) - 1, static_cast<int>(c.second) - 1) = 1;
            break;
        case AlgorithmKind::JacobiPerron:
            at(1, 0) = 1;
            at(2, 1) = 1;
            at(0, 2) = 1;
            at(1, 2) = c.first;
            at(2, 2) = c.second;
            break;
        }
        return m;
    }

    /// The matrix A(x) for x in the cell.
    IntMatrix matrix(CellLabel c) const { return incidence_matrix(c).transpose(); }

    IntMatrix incidence_matrix(CellLabel c) const
    {
        auto e = incidence_entries(c);
        IntMatrix m(d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) m(i, j) = e[static_cast<std::size_t>(i) * d_ + j];
        return m;
    }

    /// The substitution selected on the cell.
    Substitution substitution(CellLabel c) const
    {
        check_label(c);
        int d = d_;
        std::vector<Word> im(d);
        switch (kind_) {
        case AlgorithmKind::CassaigneSelmer:
            im = c.first == 1 ? std::vector<Word>{Word{1}, Word{1, 3}, Word{2}}
                              : std::vector<Word>{Word{2}, Word{1, 3}, Word{3}};
            break;
        case AlgorithmKind::ArnouxRauzy: {
            int i = static_cast<int>(c.first);
            for (int j = 1; j <= d; ++j) im[j - 1] = j == i ? Word{i} : Word{i, j};
            break;
        }
        case AlgorithmKind::Brun: {
            int i = static_cast<int>(c.first), j = static_cast<int>(c.second);
            for (int k = 1; k <= d; ++k) im[k - 1] = k == j ? Word{i, j} : Word{k};
            break;
        }
        case AlgorithmKind::JacobiPerron: {
            im[0] = Word{2};
            im[1] = Word{3};
            Word w{1};
            for (std::int64_t k = 0; k < c.first; ++k) w.push_back(2);
            for (std::int64_t k = 0; k < c.second; ++k) w.push_back(3);
            im[2] = w;
            break;
        }
        }
        return Substitution(std::move(im));
    }

    /// Transition rule between consecutive cells.
    ///
    /// Brun admits (ij, ij) and (ij, jk). Jacobi-Perron forbids a = 0 right
    /// after a digit pair with a = b, as forced by the map itself.
    bool admissible(std::span<const CellLabel> cells) const
    {
        for (const auto& c : cells)
            if (!valid_label(c)) return false;
        for (std::size_t n = 0; n + 1 < cells.size(); ++n) {
            const CellLabel& s = cells[n];
            const CellLabel& t = cells[n + 1];
            if (kind_ == AlgorithmKind::Brun) {
                if (!(t == s || t.first == s.second)) return false;
            } else if (kind_ == AlgorithmKind::JacobiPerron) {
                if (s.first == s.second && t.first == 0) return false;
            }
        }
        return true;
    }

    /// All cells for the finite-range algorithms; Jacobi-Perron cells are
    /// listed up to b <= jp_bound.
    std::vector<CellLabel> cells(std::int64_t jp_bound = 3) const
    {
        std::vector<CellLabel> r;
        switch (kind_) {
        case AlgorithmKind::CassaigneSelmer: r = {{1, 0}, {2, 0}}; break;
        case AlgorithmKind::ArnouxRauzy:
            for (int i = 1; i <= d_; ++i) r.push_back({i, 0});
            break;
        case AlgorithmKind::Brun:
            for (int i = 1; i <= d_; ++i)
                for (int j = 1; j <= d_; ++j)
                    if (i != j) r.push_back({i, j});
            break;
        case AlgorithmKind::JacobiPerron:
            for (std::int64_t b = 1; b <= jp_bound; ++b)
                for (std::int64_t a = 0; a <= b; ++a) r.push_back({a, b});
            break;
        }
        return r;
    }

    std::string label_to_string(CellLabel c) const
    {
        if (kind_ == AlgorithmKind::Brun || kind_ == AlgorithmKind::JacobiPerron)
            return "(" + std::to_string(c.first) + "," + std::to_string(c.second) + ")";
        return std::to_string(c.first);
    }

    /// Parses "1" or "(1,2)" / "1:2".
    CellLabel parse_label(std::string s) const
    {
        std::string t;
        for (char ch : s)
            if (ch != '(' && ch != ')' && ch != ' ') t.push_back(ch == ':' ? ',' : ch);
        CellLabel c;
        try {
            auto comma = t.find(',');
            if (comma == std::string::npos) {
                c.first = std::stoll(t);
            } else {
                c.first = std::stoll(t.substr(0, comma));
                c.second = std::stoll(t.substr(comma + 1));
            }
        } catch (const std::exception&) {
            fail(ErrorKind::Parse, "bad cell label '" + s + "'");
        }
        if (!valid_label(c)) fail(ErrorKind::Parse, "invalid cell label '" + s + "' for " + name());
        return c;
    }

    friend bool operator==(const Algorithm&, const Algorithm&) = default;

private:
    Algorithm(AlgorithmKind k, int d) : kind_(k), d_(d)
    {
        if (d < 2 || d > 16) fail(ErrorKind::InvalidArgument, "dimension must be between 2 and 16");
    }

    void check_label(CellLabel c) const
    {
        if (!valid_label(c)) fail(ErrorKind::InvalidArgument, "invalid cell label " + label_to_string(c));
    }

    AlgorithmKind kind_;
    int d_;
};

namespace detail {

/// floor(num / den) for num >= 0, den > 0, verified against the products.
///
/// Float candidates are checked at doubled precision, where a * den is
/// exact; up to four doublings are tried.
template <class Real>
std::int64_t verified_floor(const Real& num, const Real& den)
{
    if constexpr (std::is_same_v<Real, Rational>) {
        BigInt q = boost::multiprecision::numerator(num) * boost::multiprecision::denominator(den) /
                   (boost::multiprecision::denominator(num) * boost::multiprecision::numerator(den));
        if (q > BigInt(INT64_MAX / 4)) fail(ErrorKind::DegenerateBoundary, "Jacobi-Perron digit overflow");
        return q.convert_to<std::int64_t>();
    } else if constexpr (std::is_same_v<Real, double>) {
        double q = std::floor(num / den);
        if (!(q < 4e18)) fail(ErrorKind::DegenerateBoundary, "Jacobi-Perron digit overflow");
        auto a = static_cast<std::int64_t>(q);
        for (std::int64_t cand : {a, a - 1, a + 1}) {
            if (cand < 0) continue;
            double lo = static_cast<double>(cand) * den;
            double hi = static_cast<double>(cand + 1) * den;
            if (lo <= num && num < hi) return cand;
        }
        fail(ErrorKind::DegenerateBoundary, "Jacobi-Perron digit not resolvable in double precision");
    } else {
        BigFloat qf = floor(num / den);
        if (qf > BigFloat(4e18)) fail(ErrorKind::DegenerateBoundary, "Jacobi-Perron digit overflow");
        auto a = qf.template convert_to<std::int64_t>();
        unsigned bits = std::max(num.precision(), den.precision()) * 332 / 100 + 8;
        for (int doubling = 1; doubling <= 4; ++doubling) {
            PrecisionGuard guard(bits << doubling);
            BigFloat n(num, digits10_for_bits(bits << doubling));
            BigFloat dd(den, digits10_for_bits(bits << doubling));
            for (std::int64_t cand : {a, a - 1, a + 1}) {
                if (cand < 0) continue;
                BigFloat lo = BigFloat(cand) * dd;
                BigFloat hi = BigFloat(cand + 1) * dd;
                if (lo <= n && n < hi) return cand;
            }
        }
        fail(ErrorKind::DegenerateBoundary, "Jacobi-Perron digit not resolved after 4 precision doublings");
    }
}

} // namespace detail

/// Cell containing x, with ties resolved as documented on each algorithm.
template <class Real>
CellLabel branch(const Algorithm& algo, std::span<const Real> x)
{
    int d = algo.dimension();
    if (static_cast<int>(x.size()) != d) fail(ErrorKind::InvalidArgument, "point dimension mismatch");
    switch (algo.kind()) {
    case AlgorithmKind::CassaigneSelmer:
        return x[0] >= x[2] ? CellLabel{1, 0} : CellLabel{2, 0};
    case AlgorithmKind::ArnouxRauzy: {
        Real total = 0;
        for (const auto& v : x) total += v;
        for (int i = 0; i < d; ++i) {
            Real rest = total - x[i];
            if (x[i] >= rest) return CellLabel{i + 1, 0};
        }
        fail(ErrorKind::OutsideDomain, "no coordinate dominates the others");
    }
    case AlgorithmKind::Brun: {
        int i = 0;
        for (int k = 1; k < d; ++k)
            if (x[k] > x[i]) i = k;
        int j = i == 0 ? 1 : 0;
        for (int k = 0; k < d; ++k)
            if (k != i && x[k] > x[j]) j = k;
        return CellLabel{i + 1, j + 1};
    }
    case AlgorithmKind::JacobiPerron: {
        if (x[0] > x[2] || x[1] > x[2]) fail(ErrorKind::OutsideDomain, "Jacobi-Perron needs x1 <= x3 and x2 <= x3");
        if (x[0] == 0) fail(ErrorKind::DegenerateBoundary, "Jacobi-Perron denominator x1 = 0");
        std::int64_t a = detail::verified_floor(x[1], x[0]);
        std::int64_t b = detail::verified_floor(x[2], x[0]);
        return CellLabel{a, b};
    }
    }
    fail(ErrorKind::InvalidArgument, "unknown algorithm");
}

/// tr(A)^{-1} x on the given cell, from the closed-form branch formulas.
template <class Real>
std::vector<Real> apply_inverse(const Algorithm& algo, CellLabel c, std::span<const Real> x)
{
    int d = algo.dimension();
    std::vector<Real> y(x.begin(), x.end());
    switch (algo.kind()) {
    case AlgorithmKind::CassaigneSelmer:
        if (c.first == 1) y = {x[0] - x[2], x[2], x[1]};
        else y = {x[1], x[0], x[2] - x[0]};
        break;
    case AlgorithmKind::ArnouxRauzy: {
        int i = static_cast<int>(c.first) - 1;
        for (int j = 0; j < d; ++j)
            if (j != i) y[i] -= x[j];
        break;
    }
    case AlgorithmKind::Brun:
        y[c.first - 1] -= x[c.second - 1];
        break;
    case AlgorithmKind::JacobiPerron:
        y = {x[1] - Real(c.first) * x[0], x[2] - Real(c.second) * x[0], x[0]};
        break;
    }
    return y;
}

/// One application of the projective map T; returns the cell and T(x).
template <class Real>
std::pair<CellLabel, std::vector<Real>> step(const Algorithm& algo, std::span<const Real> x)
{
    CellLabel c = branch<Real>(algo, x);
    std::vector<Real> y = apply_inverse<Real>(algo, c, x);
    Real s = 0;
    for (auto& v : y) {
        if (v < 0) {
            // Only float rounding can produce this; the exact value is a boundary zero.
            if constexpr (std::is_same_v<Real, Rational>) fail(ErrorKind::OutsideDomain, "negative image coordinate");
            v = 0;
        }
        s += v;
    }
    if (s == 0) fail(ErrorKind::ZeroImage, "tr(A)^{-1} x vanished");
    for (auto& v : y) v /= s;
    return {c, std::move(y)};
}

inline CellLabel branch(const Algorithm& algo, const SimplexPoint& x)
{
    if (x.is_rational()) return branch<Rational>(algo, x.rational_coords());
    PrecisionGuard guard(x.precision_bits());
    return branch<BigFloat>(algo, x.float_coords());
}

inline std::pair<CellLabel, SimplexPoint> step(const Algorithm& algo, const SimplexPoint& x)
{
    if (x.is_rational()) {
        auto [c, y] = step<Rational>(algo, x.rational_coords());
        return {c, SimplexPoint::rational(std::move(y))};
    }
    PrecisionGuard guard(x.precision_bits());
    auto [c, y] = step<BigFloat>(algo, x.float_coords());
    return {c, SimplexPoint::floating(std::move(y), x.precision_bits())};
}

struct ExpansionFailure {
    std::size_t step = 0;
    ErrorKind kind = ErrorKind::OutsideDomain;
    std::string message;
};

/// The first n steps of an expansion.
///
/// products[k] is tr A^(k)(x) = tr A(x) tr A(Tx) ... tr A(T^{k-1}x), which
/// equals the incidence matrix of sigma_0 o ... o sigma_{k-1}. Keeping this
/// left-to-right order is what makes M_{sigma_[0,k)} = tr A^(k)(x) hold.
struct ExpansionRecord {
    Algorithm algorithm = Algorithm::cassaigne_selmer();
    SimplexPoint start;
    std::vector<CellLabel> cells;
    std::vector<IntMatrix> products;
    std::vector<SimplexPoint> iterates;
    std::optional<ExpansionFailure> failure;

    std::size_t steps() const noexcept { return cells.size(); }
};

/// Incremental expansion; one step at a time with exact products.
class Expander {
public:
    Expander(Algorithm algo, SimplexPoint x) : algo_(algo), current_(std::move(x)), product_(IntMatrix::identity(algo.dimension()))
    {
        if (current_.dimension() != algo_.dimension()) fail(ErrorKind::InvalidArgument, "point dimension mismatch");
    }

    /// Advances by one step; throws on domain errors.
    CellLabel advance()
    {
        auto [c, y] = step(algo_, current_);
        product_ = product_ * algo_.incidence_matrix(c);
        current_ = std::move(y);
        return c;
    }

    const SimplexPoint& current() const noexcept { return current_; }
    const IntMatrix& product() const noexcept { return product_; }
    const Algorithm& algorithm() const noexcept { return algo_; }

private:
    Algorithm algo_;
    SimplexPoint current_;
    IntMatrix product_;
};

inline ExpansionRecord expand(const Algorithm& algo, const SimplexPoint& x, std::size_t n)
{
    ExpansionRecord rec;
    rec.algorithm = algo;
    rec.start = x;
    Expander ex(algo, x);
    rec.products.push_back(ex.product());
    rec.iterates.push_back(x);
    for (std::size_t k = 0; k < n; ++k) {
        try {
            rec.cells.push_back(ex.advance());
        } catch (const Error& e) {
            rec.failure = ExpansionFailure{k, e.kind(), e.what()};
            break;
        }
        rec.products.push_back(ex.product());
        rec.iterates.push_back(ex.current());
    }
    return rec;
}

/// Columns y_i^(k) of tr A^(k)(x) for k = 0..steps.
inline std::vector<std::vector<IntVector>> convergents(const ExpansionRecord& rec)
{
    std::vector<std::vector<IntVector>> r;
    for (const auto& m : rec.products) {
        std::vector<IntVector> cols;
        for (int j = 0; j < m.size(); ++j) cols.push_back(m.column(j));
        r.push_back(std::move(cols));
    }
    return r;
}

struct ConvergenceErrors {
    /// strong[k][i] = || y_i^(k) - ||y_i^(k)||_1 x ||_2
    std::vector<std::vector<double>> strong;
    /// weak[k][i] = || y_i^(k) / ||y_i^(k)||_1 - x ||_2
    std::vector<std::vector<double>> weak;
    unsigned precision_bits = 0;
};

inline ConvergenceErrors convergence_errors(const ExpansionRecord& rec, unsigned bits = kDefaultPrecisionBits)
{
    if (!rec.start.is_rational()) bits = std::max(bits, rec.start.precision_bits());
    PrecisionGuard guard(bits);
    std::vector<BigFloat> x = rec.start.as_float(bits);
    ConvergenceErrors out;
    out.precision_bits = bits;
    int d = static_cast<int>(x.size());
    for (const auto& m : rec.products) {
        std::vector<double> s_row, w_row;
        for (int j = 0; j < d; ++j) {
            BigFloat norm1 = 0;
            for (int i = 0; i < d; ++i) norm1 += BigFloat(m(i, j));
            BigFloat es = 0, ew = 0;
            for (int i = 0; i < d; ++i) {
                BigFloat yi(m(i, j));
                BigFloat a = yi - norm1 * x[i];
                BigFloat b = yi / norm1 - x[i];
                es += a * a;
                ew += b * b;
            }
            s_row.push_back(sqrt(es).convert_to<double>());
            w_row.push_back(sqrt(ew).convert_to<double>());
        }
        out.strong.push_back(std::move(s_row));
        out.weak.push_back(std::move(w_row));
    }
    return out;
}

} // namespace sadic
