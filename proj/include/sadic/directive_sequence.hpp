#pragma once

#include "sadic/error.hpp"
#include "sadic/int_matrix.hpp"
#include "sadic/mcf.hpp"
#include "sadic/substitution.hpp"

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sadic {

/// A sequence of substitutions (sigma_n) with cached products
/// M_[0,n) = M_{sigma_0} ... M_{sigma_{n-1}}.
///
/// Three sources are supported: a periodic list, a finite prefix followed
/// by a period, and the lazy expansion of a point by an algorithm. Copies
/// share the substitution cache; the caches only grow, and a sequence must
/// not be read from several threads while it is still being extended.
class DirectiveSequence {
public:
    enum class Source { Periodic, Explicit, ContinuedFraction };

    static DirectiveSequence periodic(std::vector<Substitution> period)
    {
        return explicit_then_periodic({}, std::move(period));
    }

    static DirectiveSequence explicit_then_periodic(std::vector<Substitution> prefix, std::vector<Substitution> period)
    {
        if (period.empty()) fail(ErrorKind::InvalidArgument, "period must not be empty");
        int d = period.front().dimension();
        for (const auto& s : prefix)
            if (s.dimension() != d) fail(ErrorKind::InvalidArgument, "substitutions of different dimensions");
        for (const auto& s : period)
            if (s.dimension() != d) fail(ErrorKind::InvalidArgument, "substitutions of different dimensions");
        auto st = std::make_shared<State>();
        st->source = prefix.empty() ? Source::Periodic : Source::Explicit;
        st->dim = d;
        st->prefix = std::move(prefix);
        st->period = std::move(period);
        return DirectiveSequence(st, 0);
    }

    /// Periodic or eventually periodic sequence of an algorithm's cells.
    static DirectiveSequence from_cells(const Algorithm& algo, const std::vector<CellLabel>& prefix,
                                        const std::vector<CellLabel>& period)
    {
        std::vector<Substitution> pre, per;
        for (const auto& c : prefix) pre.push_back(algo.substitution(c));
        for (const auto& c : period) per.push_back(algo.substitution(c));
        DirectiveSequence s = explicit_then_periodic(std::move(pre), std::move(per));
        s.state_->algo = algo;
        s.state_->prefix_cells = prefix;
        s.state_->period_cells = period;
        return s;
    }

    /// phi(x) = (phi(T^n x))_n, expanded on demand.
    static DirectiveSequence continued_fraction(const Algorithm& algo, const SimplexPoint& x)
    {
        auto st = std::make_shared<State>();
        st->source = Source::ContinuedFraction;
        st->dim = algo.dimension();
        st->algo = algo;
        st->expander.emplace(algo, x);
        st->iterates.push_back(x);
        return DirectiveSequence(st, 0);
    }

    Source source() const noexcept { return state_->source; }
    int dimension() const noexcept { return state_->dim; }
    std::size_t offset() const noexcept { return offset_; }
    const std::optional<Algorithm>& algorithm() const noexcept { return state_->algo; }

    /// sigma_n; throws the expansion error for CF sequences that leave the domain.
    const Substitution& at(std::size_t n) const { return state_->at(offset_ + n); }

    /// Cell label of sigma_n when the sequence comes from an algorithm.
    std::optional<CellLabel> cell(std::size_t n) const { return state_->cell(offset_ + n); }

    /// T^n x for CF sequences.
    const SimplexPoint& iterate(std::size_t n) const
    {
        if (state_->source != Source::ContinuedFraction) fail(ErrorKind::InvalidArgument, "not a CF-driven sequence");
        state_->at(offset_ + n);
        state_->extend_iterates(offset_ + n);
        return state_->iterates[offset_ + n];
    }

    /// M_[0,n)
    const IntMatrix& product(std::size_t n) const
    {
        auto& cache = *products_;
        if (cache.empty()) cache.push_back(IntMatrix::identity(dimension()));
        while (cache.size() <= n) {
            std::size_t k = cache.size() - 1;
            cache.push_back(cache.back() * at(k).incidence());
        }
        return cache[n];
    }

    /// M_[k,n)
    IntMatrix product(std::size_t k, std::size_t n) const
    {
        IntMatrix m = IntMatrix::identity(dimension());
        for (std::size_t t = k; t < n; ++t) m = m * at(t).incidence();
        return m;
    }

    /// sigma_[k,n) = sigma_k o ... o sigma_{n-1}
    Substitution composed(std::size_t k, std::size_t n) const
    {
        Substitution s = Substitution::identity(dimension());
        for (std::size_t t = k; t < n; ++t) s = compose(s, at(t));
        return s;
    }

    /// The shifted sequence (sigma_{n+k})_k, sharing this sequence's cache.
    DirectiveSequence shifted(std::size_t n) const { return DirectiveSequence(state_, offset_ + n); }

    /// Period data for (eventually) periodic sources, relative to this view.
    std::optional<std::pair<std::size_t, std::size_t>> period_window() const
    {
        if (state_->source == Source::ContinuedFraction) return std::nullopt;
        std::size_t pre = state_->prefix.size();
        std::size_t start = offset_ >= pre ? 0 : pre - offset_;
        return std::make_pair(start, state_->period.size());
    }

    /// Smallest n <= window with M_[0,n) positive, if any.
    std::optional<std::size_t> positive_product_index(std::size_t window = 256) const
    {
        for (std::size_t n = 1; n <= window; ++n) {
            try {
                if (product(n).is_positive()) return n;
            } catch (const Error&) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    std::string describe() const
    {
        const State& s = *state_;
        std::string r;
        switch (s.source) {
        case Source::Periodic: r = "periodic"; break;
        case Source::Explicit: r = "explicit"; break;
        case Source::ContinuedFraction: r = "cf:" + s.algo->name(); break;
        }
        if (offset_) r += " shifted by " + std::to_string(offset_);
        return r;
    }

private:
    struct State {
        Source source = Source::Periodic;
        int dim = 0;
        std::vector<Substitution> prefix, period;
        std::vector<CellLabel> prefix_cells, period_cells;
        std::optional<Algorithm> algo;
        std::optional<Expander> expander;
        std::deque<Substitution> cf_subs;
        std::vector<CellLabel> cf_cells;
        std::vector<SimplexPoint> iterates;
        std::optional<Error> cf_error;

        const Substitution& at(std::size_t n)
        {
            if (source != Source::ContinuedFraction) {
                if (n < prefix.size()) return prefix[n];
                return period[(n - prefix.size()) % period.size()];
            }
            while (cf_subs.size() <= n) {
                if (cf_error) throw *cf_error;
                try {
                    CellLabel c = expander->advance();
                    cf_cells.push_back(c);
                    cf_subs.push_back(algo->substitution(c));
                } catch (const Error& e) {
                    cf_error = Error(e.kind(), e.message() + " at step " + std::to_string(cf_subs.size()));
                    throw *cf_error;
                }
            }
            return cf_subs[n];
        }

        void extend_iterates(std::size_t n)
        {
            while (iterates.size() <= n) {
                auto [c, y] = step(*algo, iterates.back());
                iterates.push_back(std::move(y));
            }
        }

        std::optional<CellLabel> cell(std::size_t n)
        {
            if (!algo) return std::nullopt;
            if (source == Source::ContinuedFraction) {
                at(n);
                return cf_cells[n];
            }
            if (n < prefix_cells.size()) return prefix_cells[n];
            if (period_cells.empty()) return std::nullopt;
            return period_cells[(n - prefix_cells.size()) % period_cells.size()];
        }
    };

    DirectiveSequence(std::shared_ptr<State> st, std::size_t offset)
        : state_(std::move(st)), offset_(offset), products_(std::make_shared<std::vector<IntMatrix>>())
    {
    }

    std::shared_ptr<State> state_;
    std::size_t offset_ = 0;
    std::shared_ptr<std::vector<IntMatrix>> products_;
};

} // namespace sadic
