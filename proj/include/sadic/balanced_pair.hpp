#pragma once

#include "sadic/error.hpp"
#include "sadic/substitution.hpp"
#include "sadic/word.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sadic {

/// Two words with the same abelianization, stored with the
/// lexicographically smaller word first.
class BalancedPair {
public:
    BalancedPair(Word a, Word b)
    {
        if (a.empty() || b.empty()) fail(ErrorKind::InvalidArgument, "balanced pair words must be nonempty");
        int d = std::max(a.max_letter(), b.max_letter());
        if (abelianize(a, d) != abelianize(b, d))
            fail(ErrorKind::InvalidArgument, "pair (" + a.to_string() + "," + b.to_string() + ") is not balanced");
        if (b < a) std::swap(a, b);
        first_ = std::move(a);
        second_ = std::move(b);
    }

    const Word& first() const noexcept { return first_; }
    const Word& second() const noexcept { return second_; }
    bool is_coincidence() const { return first_.size() == 1 && first_ == second_; }

    std::string to_string(int d = 9) const { return "(" + first_.to_string(d) + "," + second_.to_string(d) + ")"; }

    friend auto operator<=>(const BalancedPair&, const BalancedPair&) = default;
    friend bool operator==(const BalancedPair&, const BalancedPair&) = default;

private:
    Word first_, second_;
};

/// Splits (v1, v2) at every length where the prefixes of both words have
/// equal abelianization. The parts are irreducible and, concatenated,
/// give back the input (each part in its original orientation).
inline std::vector<BalancedPair> decompose(const Word& v1, const Word& v2)
{
    if (v1.size() != v2.size()) fail(ErrorKind::InvalidArgument, "pair words have different lengths");
    int d = std::max(v1.empty() ? 1 : v1.max_letter(), v2.empty() ? 1 : v2.max_letter());
    std::vector<long long> diff(d + 1, 0);
    std::vector<BalancedPair> parts;
    std::size_t start = 0;
    int nonzero = 0;
    for (std::size_t k = 0; k < v1.size(); ++k) {
        auto bump = [&](Letter a, long long by) {
            long long before = diff[a];
            diff[a] += by;
            nonzero += (before == 0) - (diff[a] == 0);
        };
        bump(v1[k], 1);
        bump(v2[k], -1);
        if (nonzero == 0) {
            parts.emplace_back(v1.substr(start, k + 1 - start), v2.substr(start, k + 1 - start));
            start = k + 1;
        }
    }
    if (start != v1.size()) fail(ErrorKind::InvalidArgument, "pair is not balanced");
    return parts;
}

inline std::vector<BalancedPair> decompose(const BalancedPair& p) { return decompose(p.first(), p.second()); }

enum class BpaVerdict { Terminates, NonDiscrete, Inconclusive };

inline std::string to_string(BpaVerdict v)
{
    switch (v) {
    case BpaVerdict::Terminates: return "Terminates";
    case BpaVerdict::NonDiscrete: return "NonDiscrete";
    case BpaVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct BpaResult {
    BpaVerdict verdict = BpaVerdict::Inconclusive;
    /// levels[k] = I_k, the irreducible pairs produced at step k.
    std::vector<std::set<BalancedPair>> levels;
    /// Pairs first seen at each level.
    std::vector<std::set<BalancedPair>> new_pairs;
    /// Edges pair -> irreducible parts of (sigma(v1), sigma(v2)).
    std::map<BalancedPair, std::set<BalancedPair>> edges;
    /// NonDiscrete: pairs with no path to a coincidence.
    std::set<BalancedPair> witness;
    std::string reason;

    std::set<BalancedPair> all_pairs() const
    {
        std::set<BalancedPair> s;
        for (const auto& l : levels) s.insert(l.begin(), l.end());
        return s;
    }
};

struct BpaOptions {
    std::size_t pair_cap = 10'000;
    std::size_t iter_cap = 1'000;
    /// Longest word allowed in a pair before giving up.
    std::size_t length_cap = 1'000'000;
};

/// The balanced pair algorithm from I_0 = {(ij, ji) : i < j}.
inline BpaResult bpa_run(const Substitution& sigma, const BpaOptions& opt = {})
{
    int d = sigma.dimension();
    BpaResult r;
    std::set<BalancedPair> level;
    for (Letter i = 1; i <= d; ++i)
        for (Letter j = i + 1; j <= d; ++j) level.emplace(Word{i, j}, Word{j, i});
    r.levels.push_back(level);
    r.new_pairs.push_back(level);
    std::set<BalancedPair> seen = level;

    bool closed = false;
    for (std::size_t iter = 0; iter < opt.iter_cap; ++iter) {
        std::set<BalancedPair> next;
        for (const auto& p : level) {
            auto it = r.edges.find(p);
            if (it == r.edges.end()) {
                Word a = sigma.apply(p.first()), b = sigma.apply(p.second());
                if (a.size() > opt.length_cap) {
                    r.verdict = BpaVerdict::Inconclusive;
                    r.reason = "pair length cap exceeded";
                    return r;
                }
                auto parts = decompose(a, b);
                it = r.edges.emplace(p, std::set<BalancedPair>(parts.begin(), parts.end())).first;
            }
            next.insert(it->second.begin(), it->second.end());
        }
        std::set<BalancedPair> fresh;
        for (const auto& p : next)
            if (!seen.count(p)) fresh.insert(p);
        r.levels.push_back(next);
        r.new_pairs.push_back(fresh);
        seen.insert(fresh.begin(), fresh.end());
        if (seen.size() > opt.pair_cap) {
            r.verdict = BpaVerdict::Inconclusive;
            r.reason = "pair cap exceeded";
            return r;
        }
        if (fresh.empty()) {
            closed = true;
            break;
        }
        level = std::move(next);
    }
    if (!closed) {
        r.verdict = BpaVerdict::Inconclusive;
        r.reason = "iteration cap exceeded";
        return r;
    }

    // Every pair in the closure has its edges; coincidences map to
    // coincidences. Backward reachability from the coincidences.
    for (const auto& p : seen)
        if (!r.edges.count(p)) {
            auto parts = decompose(sigma.apply(p.first()), sigma.apply(p.second()));
            r.edges.emplace(p, std::set<BalancedPair>(parts.begin(), parts.end()));
        }
    std::set<BalancedPair> good;
    for (const auto& p : seen)
        if (p.is_coincidence()) good.insert(p);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [p, out] : r.edges) {
            if (good.count(p)) continue;
            for (const auto& q : out)
                if (good.count(q)) {
                    good.insert(p);
                    changed = true;
                    break;
                }
        }
    }
    for (const auto& p : seen)
        if (!good.count(p)) r.witness.insert(p);
    r.verdict = r.witness.empty() ? BpaVerdict::Terminates : BpaVerdict::NonDiscrete;
    if (!r.witness.empty()) r.reason = std::to_string(r.witness.size()) + " pairs never reach a coincidence";
    return r;
}

} // namespace sadic
