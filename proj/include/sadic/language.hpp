#pragma once

#include "sadic/directive_sequence.hpp"
#include "sadic/error.hpp"
#include "sadic/limit_word.hpp"
#include "sadic/word.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace sadic {

/// Factors of length <= max_length found in sigma_[0,depth)(i), i in A.
struct LanguageTable {
    std::size_t max_length = 0;
    std::size_t depth = 0;
    /// Whether the sets were unchanged at depth + 1.
    bool saturated = false;
    /// factors[m] holds the sorted factors of length m; factors[0] = {""}.
    std::vector<std::vector<Word>> factors;
    /// Length of the longest scanned image.
    std::size_t longest_image = 0;

    std::size_t complexity(std::size_t m) const { return factors.at(m).size(); }

    bool contains(const Word& w) const
    {
        if (w.size() > max_length) return false;
        const auto& f = factors[w.size()];
        return std::binary_search(f.begin(), f.end(), w);
    }
};

namespace detail {

/// Two-letter factors of the tail language, read from images of growing
/// level until the set is unchanged for `confirm` levels.
inline std::vector<std::string> tail_pairs(const DirectiveSequence& tail, std::size_t confirm = 3,
                                           std::size_t max_level = 64, std::size_t max_length = 1'000'000)
{
    std::unordered_set<std::string> pairs;
    std::size_t still = 0;
    for (std::size_t level = 1; level <= max_level && still < confirm; ++level) {
        IntVector lens = tail.product(level).column_sums();
        if (*std::max_element(lens.begin(), lens.end()) > BigInt(max_length)) break;
        std::size_t before = pairs.size();
        for (Letter j = 1; j <= tail.dimension(); ++j) {
            Word w = image(tail, level, j);
            const std::string& b = w.bytes();
            for (std::size_t s = 0; s + 2 <= b.size(); ++s) pairs.insert(b.substr(s, 2));
        }
        still = pairs.size() == before ? still + 1 : 0;
    }
    std::vector<std::string> r(pairs.begin(), pairs.end());
    std::sort(r.begin(), r.end());
    return r;
}

/// Images of the letters and of the two-letter tail factors under
/// sigma_[0,depth), so factors across image boundaries are seen.
inline std::vector<Word> images_at(const DirectiveSequence& seq, std::size_t depth)
{
    std::vector<Word> r;
    for (Letter j = 1; j <= seq.dimension(); ++j) r.push_back(image(seq, depth, j));
    for (const std::string& ab : tail_pairs(seq.shifted(depth))) {
        auto a = static_cast<std::size_t>(static_cast<unsigned char>(ab[0])) - 1;
        auto b = static_cast<std::size_t>(static_cast<unsigned char>(ab[1])) - 1;
        r.push_back(Word::from_bytes(r[a].bytes() + r[b].bytes()));
    }
    return r;
}

inline std::vector<std::vector<Word>> factor_sets(const std::vector<Word>& images, std::size_t n)
{
    std::vector<std::unordered_set<std::string>> sets(n + 1);
    for (const Word& w : images) {
        const std::string& b = w.bytes();
        for (std::size_t m = 1; m <= n && m <= b.size(); ++m)
            for (std::size_t s = 0; s + m <= b.size(); ++s) sets[m].insert(b.substr(s, m));
    }
    std::vector<std::vector<Word>> out(n + 1);
    out[0].push_back(Word{});
    for (std::size_t m = 1; m <= n; ++m) {
        for (const auto& f : sets[m]) out[m].push_back(Word::from_bytes(f));
        std::sort(out[m].begin(), out[m].end());
    }
    return out;
}

} // namespace detail

inline LanguageTable language(const DirectiveSequence& seq, std::size_t n, std::size_t depth)
{
    if (n == 0) fail(ErrorKind::InvalidArgument, "factor length must be at least 1");
    auto here = detail::images_at(seq, depth);
    auto next = detail::images_at(seq, depth + 1);
    LanguageTable t;
    t.max_length = n;
    t.depth = depth;
    t.factors = detail::factor_sets(here, n);
    t.saturated = detail::factor_sets(next, n) == t.factors;
    for (const auto& w : here) t.longest_image = std::max(t.longest_image, w.size());
    return t;
}

/// Smallest depth in [start, max_depth] whose images all have length
/// >= 2n and whose factor sets stay unchanged for `confirm` further depths.
///
/// A single unchanged step can be a coincidence when one substitution
/// repeats, so the search asks for a run of them.
inline std::optional<std::size_t> saturation_depth(const DirectiveSequence& seq, std::size_t n, std::size_t start = 1,
                                                   std::size_t max_depth = 200, std::size_t confirm = 4)
{
    std::optional<std::vector<std::vector<Word>>> prev;
    std::size_t run = 0, candidate = 0;
    for (std::size_t depth = start; depth <= max_depth + confirm; ++depth) {
        IntVector lens = seq.product(depth).column_sums();
        if (*std::min_element(lens.begin(), lens.end()) < BigInt(2 * n)) continue;
        if (*std::max_element(lens.begin(), lens.end()) > BigInt(50'000'000)) return std::nullopt;
        auto sets = detail::factor_sets(detail::images_at(seq, depth), n);
        if (prev && *prev == sets) {
            if (++run >= confirm) return candidate;
        } else {
            run = 0;
            candidate = depth;
            if (depth > max_depth) return std::nullopt;
        }
        prev = std::move(sets);
    }
    return std::nullopt;
}

/// p(1), ..., p(n_max) from the table at `depth`.
inline std::vector<std::size_t> factor_complexity(const DirectiveSequence& seq, std::size_t n_max, std::size_t depth)
{
    LanguageTable t = language(seq, n_max, depth);
    if (!t.saturated)
        fail(ErrorKind::Unsaturated, "factor sets still change between depth " + std::to_string(depth) + " and " +
                                         std::to_string(depth + 1));
    std::vector<std::size_t> p;
    for (std::size_t m = 1; m <= n_max; ++m) p.push_back(t.complexity(m));
    return p;
}

struct BalanceReport {
    /// C_i: largest difference of |w|_i over equal-length factors.
    std::vector<std::int64_t> letter_constants;
    /// C_v for factors v, in sorted order of v.
    std::vector<std::pair<Word, std::int64_t>> factor_constants;
    std::size_t n_scan = 0;
    std::size_t depth = 0;
    bool saturated = false;

    std::int64_t max_constant() const
    {
        std::int64_t c = 0;
        for (auto v : letter_constants) c = std::max(c, v);
        return c;
    }
};

namespace detail {

/// For window lengths 1..n, the min and max of the number of positions t
/// in the window with hit[t] = 1, where a hit occupies `span` letters.
struct WindowRange {
    std::vector<std::int64_t> lo, hi;
    bool complete = true;
};

inline WindowRange window_range(const std::vector<const std::vector<std::uint8_t>*>& hits,
                                const std::vector<std::size_t>& lengths, std::size_t n, std::size_t span)
{
    WindowRange r;
    r.lo.assign(n + 1, INT64_MAX);
    r.hi.assign(n + 1, INT64_MIN);
    std::vector<std::int64_t> prefix;
    for (std::size_t w = 0; w < hits.size(); ++w) {
        const auto& h = *hits[w];
        std::size_t len = lengths[w];
        prefix.assign(len + 1, 0);
        for (std::size_t t = 0; t < len; ++t) prefix[t + 1] = prefix[t] + (t < h.size() ? h[t] : 0);
        for (std::size_t m = 1; m <= n && m <= len; ++m) {
            std::int64_t lo = r.lo[m], hi = r.hi[m];
            // Occurrences fully inside [s, s+m) start in [s, s+m-span].
            for (std::size_t s = 0; s + m <= len; ++s) {
                std::int64_t c = m >= span ? prefix[s + m - span + 1] - prefix[s] : 0;
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            r.lo[m] = lo;
            r.hi[m] = hi;
        }
    }
    for (std::size_t m = 1; m <= n; ++m)
        if (r.lo[m] == INT64_MAX) r.complete = false;
    return r;
}

inline std::vector<std::uint8_t> occurrences(const Word& w, const Word& v)
{
    std::vector<std::uint8_t> h(w.size(), 0);
    const std::string& b = w.bytes();
    std::size_t pos = b.find(v.bytes());
    while (pos != std::string::npos) {
        h[pos] = 1;
        pos = b.find(v.bytes(), pos + 1);
    }
    return h;
}

struct BalanceScan {
    std::vector<WindowRange> letters;
    std::vector<WindowRange> factors;
};

inline BalanceScan balance_scan(const std::vector<Word>& images, int d, std::size_t n,
                                const std::vector<Word>& factor_list)
{
    BalanceScan out;
    std::vector<std::size_t> lengths;
    for (const auto& w : images) lengths.push_back(w.size());
    for (Letter i = 1; i <= d; ++i) {
        std::vector<std::vector<std::uint8_t>> hs;
        for (const auto& w : images) {
            std::vector<std::uint8_t> h(w.size());
            for (std::size_t t = 0; t < w.size(); ++t) h[t] = w[t] == i;
            hs.push_back(std::move(h));
        }
        std::vector<const std::vector<std::uint8_t>*> ptrs;
        for (const auto& h : hs) ptrs.push_back(&h);
        out.letters.push_back(window_range(ptrs, lengths, n, 1));
    }
    for (const auto& v : factor_list) {
        std::vector<std::vector<std::uint8_t>> hs;
        for (const auto& w : images) hs.push_back(occurrences(w, v));
        std::vector<const std::vector<std::uint8_t>*> ptrs;
        for (const auto& h : hs) ptrs.push_back(&h);
        out.factors.push_back(window_range(ptrs, lengths, n, v.size()));
    }
    return out;
}

inline std::int64_t spread(const WindowRange& r)
{
    std::int64_t c = 0;
    for (std::size_t m = 1; m < r.lo.size(); ++m)
        if (r.lo[m] != INT64_MAX) c = std::max(c, r.hi[m] - r.lo[m]);
    return c;
}

} // namespace detail

/// Balance constants over all factor pairs of equal length <= n_scan found
/// in the images at `depth`. Per-factor constants are computed for factors
/// of length 1..factors_up_to (0 disables them).
///
/// The scan is saturated when the per-length extremes are identical at
/// depth + 1; otherwise Unsaturated is thrown.
inline BalanceReport balance(const DirectiveSequence& seq, std::size_t n_scan, std::size_t depth,
                             std::size_t factors_up_to = 3)
{
    int d = seq.dimension();
    auto here = detail::images_at(seq, depth);
    auto next = detail::images_at(seq, depth + 1);
    std::vector<Word> factor_list;
    if (factors_up_to > 0) {
        auto sets = detail::factor_sets(here, factors_up_to);
        for (std::size_t m = 1; m <= factors_up_to; ++m)
            for (const auto& v : sets[m]) factor_list.push_back(v);
    }
    auto a = detail::balance_scan(here, d, n_scan, factor_list);
    auto b = detail::balance_scan(next, d, n_scan, factor_list);

    bool same = true;
    for (int i = 0; i < d; ++i) {
        if (!a.letters[i].complete) same = false;
        if (a.letters[i].lo != b.letters[i].lo || a.letters[i].hi != b.letters[i].hi) same = false;
    }
    for (std::size_t k = 0; k < factor_list.size(); ++k)
        if (a.factors[k].lo != b.factors[k].lo || a.factors[k].hi != b.factors[k].hi) same = false;
    if (!same)
        fail(ErrorKind::Unsaturated, "balance extremes still change between depth " + std::to_string(depth) + " and " +
                                         std::to_string(depth + 1));

    BalanceReport r;
    r.n_scan = n_scan;
    r.depth = depth;
    r.saturated = true;
    for (int i = 0; i < d; ++i) r.letter_constants.push_back(detail::spread(a.letters[i]));
    for (std::size_t k = 0; k < factor_list.size(); ++k)
        r.factor_constants.emplace_back(factor_list[k], detail::spread(a.factors[k]));
    return r;
}

/// Smallest depth >= start at which balance() saturates and keeps the
/// same letter constants for `confirm` further depths.
inline std::optional<std::size_t> balance_depth(const DirectiveSequence& seq, std::size_t n_scan, std::size_t start = 1,
                                                std::size_t max_depth = 200, std::size_t factors_up_to = 0,
                                                std::size_t confirm = 2)
{
    for (std::size_t depth = start; depth <= max_depth; ++depth) {
        IntVector lens = seq.product(depth + confirm).column_sums();
        if (*std::max_element(lens.begin(), lens.end()) > BigInt(20'000'000)) return std::nullopt;
        lens = seq.product(depth).column_sums();
        if (*std::max_element(lens.begin(), lens.end()) < BigInt(n_scan)) continue;
        try {
            auto first = balance(seq, n_scan, depth, factors_up_to).letter_constants;
            bool stable = true;
            for (std::size_t k = 1; k <= confirm && stable; ++k)
                stable = balance(seq, n_scan, depth + k, factors_up_to).letter_constants == first;
            if (stable) return depth;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Unsaturated) throw;
        }
    }
    return std::nullopt;
}

} // namespace sadic
