#pragma once

#include "sadic/error.hpp"
#include "sadic/word.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace sadic {

struct TijdemanWord {
    Word word;
    /// Largest prefix deviation max_p ||pi'_x l(p)|| in each norm.
    double sup_norm = 0;
    double l1_norm = 0;
    double l2_norm = 0;
    /// The sup-norm bound 1 - 1/(2d - 2); 0 for d = 1.
    double bound = 0;
    bool greedy = true;
};

namespace detail {

/// Integer-scaled deviations |x| l(p)_i - |p| x_i; pi'_x l(p) = dev / |x|.
struct Deviation {
    std::vector<std::int64_t> x;
    std::int64_t total = 0;
    std::vector<std::int64_t> dev;

    std::int64_t sup_after(std::size_t k) const
    {
        std::int64_t m = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::int64_t v = dev[i] - x[i] + (i == k ? total : 0);
            m = std::max(m, v < 0 ? -v : v);
        }
        return m;
    }

    void push(std::size_t k)
    {
        for (std::size_t i = 0; i < x.size(); ++i) dev[i] += (i == k ? total : 0) - x[i];
    }

    void pop(std::size_t k)
    {
        for (std::size_t i = 0; i < x.size(); ++i) dev[i] -= (i == k ? total : 0) - x[i];
    }
};

} // namespace detail

/// A word with abelianization x whose prefixes stay within
/// 1 - 1/(2d - 2) of the line R x in the sup-norm of pi'_x, starting with a
/// letter of maximal count.
///
/// Greedy: each step takes the letter minimizing the new sup-norm, ties to
/// the largest remaining count, then the smallest letter. If the greedy
/// word breaks the bound, a depth-first search with the same ordering is
/// run under a node budget.
inline TijdemanWord tijdeman_word(const AbelianVector& x, std::size_t node_budget = 2'000'000)
{
    std::size_t d = x.size();
    if (d == 0) fail(ErrorKind::InvalidArgument, "empty vector");
    std::int64_t total = 0;
    for (auto v : x) {
        if (v < 0) fail(ErrorKind::InvalidArgument, "negative coordinate");
        total += v;
    }
    if (total == 0) fail(ErrorKind::InvalidArgument, "zero vector");
    if (d > 255) fail(ErrorKind::InvalidArgument, "too many letters");

    TijdemanWord out;
    // Sup-norm bound scaled by |x|: dev <= total (2d - 3) / (2d - 2).
    // For d = 1 every prefix lies on the line; d = 2 gives 1/2.
    std::int64_t num = d >= 2 ? static_cast<std::int64_t>(2 * d - 3) : 0;
    std::int64_t den = d >= 2 ? static_cast<std::int64_t>(2 * d - 2) : 1;
    out.bound = d >= 2 ? 1.0 - 1.0 / static_cast<double>(2 * d - 2) : 0.0;
    auto within = [&](std::int64_t sup) { return sup * den <= total * num; };

    std::int64_t xmax = *std::max_element(x.begin(), x.end());
    detail::Deviation dv{x, total, std::vector<std::int64_t>(d, 0)};
    std::vector<std::int64_t> left = x;

    auto order = [&](std::size_t pos) {
        std::vector<std::size_t> cand;
        for (std::size_t k = 0; k < d; ++k)
            if (left[k] > 0 && (pos > 0 || x[k] == xmax)) cand.push_back(k);
        std::vector<std::int64_t> sup(d);
        for (auto k : cand) sup[k] = dv.sup_after(k);
        std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
            if (sup[a] != sup[b]) return sup[a] < sup[b];
            if (left[a] != left[b]) return left[a] > left[b];
            return a < b;
        });
        return std::make_pair(cand, sup);
    };

    std::vector<std::size_t> path;
    bool ok = true;
    for (std::int64_t pos = 0; pos < total; ++pos) {
        auto [cand, sup] = order(static_cast<std::size_t>(pos));
        std::size_t k = cand.front();
        if (!within(sup[k])) ok = false;
        path.push_back(k);
        dv.push(k);
        --left[k];
    }

    if (!ok) {
        out.greedy = false;
        // Reset and search.
        dv.dev.assign(d, 0);
        left = x;
        path.clear();
        std::size_t nodes = 0;
        struct Frame {
            std::vector<std::size_t> cand;
            std::size_t next = 0;
        };
        std::vector<Frame> stack;
        auto expand = [&]() {
            auto [cand, sup] = order(path.size());
            Frame f;
            for (auto k : cand)
                if (within(sup[k])) f.cand.push_back(k);
            stack.push_back(std::move(f));
        };
        expand();
        bool found = false;
        while (!stack.empty()) {
            if (static_cast<std::int64_t>(path.size()) == total) {
                found = true;
                break;
            }
            Frame& f = stack.back();
            if (f.next == f.cand.size()) {
                stack.pop_back();
                if (!path.empty()) {
                    std::size_t k = path.back();
                    path.pop_back();
                    dv.pop(k);
                    ++left[k];
                }
                continue;
            }
            if (++nodes > node_budget) break;
            std::size_t k = f.cand[f.next++];
            path.push_back(k);
            dv.push(k);
            --left[k];
            if (static_cast<std::int64_t>(path.size()) < total) expand();
        }
        if (!found)
            fail(ErrorKind::SearchExhausted, "no word meets the sup-norm bound " + std::to_string(out.bound) +
                                                 " (greedy and bounded backtracking)");
    }

    // Norms of the prefix deviations, recomputed from the word.
    std::vector<std::int64_t> l(d, 0);
    for (std::size_t pos = 0; pos <= path.size(); ++pos) {
        double s = 0, a1 = 0, a2 = 0;
        for (std::size_t i = 0; i < d; ++i) {
            double v = static_cast<double>(l[i] * total - static_cast<std::int64_t>(pos) * x[i]) / static_cast<double>(total);
            s = std::max(s, std::abs(v));
            a1 += std::abs(v);
            a2 += v * v;
        }
        out.sup_norm = std::max(out.sup_norm, s);
        out.l1_norm = std::max(out.l1_norm, a1);
        out.l2_norm = std::max(out.l2_norm, std::sqrt(a2));
        if (pos < path.size()) {
            out.word.push_back(static_cast<Letter>(path[pos] + 1));
            ++l[path[pos]];
        }
    }
    return out;
}

} // namespace sadic
