#pragma once

#include "sadic/directive_sequence.hpp"
#include "sadic/error.hpp"
#include "sadic/word.hpp"

#include <limits>
#include <vector>

namespace sadic {

/// First `limit` letters of sigma_[0,level)(top), without materializing
/// the full image.
inline Word expand_prefix(const DirectiveSequence& seq, std::size_t level, Letter top,
                          std::size_t limit = std::numeric_limits<std::size_t>::max())
{
    Word out;
    if (limit == 0) return out;
    if (level == 0) {
        out.push_back(top);
        return out;
    }
    // Touch every level first; the cache is a deque, so the references
    // taken below stay valid.
    std::vector<const Substitution*> subs(level);
    for (std::size_t k = 0; k < level; ++k) subs[k] = &seq.at(k);

    struct Frame {
        const Word* word;
        std::size_t pos;
        std::size_t child_level;
    };
    std::vector<Frame> stack;
    stack.push_back({&subs[level - 1]->image(top), 0, level - 1});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.pos == f.word->size()) {
            stack.pop_back();
            continue;
        }
        Letter b = (*f.word)[f.pos++];
        if (f.child_level == 0) {
            out.push_back(b);
            if (out.size() >= limit) break;
        } else {
            std::size_t lvl = f.child_level;
            stack.push_back({&subs[lvl - 1]->image(b), 0, lvl - 1});
        }
    }
    return out;
}

/// sigma_[0,level)(j), materialized; refuses images longer than `max_length`.
inline Word image(const DirectiveSequence& seq, std::size_t level, Letter j, std::size_t max_length = 400'000'000)
{
    BigInt len = seq.product(level).column_sums()[j - 1];
    if (len > BigInt(max_length)) fail(ErrorKind::EnumerationTooLarge, "image of length " + len.str() + " is too long");
    return expand_prefix(seq, level, j);
}

struct LimitWordOptions {
    std::size_t window = 64;
    std::size_t max_level = 4096;
};

/// Letter i_n of the seed chain, found by following first letters down
/// from level n + window, starting from letter 1.
inline Letter seed_letter(const DirectiveSequence& seq, std::size_t n, std::size_t window = 64)
{
    Letter a = 1;
    for (std::size_t k = n + window; k-- > n;) a = seq.at(k).image(a).front();
    return a;
}

/// Prefix of length N of the limit word lim sigma_[0,n)(i_n).
///
/// The chain (i_n) satisfies i_n = first letter of sigma_n(i_{n+1}), so the
/// images are nested and a longer request only extends the result.
inline Word limit_word_prefix(const DirectiveSequence& seq, std::size_t N, LimitWordOptions opt = {})
{
    if (N == 0) return {};
    for (std::size_t n = 0; n <= opt.max_level; ++n) {
        Letter a = seed_letter(seq, n, opt.window);
        if (seq.product(n).column_sums()[a - 1] >= BigInt(N)) return expand_prefix(seq, n, a, N);
    }
    fail(ErrorKind::NoNestedSeed, "nested images stay shorter than " + std::to_string(N) + " within " +
                                      std::to_string(opt.max_level) + " levels");
}

} // namespace sadic
