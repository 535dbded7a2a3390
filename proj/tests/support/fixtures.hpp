#pragma once

#include "sadic/simplex_point.hpp"
#include "sadic/substitution.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace fixtures {

using sadic::Substitution;
using sadic::Word;

inline Substitution gamma1() { return Substitution::parse("1->1;2->13;3->2"); }
inline Substitution gamma2() { return Substitution::parse("1->2;2->13;3->3"); }
inline Substitution tau() { return Substitution::parse("1->13;2->12;3->2"); }
inline Substitution tribonacci() { return Substitution::parse("1->12;2->13;3->1"); }

/// alpha_i : i -> i, j -> ij
inline Substitution alpha(int i, int d)
{
    std::vector<Word> im;
    for (int j = 1; j <= d; ++j) im.push_back(j == i ? Word{i} : Word{i, j});
    return Substitution(std::move(im));
}

/// d-bonacci: i -> 1(i+1), d -> 1
inline Substitution dbonacci(int d)
{
    std::vector<Word> im;
    for (int i = 1; i < d; ++i) im.push_back(Word{1, i + 1});
    im.push_back(Word{1});
    return Substitution(std::move(im));
}

/// beta_ij : j -> ij, k -> k
inline Substitution beta(int i, int j, int d)
{
    std::vector<Word> im;
    for (int k = 1; k <= d; ++k) im.push_back(k == j ? Word{i, j} : Word{k});
    return Substitution(std::move(im));
}

inline Substitution brun_loop4()
{
    return sadic::compose(sadic::compose(beta(1, 2, 4), beta(2, 3, 4)), sadic::compose(beta(3, 4, 4), beta(4, 1, 4)));
}

/// iota_{a,b} : 1 -> 2, 2 -> 3, 3 -> 1 2^a 3^b
inline Substitution iota(int a, int b)
{
    Word w{1};
    for (int k = 0; k < a; ++k) w.push_back(2);
    for (int k = 0; k < b; ++k) w.push_back(3);
    return Substitution({Word{2}, Word{3}, w});
}

inline Substitution random_substitution(std::mt19937_64& rng, int d, int max_len)
{
    std::uniform_int_distribution<int> len(1, max_len), letter(1, d);
    std::vector<Word> im;
    for (int j = 0; j < d; ++j) {
        Word w;
        int n = len(rng);
        for (int k = 0; k < n; ++k) w.push_back(letter(rng));
        im.push_back(w);
    }
    return Substitution(std::move(im));
}

inline Word random_word(std::mt19937_64& rng, int d, int max_len)
{
    std::uniform_int_distribution<int> len(0, max_len), letter(1, d);
    Word w;
    int n = len(rng);
    for (int k = 0; k < n; ++k) w.push_back(letter(rng));
    return w;
}

/// Float point whose coordinates carry `bits` random bits, so expansions do
/// not terminate the way dyadic (double) inputs do.
inline sadic::SimplexPoint random_float_point(std::mt19937_64& rng, int d, unsigned bits = 256, bool sorted = false)
{
    sadic::PrecisionGuard guard(bits);
    std::vector<sadic::BigFloat> x;
    for (int i = 0; i < d; ++i) {
        sadic::BigFloat v = 0, scale = 1;
        for (unsigned b = 0; b < bits + 64; b += 64) {
            scale = ldexp(scale, -64);
            v += sadic::BigFloat(rng()) * scale;
        }
        x.push_back(v);
    }
    if (sorted) std::sort(x.begin(), x.end());
    return sadic::SimplexPoint::floating(std::move(x), bits);
}

} // namespace fixtures
