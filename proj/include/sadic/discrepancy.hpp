#pragma once

#include "sadic/directive_sequence.hpp"
#include "sadic/error.hpp"
#include "sadic/limit_word.hpp"
#include "sadic/simplex_point.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace sadic {

struct DiscrepancyTrace {
    /// Target frequencies.
    std::vector<long double> u;
    std::size_t n_max = 0;
    std::vector<std::size_t> checkpoints;
    /// deviations[k][i] = | |w_[0,N_k)|_i - N_k u_i |.
    std::vector<std::vector<double>> deviations;
    /// Exact letter counts at each checkpoint.
    std::vector<std::vector<std::int64_t>> counts;
    /// Per letter, the largest deviation over all N <= n_max.
    std::vector<double> max_deviation;
    /// Largest deviation over all letters for N <= n_max / 2 and N > n_max / 2.
    double max_first_half = 0, max_second_half = 0;
    /// max_second_half <= max_first_half + slack.
    bool no_growth = true;
    double slack = 1;
};

/// Roughly geometric checkpoints in [1, n_max], always ending at n_max.
inline std::vector<std::size_t> geometric_checkpoints(std::size_t n_max, std::size_t count)
{
    std::vector<std::size_t> cps;
    if (n_max == 0 || count == 0) return cps;
    for (std::size_t k = 1; k <= count; ++k) {
        double t = static_cast<double>(k) / static_cast<double>(count);
        auto n = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n_max), t)));
        n = std::clamp<std::size_t>(n, 1, n_max);
        if (cps.empty() || n > cps.back()) cps.push_back(n);
    }
    if (cps.back() != n_max) cps.push_back(n_max);
    return cps;
}

/// Deviations of the letter counts of w from N u for every prefix length N.
inline DiscrepancyTrace letter_discrepancy(const Word& w, const SimplexPoint& u, std::vector<std::size_t> checkpoints,
                                           double slack = 1)
{
    int d = u.dimension();
    DiscrepancyTrace tr;
    tr.n_max = w.size();
    tr.slack = slack;
    {
        unsigned bits = 128;
        PrecisionGuard guard(bits);
        for (const auto& c : u.as_float(bits)) tr.u.push_back(static_cast<long double>(c));
    }
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    for (auto c : checkpoints)
        if (c > w.size()) fail(ErrorKind::InvalidArgument, "checkpoint beyond the word");
    tr.checkpoints = checkpoints;
    tr.max_deviation.assign(d, 0.0);

    std::vector<std::int64_t> cnt(d, 0);
    std::size_t next_cp = 0;
    std::size_t half = w.size() / 2;
    auto record = [&](std::size_t N) {
        double worst = 0;
        std::vector<double> dev(d);
        for (int i = 0; i < d; ++i) {
            dev[i] = static_cast<double>(std::fabs(static_cast<long double>(cnt[i]) - static_cast<long double>(N) * tr.u[i]));
            tr.max_deviation[i] = std::max(tr.max_deviation[i], dev[i]);
            worst = std::max(worst, dev[i]);
        }
        if (N <= half) tr.max_first_half = std::max(tr.max_first_half, worst);
        else tr.max_second_half = std::max(tr.max_second_half, worst);
        while (next_cp < checkpoints.size() && checkpoints[next_cp] == N) {
            tr.deviations.push_back(dev);
            tr.counts.push_back(cnt);
            ++next_cp;
        }
    };
    record(0);
    for (std::size_t N = 1; N <= w.size(); ++N) {
        Letter a = w[N - 1];
        if (a < 1 || a > d) fail(ErrorKind::InvalidArgument, "letter outside the alphabet of u");
        ++cnt[a - 1];
        record(N);
    }
    tr.no_growth = tr.max_second_half <= tr.max_first_half + slack;
    return tr;
}

/// Discrepancy of the limit word prefix of length n_max of a directive sequence.
inline DiscrepancyTrace letter_discrepancy(const DirectiveSequence& seq, const SimplexPoint& u, std::size_t n_max,
                                           std::size_t checkpoints = 32, double slack = 1)
{
    if (u.dimension() != seq.dimension()) fail(ErrorKind::InvalidArgument, "u and sequence dimensions differ");
    Word w = limit_word_prefix(seq, n_max);
    return letter_discrepancy(w, u, geometric_checkpoints(n_max, checkpoints), slack);
}

} // namespace sadic
