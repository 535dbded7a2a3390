#include "fixtures.hpp"
#include "oracles.hpp"
#include "sadic/balanced_pair.hpp"
#include "sadic/cloud.hpp"
#include "sadic/density.hpp"
#include "sadic/discrepancy.hpp"
#include "sadic/export.hpp"
#include "sadic/gcc.hpp"
#include "sadic/language.hpp"
#include "sadic/lyapunov.hpp"
#include "sadic/mcf.hpp"
#include "sadic/polynomial.hpp"
#include "sadic/projection.hpp"
#include "sadic/raster.hpp"
#include "sadic/rng.hpp"
#include "sadic/tijdeman.hpp"
#include "sadic/torus.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

using namespace sadic;
using namespace fixtures;

namespace {

// Tolerances and time limits (seconds).
constexpr double kPeriodicTol = 1e-6;
constexpr double kDensityCellTol = 0.10;
constexpr double kDensityMassTol = 1e-6;
constexpr double kDiscrepancySlack = 1.0;
constexpr double kFractionTol = 0.02;
constexpr double kOverlapMax = 0.05;
constexpr double kCoverageMin = 0.95;
constexpr double kTijdemanEps = 1e-12;
constexpr std::size_t kBpaPairCap = 10'000;
constexpr std::size_t kLyapunovSteps = 100'000;
constexpr std::size_t kLyapunovTrials = 32;
constexpr std::size_t kDensitySteps = 10'000'000;
constexpr std::size_t kDiscrepancyN = 1'000'000;
constexpr std::size_t kGccBudget = 10'000'000;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, double limit, const std::function<Outcome()>& body)
{
    auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double s = seconds_since(t0);
    bool in_time = s <= limit;
    bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2d %s  %s [%.2fs / %.0fs%s] %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), s, limit,
                in_time ? "" : " TIME EXCEEDED", o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<Rational> Q(std::initializer_list<std::pair<long, long>> v)
{
    std::vector<Rational> r;
    for (auto [p, q] : v) r.emplace_back(p, q);
    return r;
}

oracle::Mat to_mat(const IntMatrix& m)
{
    oracle::Mat r(m.size(), std::vector<long long>(m.size()));
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) r[i][j] = m(i, j).convert_to<long long>();
    return r;
}

BalancedPair bp(const char* a, const char* b) { return BalancedPair(Word::parse(a), Word::parse(b)); }

/// Periodic AR cell block of random length 4..9 using every letter.
DirectiveSequence ar4_random(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> letter(1, 4), len(4, 9);
    for (;;) {
        std::vector<CellLabel> block;
        std::set<int> seen;
        int n = len(rng);
        for (int k = 0; k < n; ++k) {
            int a = letter(rng);
            block.push_back({a, 0});
            seen.insert(a);
        }
        if (seen.size() == 4) return DirectiveSequence::from_cells(Algorithm::arnoux_rauzy(4), {}, block);
    }
}

double tau_root()
{
    double lo = 1, hi = 2;
    for (int k = 0; k < 200; ++k) {
        double m = (lo + hi) / 2;
        (m * m * m - 2 * m * m + m - 1 < 0 ? lo : hi) = m;
    }
    return lo;
}

Outcome incidence_fidelity()
{
    bool c1 = gamma1().incidence() == IntMatrix{{1, 1, 0}, {0, 0, 1}, {0, 1, 0}};
    bool c2 = gamma2().incidence() == IntMatrix{{0, 1, 0}, {1, 0, 0}, {0, 1, 1}};
    IntPoly p = char_poly(tau().incidence());
    bool cp = p == IntPoly::from_high({1, -2, 1, -1});
    // det(tI - M) by cofactor expansion at several t.
    auto m = to_mat(tau().incidence());
    bool pointwise = true;
    for (long long t = -5; t <= 5; ++t) {
        oracle::Mat a = m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a[i][j] = (i == j ? t : 0) - m[i][j];
        pointwise &= oracle::det(a) == t * t * t - 2 * t * t + t - 1;
    }
    bool ok = c1 && c2 && cp && pointwise;
    return {ok, "C1 " + std::string(c1 ? "ok" : "differs") + ", C2 " + (c2 ? "ok" : "differs") + ", char poly " +
                    p.to_string() + (pointwise ? "" : " (oracle mismatch)")};
}

Outcome bpa_reproduction()
{
    auto r = bpa_run(tau(), {kBpaPairCap});
    std::set<BalancedPair> I1{bp("1", "1"), bp("2", "2"), bp("12", "21"), bp("312", "213"), bp("132", "213")};
    bool level1 = r.levels.size() > 1 && r.levels[1] == I1;
    bool later = r.all_pairs().count(bp("321", "213")) == 1;
    bool term = r.verdict == BpaVerdict::Terminates;
    return {level1 && later && term, "I_1 " + std::string(level1 ? "matches" : "differs") + ", (213,321) " +
                                         (later ? "found" : "missing") + ", verdict " + to_string(r.verdict)};
}

Outcome bpa_corpus()
{
    std::vector<std::pair<std::string, Substitution>> corpus{{"tau", tau()},
                                                             {"iota_01", iota(0, 1)},
                                                             {"tribonacci", tribonacci()},
                                                             {"4-bonacci", dbonacci(4)},
                                                             {"brun_loop4", brun_loop4()}};
    bool ok = true;
    std::string detail;
    for (const auto& [name, s] : corpus) {
        auto r = bpa_run(s, {kBpaPairCap});
        ok &= r.verdict == BpaVerdict::Terminates;
        detail += name + "=" + to_string(r.verdict) + "(" + std::to_string(r.all_pairs().size()) + " pairs) ";
    }
    return {ok, detail};
}

Outcome dbonacci_identity()
{
    bool ok = true;
    std::string detail;
    for (int d = 3; d <= 5; ++d) {
        Substitution c = alpha(d, d);
        for (int i = d - 1; i >= 1; --i) c = compose(alpha(i, d), c);
        bool eq = c == power(dbonacci(d), static_cast<unsigned>(d));
        ok &= eq;
        detail += "d=" + std::to_string(d) + (eq ? " ok " : " differs ");
    }
    return {ok, detail};
}

Outcome step_oracle()
{
    struct Case {
        Algorithm algo;
        const char* x;
        CellLabel cell;
        std::vector<Rational> y;
    };
    std::vector<Case> cases{
        {Algorithm::cassaigne_selmer(), "2/5,1/4,7/20", {1, 0}, Q({{1, 13}, {7, 13}, {5, 13}})},
        {Algorithm::jacobi_perron(), "1/5,3/10,1/2", {1, 2}, Q({{1, 4}, {1, 4}, {1, 2}})},
        {Algorithm::brun(3), "1/2,3/10,1/5", {1, 2}, Q({{2, 7}, {3, 7}, {2, 7}})},
        {Algorithm::arnoux_rauzy(3), "3/5,1/5,1/5", {1, 0}, Q({{1, 3}, {1, 3}, {1, 3}})},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        auto [cell, y] = step(c.algo, SimplexPoint::parse(c.x));
        bool eq = cell == c.cell && y.is_rational() && y.rational_coords() == c.y;
        ok &= eq;
        detail += c.algo.name() + (eq ? " ok " : " differs ");
    }
    return {ok, detail};
}

Outcome complexity()
{
    bool ok = true;
    std::size_t cs_ok = 0, ar_ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto s = DirectiveSequence::continued_fraction(Algorithm::cassaigne_selmer(), random_simplex_point(seed, 3));
        auto depth = saturation_depth(s, 12);
        bool good = depth.has_value();
        if (good) {
            auto p = factor_complexity(s, 12, *depth);
            for (std::size_t n = 1; n <= 12; ++n) good &= p[n - 1] == 2 * n + 1;
        }
        cs_ok += good;
        ok &= good;
    }
    std::mt19937_64 rng(8);
    for (int k = 0; k < 5; ++k) {
        auto s = ar4_random(rng);
        auto depth = saturation_depth(s, 8);
        bool good = depth.has_value();
        if (good) {
            auto p = factor_complexity(s, 8, *depth);
            for (std::size_t n = 1; n <= 8; ++n) good &= p[n - 1] == 3 * n + 1;
        }
        ar_ok += good;
        ok &= good;
    }
    return {ok, "CS 2n+1 on " + std::to_string(cs_ok) + "/20, AR d=4 3n+1 on " + std::to_string(ar_ok) + "/5"};
}

Outcome periodic_lyapunov()
{
    double l = std::log(tau_root());
    auto r = lyapunov_periodic(Algorithm::cassaigne_selmer(), {{1, 0}, {2, 0}});
    double e1 = std::abs(r.theta1 - l / 2), e2 = std::abs(r.theta2 + l / 4);
    return {e1 <= kPeriodicTol && e2 <= kPeriodicTol,
            "theta1 " + fmt("%.12f", r.theta1) + " (err " + fmt("%.1e", e1) + "), theta2 " + fmt("%.12f", r.theta2) +
                " (err " + fmt("%.1e", e2) + ")"};
}

struct LyapunovRun {
    std::string name;
    LyapunovEstimate e;
    double seconds = 0;
};

std::vector<LyapunovRun> lyapunov_runs()
{
    std::vector<std::pair<std::string, Algorithm>> algos{{"CS", Algorithm::cassaigne_selmer()},
                                                         {"Brun3", Algorithm::brun(3)},
                                                         {"Brun4", Algorithm::brun(4)},
                                                         {"JP", Algorithm::jacobi_perron()}};
    std::vector<LyapunovRun> runs;
    for (const auto& [name, algo] : algos) {
        LyapunovOptions o;
        o.steps = kLyapunovSteps;
        o.trials = kLyapunovTrials;
        o.seed = 7;
        o.threads = std::max(1u, std::thread::hardware_concurrency());
        auto t0 = Clock::now();
        auto e = lyapunov(algo, o);
        runs.push_back({name, e, seconds_since(t0)});
    }
    return runs;
}

Outcome pisot_condition(const std::vector<LyapunovRun>& runs)
{
    bool ok = true;
    std::string detail;
    for (const auto& r : runs) {
        bool good = r.e.theta1 > 0 && r.e.theta2 < 0 && r.e.theta1_ci.excludes_zero() && r.e.theta2_ci.excludes_zero() &&
                    r.e.theta1_ci.lo > 0 && r.e.theta2_ci.hi < 0 && r.seconds <= 300;
        ok &= good;
        detail += r.name + " theta1 " + fmt("%.4f", r.e.theta1) + " [" + fmt("%.4f", r.e.theta1_ci.lo) + "," +
                  fmt("%.4f", r.e.theta1_ci.hi) + "] theta2 " + fmt("%.4f", r.e.theta2) + " [" +
                  fmt("%.4f", r.e.theta2_ci.lo) + "," + fmt("%.4f", r.e.theta2_ci.hi) + "] " + fmt("%.1fs", r.seconds) +
                  "; ";
    }
    return {ok, detail};
}

Outcome sum_rule(const std::vector<LyapunovRun>& runs)
{
    bool ok = true;
    std::string detail;
    for (const auto& r : runs) {
        bool good = r.e.sum_ci.contains(0);
        ok &= good;
        detail += r.name + " sum CI [" + fmt("%.2e", r.e.sum_ci.lo) + "," + fmt("%.2e", r.e.sum_ci.hi) + "]; ";
    }
    return {ok, detail};
}

Outcome density()
{
    auto h = density_histogram(kDensitySteps, 8, 1);
    bool cells = h.max_relative_error < kDensityCellTol;
    bool mass = std::abs(h.total_mass - 1.0) <= kDensityMassTol;
    return {cells && mass, "max cell error " + fmt("%.4f", h.max_relative_error) + (cells ? " ok" : " too large") +
                               ", analytic total mass " + fmt("%.9f", h.total_mass) +
                               (mass ? " ok" : " != 1 (printed density integrates to 2 over the simplex)")};
}

Outcome discrepancy()
{
    std::filesystem::path dir = "acceptance_traces";
    std::filesystem::create_directories(dir);
    bool ok = true;
    double worst = 0;
    std::size_t good = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto x = random_simplex_point(seed, 3);
        auto seq = DirectiveSequence::continued_fraction(Algorithm::cassaigne_selmer(), x);
        auto tr = letter_discrepancy(seq, x, kDiscrepancyN, 32, kDiscrepancySlack);
        std::ostringstream o;
        o << "N,count1,count2,count3,dev1,dev2,dev3\n";
        for (std::size_t k = 0; k < tr.checkpoints.size(); ++k) {
            o << tr.checkpoints[k];
            for (auto v : tr.counts[k]) o << ',' << v;
            for (auto v : tr.deviations[k]) o << ',' << detail::fixed(v, 9);
            o << '\n';
        }
        o << "# max_first_half " << detail::fixed(tr.max_first_half, 9) << " max_second_half "
          << detail::fixed(tr.max_second_half, 9) << '\n';
        write_text((dir / ("discrepancy_seed" + std::to_string(seed) + ".csv")).string(), o.str());
        good += tr.no_growth;
        ok &= tr.no_growth;
        worst = std::max(worst, tr.max_second_half - tr.max_first_half);
    }
    return {ok, std::to_string(good) + "/10 without growth, largest second-minus-first half " + fmt("%.4f", worst) +
                    ", traces in " + std::filesystem::absolute(dir).string()};
}

Outcome rauzy_invariants()
{
    bool ok = true;
    std::string detail;
    std::vector<std::pair<std::string, DirectiveSequence>> seqs{
        {"tau", DirectiveSequence::periodic({tau()})},
        {"tribonacci", DirectiveSequence::periodic({tribonacci()})},
        {"cs-random", DirectiveSequence::continued_fraction(Algorithm::cassaigne_selmer(), random_simplex_point(5, 3))}};
    for (const auto& [name, s] : seqs) {
        auto bd = balance_depth(s, 200);
        if (!bd) return {false, name + ": balance constant did not saturate"};
        double C = static_cast<double>(balance(s, 200, *bd, 0).max_constant());
        SimplexPoint u = right_eigenvector(s, default_mode(s)).u;
        FractalCloud c = cloud(s, ProjectionFrame(u), depth_for_points(s, 100'000), 1);
        double sup = 0;
        std::vector<std::size_t> count(3, 0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            sup = std::max(sup, c.ambient_sup(k));
            ++count[c.letter(k) - 1];
        }
        auto ud = u.as_double();
        double frac_err = 0;
        for (int i = 0; i < 3; ++i)
            frac_err = std::max(frac_err, std::abs(static_cast<double>(count[i]) / static_cast<double>(c.size()) - ud[i]) / ud[i]);
        bool ball = sup <= C;
        bool fr = frac_err <= kFractionTol;
        ok &= ball && fr && c.size() >= 100'000;
        detail += name + ": " + std::to_string(c.size()) + " pts, sup " + fmt("%.3f", sup) + " <= C " + fmt("%.0f", C) +
                  (ball ? "" : " VIOLATED") + ", fraction rel err " + fmt("%.2e", frac_err) + "; ";
    }
    for (const auto& [name, s] : {std::pair<std::string, DirectiveSequence>{"tau", DirectiveSequence::periodic({tau()})},
                                  {"tribonacci", DirectiveSequence::periodic({tribonacci()})}}) {
        ProjectionFrame f(right_eigenvector(s, EigenvectorMode::Periodic).u);
        FractalCloud c = cloud(s, f, raster_depth(s, 512), 1);
        auto r = raster_tiling_check(c, 2, 512);
        bool good = r.overlap < kOverlapMax && r.coverage > kCoverageMin;
        ok &= good;
        detail += name + " raster overlap " + fmt("%.4f", r.overlap) + " coverage " + fmt("%.4f", r.coverage) + "; ";
    }
    return {ok, detail};
}

Outcome coding()
{
    auto seq = DirectiveSequence::periodic({gamma1(), gamma2()});
    auto u = right_eigenvector(seq, EigenvectorMode::Periodic).u;
    auto r = coding_consistency(seq, u, 1'000, 1e-3, -1);
    auto neg = coding_consistency(seq, u, 1'000, 1e-3, +1);
    bool ok = r.match_fraction == 1.0 && neg.match_fraction < 0.5;
    return {ok, "match " + fmt("%.4f", r.match_fraction) + ", sign-flip control " + fmt("%.4f", neg.match_fraction) +
                    ", cloud depth " + std::to_string(r.depth)};
}

Outcome gcc()
{
    auto seq = DirectiveSequence::periodic({tau()});
    auto u = right_eigenvector(seq, EigenvectorMode::Periodic).u;
    GccSearchOptions o;
    o.gcc.budget = kGccBudget;
    auto res = gcc_search(seq, u, o);
    if (!res.witness) return {false, "no witness up to n = " + std::to_string(res.last_n)};
    const auto& w = *res.witness;
    GccOptions go;
    go.budget = kGccBudget;
    auto again = effective_gcc(seq, u, w.n, w.C, w.z, w.i, go);
    bool ok = w.verdict && again.verdict && w.lattice_points <= kGccBudget;
    return {ok, "witness n=" + std::to_string(w.n) + " C=" + fmt("%.0f", w.C) + " i=" + std::to_string(w.i) +
                    ", lattice points " + std::to_string(w.lattice_points) + ", " +
                    std::to_string(res.tuples_tested) + " tuples tested, re-check " + (again.verdict ? "passes" : "fails")};
}

Outcome tijdeman()
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> U(0, 20);
    bool ok = true;
    double worst = 0;
    int done = 0;
    while (done < 100) {
        AbelianVector x{U(rng), U(rng), U(rng)};
        if (x[0] + x[1] + x[2] == 0) continue;
        ++done;
        auto t = tijdeman_word(x);
        const double bound = 1.0 - 1.0 / (2.0 * 3 - 2);
        double total = static_cast<double>(x[0] + x[1] + x[2]);
        // Prefix deviations recomputed from scratch.
        std::vector<std::int64_t> cnt(3, 0);
        double dev = 0;
        for (std::size_t k = 0; k < t.word.size(); ++k) {
            ++cnt[t.word[k] - 1];
            for (int i = 0; i < 3; ++i)
                dev = std::max(dev, std::abs(static_cast<double>(cnt[i]) - static_cast<double>(k + 1) * x[i] / total));
        }
        bool counts = cnt == x;
        int first = t.word.empty() ? 0 : t.word[0];
        bool first_max = first >= 1 && x[first - 1] == *std::max_element(x.begin(), x.end());
        ok &= counts && first_max && dev <= bound + kTijdemanEps;
        worst = std::max(worst, dev);
    }
    return {ok, "100 vectors, largest sup-norm prefix deviation " + fmt("%.4f", worst) + " <= 0.75"};
}

} // namespace

int main()
{
    std::printf("acceptance: one line per criterion\n");
    report(1, "incidence fidelity", 1, incidence_fidelity);
    report(2, "balanced pair reproduction", 1, bpa_reproduction);
    report(3, "discrete spectrum corpus", 10, bpa_corpus);
    report(4, "d-bonacci identity", 1, dbonacci_identity);
    report(5, "step oracle", 1, step_oracle);
    report(6, "factor complexity", 60, complexity);
    report(7, "periodic Lyapunov oracle", 1, periodic_lyapunov);

    std::vector<LyapunovRun> runs;
    auto t0 = Clock::now();
    try {
        runs = lyapunov_runs();
    } catch (const std::exception& e) {
        std::printf("lyapunov runs failed: %s\n", e.what());
    }
    double ly_seconds = seconds_since(t0);
    report(8, "Pisot condition (Monte Carlo)", 4 * 300, [&] {
        if (runs.size() != 4) return Outcome{false, "runs missing"};
        auto o = pisot_condition(runs);
        o.detail += fmt("total %.1fs", ly_seconds);
        return o;
    });
    report(9, "unimodular sum rule", 4 * 300, [&] {
        if (runs.size() != 4) return Outcome{false, "runs missing"};
        return sum_rule(runs);
    });
    report(10, "CS invariant density", 300, density);
    report(11, "bounded remainder diagnostic", 300, discrepancy);
    report(12, "Rauzy cloud invariants", 120, rauzy_invariants);
    report(13, "coding consistency", 60, coding);
    report(14, "effective coincidence witness", 300, gcc);
    report(15, "Tijdeman words", 10, tijdeman);

    std::printf("acceptance: %d of 15 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
