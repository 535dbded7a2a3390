#include "catch2/catch_amalgamated.hpp"

#include "fixtures.hpp"
#include "sadic/density.hpp"
#include "sadic/discrepancy.hpp"
#include "sadic/lyapunov.hpp"
#include "sadic/projection.hpp"
#include "sadic/rng.hpp"
#include "sadic/torus.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sadic;
using namespace fixtures;

namespace {

bool is_kind(const Error& e, ErrorKind k) { return e.kind() == k; }

/// Largest real root of X^3 - 2X^2 + X - 1 by bisection.
double tau_root()
{
    double lo = 1, hi = 2;
    for (int k = 0; k < 200; ++k) {
        double m = (lo + hi) / 2;
        (m * m * m - 2 * m * m + m - 1 < 0 ? lo : hi) = m;
    }
    return lo;
}

bool overlap(const Interval& a, const Interval& b) { return a.lo <= b.hi && b.lo <= a.hi; }

LyapunovOptions quick(std::size_t steps = 20'000, std::size_t trials = 8)
{
    LyapunovOptions o;
    o.steps = steps;
    o.trials = trials;
    o.burn_in = 200;
    o.bootstrap = 500;
    return o;
}

} // namespace

TEST_CASE("periodic exponents match the eigenvalues of the loop product", "[lyapunov]")
{
    // Two Cassaigne-Selmer steps compose to the tau incidence matrix.
    double lambda = tau_root();
    auto r = lyapunov_periodic(Algorithm::cassaigne_selmer(), {{1, 0}, {2, 0}});
    CHECK(r.theta1 == Catch::Approx(std::log(lambda) / 2).margin(1e-6));
    CHECK(r.theta2 == Catch::Approx(-std::log(lambda) / 4).margin(1e-6));
    CHECK(std::abs(r.sum) < 1e-6);
    CHECK(r.theta1_birkhoff == Catch::Approx(r.theta1).margin(1e-6));
    CHECK(r.exponents.size() == 3);
    CHECK(r.exponents[0] >= r.exponents[1]);
    CHECK(r.exponents[1] >= r.exponents[2] - 1e-6);
}

TEST_CASE("periodic exponents reject an empty loop", "[lyapunov]")
{
    CHECK_THROWS_MATCHES(lyapunov_periodic(Algorithm::cassaigne_selmer(), {}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return is_kind(e, ErrorKind::InvalidArgument); }));
}

TEST_CASE("Arnoux-Rauzy has no absolutely continuous measure to sample", "[lyapunov]")
{
    CHECK_THROWS_MATCHES(lyapunov(Algorithm::arnoux_rauzy(3), quick()), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return is_kind(e, ErrorKind::UnsupportedMeasure); }));
}

TEST_CASE("Monte Carlo exponents have the expected signs", "[lyapunov]")
{
    auto algo = GENERATE(Algorithm::cassaigne_selmer(), Algorithm::brun(3), Algorithm::brun(4), Algorithm::jacobi_perron());
    CAPTURE(algo.dimension());
    auto e = lyapunov(algo, quick());
    CHECK(e.theta1 > 0);
    CHECK(e.theta2 < 0);
    CHECK(e.theta1_ci.lo > 0);
    CHECK(e.theta2_ci.hi < 0);
    CHECK(e.sum_ci.contains(0));
    CHECK(e.exponents.size() == static_cast<std::size_t>(algo.dimension()));
    for (std::size_t k = 1; k < e.exponents.size(); ++k) CHECK(e.exponents[k - 1] >= e.exponents[k]);
    // The Birkhoff average and the QR estimate are independent routes to theta_1.
    CHECK(overlap(e.theta1_ci, e.theta1_birkhoff_ci));
    CHECK(e.per_trajectory.size() == 8);
    CHECK(e.roundoff > 0);
}

TEST_CASE("Cassaigne-Selmer exponents agree with the periodic scale", "[lyapunov]")
{
    auto e = lyapunov(Algorithm::cassaigne_selmer(), quick(50'000, 8));
    CHECK(e.theta1 == Catch::Approx(0.1825).margin(0.01));
    CHECK(e.theta2 == Catch::Approx(-0.0706).margin(0.01));
}

TEST_CASE("Monte Carlo estimates do not depend on the thread count", "[lyapunov]")
{
    auto o = quick(5'000, 6);
    auto a = lyapunov(Algorithm::brun(3), o);
    o.threads = 3;
    auto b = lyapunov(Algorithm::brun(3), o);
    CHECK(a.per_trajectory == b.per_trajectory);
    CHECK(a.per_trajectory_birkhoff == b.per_trajectory_birkhoff);
    CHECK(a.theta1 == b.theta1);
    CHECK(a.theta1_ci.lo == b.theta1_ci.lo);
    CHECK(a.sum_ci.hi == b.sum_ci.hi);
}

TEST_CASE("each trajectory keeps its exponent sum at zero", "[lyapunov]")
{
    // Jacobi-Perron separates its directions fastest; a frame carried for
    // many steps between renormalizations loses the contracting one.
    auto o = quick(100'000, 4);
    auto est = lyapunov(Algorithm::jacobi_perron(), o);
    for (const auto& e : est.per_trajectory) {
        double s = 0;
        for (double v : e) s += v;
        CHECK(std::abs(s) < 1e-11);
    }
    CHECK(est.sum_ci.contains(0));
}

TEST_CASE("seeds change the trajectories", "[lyapunov]")
{
    auto o = quick(2'000, 4);
    auto a = lyapunov(Algorithm::cassaigne_selmer(), o);
    o.seed = 2;
    auto b = lyapunov(Algorithm::cassaigne_selmer(), o);
    CHECK(a.per_trajectory != b.per_trajectory);
}

TEST_CASE("geometric checkpoints are increasing and end at n_max", "[discrepancy]")
{
    for (std::size_t n : {1u, 2u, 7u, 100u, 1'000'000u}) {
        auto cps = geometric_checkpoints(n, 32);
        REQUIRE(!cps.empty());
        CHECK(cps.back() == n);
        CHECK(cps.front() >= 1);
        for (std::size_t k = 1; k < cps.size(); ++k) CHECK(cps[k - 1] < cps[k]);
    }
    CHECK(geometric_checkpoints(0, 5).empty());
}

TEST_CASE("discrepancy of a periodic word and a constant word", "[discrepancy]")
{
    Word w;
    for (int k = 0; k < 300; ++k) w.append(Word{1, 2, 3});
    auto u = SimplexPoint::rational({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
    auto tr = letter_discrepancy(w, u, {3, 4, 900});
    for (double m : tr.max_deviation) CHECK(m <= 2.0 / 3 + 1e-12);
    CHECK(tr.max_deviation[0] == Catch::Approx(2.0 / 3));
    CHECK(tr.deviations[0] == std::vector<double>{0, 0, 0});
    CHECK(tr.counts[1] == std::vector<std::int64_t>{2, 1, 1});
    CHECK(tr.no_growth);

    Word ones{1, 1, 1, 1};
    auto e1 = SimplexPoint::rational({Rational(1), Rational(0), Rational(0)});
    auto t1 = letter_discrepancy(ones, e1, {1, 2, 3, 4});
    for (double m : t1.max_deviation) CHECK(m == 0);
}

TEST_CASE("discrepancy counts agree with a recount at random checkpoints", "[discrepancy]")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Word w = random_word(rng, 3, 500);
        auto u = SimplexPoint::rational({Rational(1, 2), Rational(1, 3), Rational(1, 6)});
        std::size_t cp = std::uniform_int_distribution<std::size_t>(1, w.size())(rng);
        auto tr = letter_discrepancy(w, u, {cp});
        std::vector<std::int64_t> cnt(3, 0);
        for (std::size_t k = 0; k < cp; ++k) ++cnt[w[k] - 1];
        CHECK(tr.counts[0] == cnt);
        const double fr[3] = {1.0 / 2, 1.0 / 3, 1.0 / 6};
        for (int i = 0; i < 3; ++i) CHECK(tr.deviations[0][i] == Catch::Approx(std::abs(cnt[i] - cp * fr[i])).margin(1e-9));
    }
}

TEST_CASE("discrepancy rejects bad inputs", "[discrepancy]")
{
    auto u = SimplexPoint::rational({Rational(1, 2), Rational(1, 2)});
    CHECK_THROWS_AS(letter_discrepancy(Word{1, 3}, u, {1}), Error);
    CHECK_THROWS_AS(letter_discrepancy(Word{1, 2}, u, {5}), Error);
}

TEST_CASE("discrepancy stays bounded along Cassaigne-Selmer expansions", "[discrepancy]")
{
    auto cs = Algorithm::cassaigne_selmer();
    for (std::uint64_t seed : {1u, 2u}) {
        auto x = random_simplex_point(seed, 3);
        auto seq = DirectiveSequence::continued_fraction(cs, x);
        auto tr = letter_discrepancy(seq, x, 200'000);
        CHECK(tr.no_growth);
        CHECK(tr.max_second_half < 5);
    }
}

TEST_CASE("density quadrature matches closed forms", "[density]")
{
    const double pi = std::numbers::pi;
    // Whole simplex: 12/pi^2 * integral of -log(x)/(1-x) over [0,1] = 2.
    CHECK(cs_density_mass(0, 1, 0, 1) == Catch::Approx(2.0).epsilon(1e-12));
    // 2D composite Simpson on cells inside the simplex.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 0.45);
    for (int trial = 0; trial < 10; ++trial) {
        double a1 = U(rng), a3 = U(rng);
        double b1 = a1 + 0.05, b3 = a3 + 0.05;
        int n = 200;
        double h1 = (b1 - a1) / n, h3 = (b3 - a3) / n, s = 0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                double wi = i == 0 || i == n ? 1 : (i % 2 ? 4 : 2);
                double wj = j == 0 || j == n ? 1 : (j % 2 ? 4 : 2);
                s += wi * wj * cs_density(a1 + i * h1, a3 + j * h3);
            }
        CHECK(cs_density_mass(a1, b1, a3, b3) == Catch::Approx(s * h1 * h3 / 9).epsilon(1e-10));
    }
    // A cell cut by x1 + x3 = 1: inner integral in closed form, outer by Simpson.
    {
        double a1 = 0.4, b1 = 0.7, a3 = 0.4, b3 = 0.5;
        auto f = [&](double x1) {
            double hi = std::min(b3, 1 - x1);
            return hi <= a3 ? 0.0 : 12 / (pi * pi) * std::log((1 - a3) / (1 - hi)) / (1 - x1);
        };
        // Piecewise smooth with breaks at 0.5 and 0.6.
        auto simpson = [&](double a, double b) {
            int n = 2000;
            double h = (b - a) / n, s = f(a) + f(b);
            for (int k = 1; k < n; ++k) s += (k % 2 ? 4 : 2) * f(a + k * h);
            return s * h / 3;
        };
        CHECK(cs_density_mass(a1, b1, a3, b3) == Catch::Approx(simpson(0.4, 0.5) + simpson(0.5, 0.6)).epsilon(1e-10));
    }
    CHECK(cs_density_mass(0.6, 0.7, 0.6, 0.7) == 0);
}

TEST_CASE("density histogram without steps is analytic only", "[density]")
{
    auto h = density_histogram(0, 4, 1);
    CHECK(h.counts == std::vector<std::uint64_t>(16, 0));
    CHECK(h.max_relative_error == 0);
    double s = 0;
    for (double f : h.analytic_fraction) s += f;
    CHECK(s == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(h.admissible[0 * 4 + 3]);
    CHECK(!h.admissible[1 * 4 + 3]);
    CHECK_THROWS_AS(density_histogram(10, 0, 1), Error);
}

TEST_CASE("Cassaigne-Selmer orbit follows the invariant density", "[density]")
{
    auto h = density_histogram(1'000'000, 4, 7);
    CHECK(h.max_relative_error < 0.05);
    std::uint64_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == 1'000'000);
    for (std::size_t k = 0; k < 16; ++k)
        if (!h.admissible[k] && h.analytic_mass[k] == 0) CHECK(h.counts[k] == 0);
}

TEST_CASE("translation orbits", "[torus]")
{
    auto zero = TorusTranslation::from_double({0, 0}, {0.25, 0.5}, 128);
    for (const auto& p : translation_orbit(zero, 10)) CHECK(p == std::vector<double>{0.25, 0.5});

    auto half = TorusTranslation::from_double({0.5, 1.0 / 3}, {0.1, 0.2}, 128);
    auto o = translation_orbit(half, 7);
    CHECK(circle_distance(o[6][0], 0.1) < 1e-12);
    CHECK(circle_distance(o[6][1], 0.2) < 1e-12);
    CHECK(circle_distance(o[3][0], 0.1) > 0.4);

    auto u = random_simplex_point(5, 3);
    std::vector<double> t;
    {
        PrecisionGuard guard(128);
        auto uf = u.as_float(128);
        t = {static_cast<double>(uf[0]), static_cast<double>(uf[1])};
    }
    auto r = TorusTranslation::from_double(t, {0, 0}, TorusTranslation::bits_for(100'000));
    auto direct = translation_orbit(r, 100'000);
    auto iter = translation_orbit_iterated(r, 100'000);
    double worst = 0;
    for (std::size_t n = 0; n < direct.size(); ++n)
        for (int i = 0; i < 2; ++i) worst = std::max(worst, circle_distance(direct[n][i], iter[n][i]));
    CHECK(worst < 1e-12);

    // Equidistribution on a 4 x 4 grid.
    std::vector<int> cells(16, 0);
    for (std::size_t n = 0; n < 1000; ++n) ++cells[static_cast<int>(direct[n][0] * 4) * 4 + static_cast<int>(direct[n][1] * 4)];
    for (int c : cells) CHECK(std::abs(c - 62.5) <= 0.15 * 62.5);
}

TEST_CASE("circle distance wraps", "[torus]")
{
    CHECK(circle_distance(0.05, 0.95) == Catch::Approx(0.1));
    CHECK(circle_distance(0.3, 0.3) == 0);
    CHECK(circle_distance(0.0, 0.5) == Catch::Approx(0.5));
}

TEST_CASE("limit word codes the translation orbit", "[torus]")
{
    auto seq = DirectiveSequence::periodic({gamma1(), gamma2()});
    auto u = right_eigenvector(seq, EigenvectorMode::Periodic).u;
    auto r = coding_consistency(seq, u, 500, 1e-3);
    CHECK(r.match_fraction == 1.0);
    CHECK(r.misses.empty());
    CHECK(r.cloud_points >= 5000);
    auto neg = coding_consistency(seq, u, 500, 1e-3, +1);
    CHECK(neg.match_fraction < 0.5);
    CHECK(!neg.misses.empty());

    auto empty = coding_consistency(seq, u, 0, 1e-3);
    CHECK(empty.match_fraction == 1.0);
    CHECK(empty.cloud_points == 0);
    CHECK_THROWS_AS(coding_consistency(seq, u, 10, 0.7), Error);
}

TEST_CASE("coding check on the tau fixed point", "[torus]")
{
    auto seq = DirectiveSequence::periodic({tau()});
    auto u = right_eigenvector(seq, EigenvectorMode::Periodic).u;
    auto r = coding_consistency(seq, u, 300, 1e-3);
    CHECK(r.match_fraction == 1.0);
}
