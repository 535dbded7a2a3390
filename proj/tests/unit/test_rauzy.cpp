#include "catch2/catch_amalgamated.hpp"

#include "fixtures.hpp"
#include "sadic/cloud.hpp"
#include "sadic/export.hpp"
#include "sadic/language.hpp"
#include "sadic/projection.hpp"
#include "sadic/raster.hpp"
#include "sadic/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>

using namespace sadic;
using namespace fixtures;

namespace {

DirectiveSequence tau_sequence() { return DirectiveSequence::periodic({gamma1(), gamma2()}); }

bool is_kind(const Error& e, ErrorKind k) { return e.kind() == k; }

/// Perron vector of M_tau from the dominant root of X^3 - 2X^2 + X - 1,
/// found by bisection: M v = l v gives v = (l, l(l-1), 1).
std::vector<double> tau_perron_oracle()
{
    double lo = 1, hi = 2;
    for (int k = 0; k < 200; ++k) {
        double mid = (lo + hi) / 2;
        (mid * mid * mid - 2 * mid * mid + mid - 1 < 0 ? lo : hi) = mid;
    }
    std::vector<double> v{lo, lo * (lo - 1), 1};
    double s = v[0] + v[1] + v[2];
    for (auto& c : v) c /= s;
    return v;
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("sadic_test_" + name)).string();
}

} // namespace

TEST_CASE("projection frame invariants")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-5, 5);
    for (int d = 2; d <= 6; ++d) {
        ProjectionFrame f(random_simplex_point(static_cast<std::uint64_t>(d), d));
        auto u = f.direction_double();
        for (auto c : f.project(u)) REQUIRE(std::abs(c) < 1e-15);

        const auto& b = f.basis();
        REQUIRE(b.size() == static_cast<std::size_t>(d - 1));
        for (std::size_t j = 0; j < b.size(); ++j) {
            long double s = 0;
            for (auto c : b[j]) s += c;
            REQUIRE(std::abs(s) < 1e-15);
            for (std::size_t k = 0; k < b.size(); ++k) {
                long double dot = 0;
                for (int i = 0; i < d; ++i) dot += b[j][i] * b[k][i];
                REQUIRE(std::abs(dot - (j == k ? 1 : 0)) < 1e-15);
            }
        }

        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> v(d), w(d);
            for (int i = 0; i < d; ++i) {
                v[i] = unif(rng);
                w[i] = unif(rng);
            }
            double a = unif(rng);
            // A vector of 1-perp is fixed.
            std::vector<double> z = v;
            double mean = 0;
            for (auto c : z) mean += c / d;
            for (auto& c : z) c -= mean;
            auto pz = f.project(z);
            for (int i = 0; i < d; ++i) REQUIRE(std::abs(pz[i] - z[i]) < 1e-12);
            // Linearity and idempotence.
            std::vector<double> avw(d);
            for (int i = 0; i < d; ++i) avw[i] = a * v[i] + w[i];
            auto lhs = f.project(avw), pv = f.project(v), pw = f.project(w);
            auto ppv = f.project(pv);
            for (int i = 0; i < d; ++i) {
                REQUIRE(std::abs(lhs[i] - (a * pv[i] + pw[i])) < 1e-12);
                REQUIRE(std::abs(ppv[i] - pv[i]) < 1e-12);
            }
            // Basis coordinates round trip.
            auto c = f.coordinates(pv);
            auto back = f.ambient(c.data());
            for (int i = 0; i < d; ++i) REQUIRE(std::abs(back[i] - pv[i]) < 1e-12);
        }
    }
    CHECK(ProjectionFrame::drop_last(std::vector<int>{1, 2, 3}) == std::vector<int>{1, 2});
}

TEST_CASE("right eigenvector modes")
{
    auto oracle = tau_perron_oracle();
    auto u = right_eigenvector(tau_sequence(), EigenvectorMode::Periodic).u.as_double();
    for (int i = 0; i < 3; ++i) CHECK(std::abs(u[i] - oracle[i]) < 1e-14);

    auto cone = right_eigenvector(tau_sequence(), EigenvectorMode::Cone);
    CHECK(cone.residual < 1e-14);
    auto uc = cone.u.as_double();
    for (int i = 0; i < 3; ++i) CHECK(std::abs(uc[i] - oracle[i]) < 1e-13);

    SimplexPoint x = SimplexPoint::parse("2/5,1/4,7/20");
    auto cf = DirectiveSequence::continued_fraction(Algorithm::cassaigne_selmer(), x);
    CHECK(right_eigenvector(cf, EigenvectorMode::CfPoint).u == x);
    CHECK(default_mode(cf) == EigenvectorMode::CfPoint);
    CHECK(default_mode(tau_sequence()) == EigenvectorMode::Periodic);

    auto id = DirectiveSequence::periodic({Substitution::identity(3)});
    for (auto mode : {EigenvectorMode::Periodic, EigenvectorMode::Cone})
        CHECK_THROWS_MATCHES(right_eigenvector(id, mode), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return is_kind(e, ErrorKind::NotPrimitive);
                             }));
    CHECK_THROWS_AS(right_eigenvector(tau_sequence(), EigenvectorMode::CfPoint), Error);
}

TEST_CASE("eventually periodic eigenvector agrees with the cone limit")
{
    auto s = DirectiveSequence::explicit_then_periodic({tribonacci(), gamma1()}, {gamma2(), gamma1()});
    auto a = right_eigenvector(s, EigenvectorMode::Periodic).u.as_double();
    auto b = right_eigenvector(s, EigenvectorMode::Cone).u.as_double();
    for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("tau^4 cloud from the seed letter")
{
    auto s = tau_sequence();
    ProjectionFrame f(right_eigenvector(s, EigenvectorMode::Periodic).u);
    FractalCloud c = cloud(s, f, 8, 1, {1});
    REQUIRE(c.size() == 9);
    Word w = Word::parse("132121312");
    std::vector<double> l(3, 0);
    auto u = f.direction_double();
    for (std::size_t k = 0; k < 9; ++k) {
        CHECK(c.tag(k) == Word{w[k]});
        CHECK(c.prefix_length(k) == k);
        CHECK(c.source_letter(k) == 1);
        double len = static_cast<double>(k);
        std::vector<double> amb{l[0] - len * u[0], l[1] - len * u[1], l[2] - len * u[2]};
        auto got = f.ambient(c.point(k));
        for (int i = 0; i < 3; ++i) CHECK(std::abs(static_cast<double>(got[i]) - amb[i]) < 1e-12);
        l[w[k] - 1] += 1;
    }

    FractalCloud c0 = cloud(s, f, 0, 1, {1});
    REQUIRE(c0.size() == 1);
    CHECK(c0.tag(0) == Word{1});
    CHECK(c0.point(0)[0] == 0);
    CHECK(c0.point(0)[1] == 0);
    CHECK(cloud(s, f, 0, 1).size() == 3);
}

TEST_CASE("subtile fractions approach u")
{
    for (auto s : {tau_sequence(), DirectiveSequence::periodic({tribonacci()})}) {
        ProjectionFrame f(right_eigenvector(s, EigenvectorMode::Periodic).u);
        std::size_t n = depth_for_points(s, 100'000);
        FractalCloud c = cloud(s, f, n, 1);
        REQUIRE(c.size() >= 100'000);
        auto counts = c.tag_counts();
        auto u = f.direction_double();
        for (std::size_t t = 0; t < counts.size(); ++t) {
            double frac = static_cast<double>(counts[t]) / static_cast<double>(c.size());
            CHECK(std::abs(frac - u[c.tag_table()[t][0] - 1]) < 0.02 * u[c.tag_table()[t][0] - 1]);
        }
    }
}

TEST_CASE("tag refinement")
{
    auto s = DirectiveSequence::continued_fraction(Algorithm::cassaigne_selmer(), random_simplex_point(11, 3));
    ProjectionFrame f(right_eigenvector(s, EigenvectorMode::CfPoint).u);
    FractalCloud c1 = cloud(s, f, 18, 1);
    FractalCloud c2 = cloud(s, f, 18, 2);
    // Each image loses its last prefix when two letters must follow.
    REQUIRE(c2.size() + 3 == c1.size());
    std::size_t k1 = 0;
    for (std::size_t k2 = 0; k2 < c2.size(); ++k2, ++k1) {
        while (c1.source_letter(k1) != c2.source_letter(k2) || c1.prefix_length(k1) != c2.prefix_length(k2)) ++k1;
        REQUIRE(c2.tag(k2)[0] == c1.tag(k1)[0]);
        REQUIRE(c2.point(k2)[0] == c1.point(k1)[0]);
        REQUIRE(c2.point(k2)[1] == c1.point(k1)[1]);
    }
    std::map<Letter, std::size_t> by_first;
    auto counts2 = c2.tag_counts();
    for (std::size_t t = 0; t < counts2.size(); ++t) by_first[c2.tag_table()[t][0]] += counts2[t];
    auto counts1 = c1.tag_counts();
    std::size_t lost = 0;
    for (std::size_t t = 0; t < counts1.size(); ++t) {
        Letter i = c1.tag_table()[t][0];
        REQUIRE(counts1[t] >= by_first[i]);
        lost += counts1[t] - by_first[i];
    }
    CHECK(lost == 3);
}

TEST_CASE("cloud points lie in the balance ball")
{
    std::vector<DirectiveSequence> seqs{
        tau_sequence(), DirectiveSequence::periodic({tribonacci()}),
        DirectiveSequence::continued_fraction(Algorithm::cassaigne_selmer(), random_simplex_point(5, 3))};
    for (const auto& s : seqs) {
        std::size_t bd = *balance_depth(s, 200);
        std::int64_t C = balance(s, 200, bd, 0).max_constant();
        ProjectionFrame f(right_eigenvector(s, default_mode(s)).u);
        FractalCloud c = cloud(s, f, depth_for_points(s, 20'000), 1);
        double worst = 0;
        for (std::size_t k = 0; k < c.size(); ++k) worst = std::max(worst, c.ambient_sup(k));
        CHECK(worst <= static_cast<double>(C));
    }
}

TEST_CASE("cf-point and cone clouds coincide")
{
    auto s = DirectiveSequence::continued_fraction(Algorithm::cassaigne_selmer(), random_simplex_point(21, 3));
    auto exact = right_eigenvector(s, EigenvectorMode::CfPoint);
    auto cone = right_eigenvector(s, EigenvectorMode::Cone);
    REQUIRE(cone.residual < 1e-14);
    auto ue = exact.u.as_double(), uc = cone.u.as_double();
    double du = 0;
    for (int i = 0; i < 3; ++i) du += std::abs(ue[i] - uc[i]);
    CHECK(du < 1e-12);

    FractalCloud a = cloud(s, ProjectionFrame(exact.u), 20, 1);
    FractalCloud b = cloud(s, ProjectionFrame(cone.u), 20, 1);
    REQUIRE(a.size() == b.size());
    double worst = 0;
    std::uint64_t longest = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        REQUIRE(a.tag(k) == b.tag(k));
        longest = std::max(longest, a.prefix_length(k));
        for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(a.point(k)[i] - b.point(k)[i]));
    }
    CHECK(worst <= static_cast<double>(longest) * (du + 1e-15) + 1e-12);
}

TEST_CASE("lattice translates")
{
    auto t = lattice_translates(3, 2);
    CHECK(t.size() == 19);
    for (const auto& x : t) {
        CHECK(x[0] + x[1] + x[2] == 0);
        for (auto c : x) CHECK(std::abs(c) <= 2);
    }
    CHECK(lattice_translates(3, 0).size() == 1);
    CHECK(lattice_translates(4, 1).size() == 19);
}

TEST_CASE("raster tiling check")
{
    for (auto s : {tau_sequence(), DirectiveSequence::periodic({tribonacci()})}) {
        ProjectionFrame f(right_eigenvector(s, EigenvectorMode::Periodic).u);
        FractalCloud c = cloud(s, f, raster_depth(s, 512), 1);
        TilingRaster r = raster_tiling_check(c, 2, 512);
        CHECK(r.overlap < 0.05);
        CHECK(r.coverage > 0.95);
        CHECK(r.translates_used > 1);
    }

    auto s = tau_sequence();
    ProjectionFrame f(right_eigenvector(s, EigenvectorMode::Periodic).u);
    FractalCloud empty(f, 0, 1);
    TilingRaster e = raster_tiling_check(empty, 2, 64);
    CHECK(e.coverage == 0);
    CHECK(e.overlap == 0);

    // Negative control: the cloud plus a copy shifted by a non-lattice
    // vector overlaps its translates on a large area.
    FractalCloud base = cloud(s, f, raster_depth(s, 128), 1);
    FractalCloud doubled(f, base.depth(), 1);
    auto shift = f.coordinates(std::vector<long double>{0.5L, -0.5L, 0});
    for (int copy = 0; copy < 2; ++copy)
        for (std::size_t k = 0; k < base.size(); ++k) {
            std::vector<long double> p{base.point(k)[0] + copy * shift[0], base.point(k)[1] + copy * shift[1]};
            doubled.add(p, base.tag(k), base.source_letter(k), base.prefix_length(k));
        }
    CHECK(raster_tiling_check(doubled, 2, 128).overlap > 0.5);

    CHECK_THROWS_AS(raster_tiling_check(cloud(DirectiveSequence::periodic({dbonacci(4)}),
                                              ProjectionFrame(random_simplex_point(1, 4)), 3, 1),
                                        1, 16),
                    Error);
}

TEST_CASE("cloud export")
{
    auto s = tau_sequence();
    ProjectionFrame f(right_eigenvector(s, EigenvectorMode::Periodic).u);
    FractalCloud c = cloud(s, f, 8, 1, {1});
    std::string csv = cloud_csv(c);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
    CHECK(csv.rfind("x,y,tag\n", 0) == 0);
    CHECK(cloud_csv(FractalCloud(f, 0, 1)) == "x,y,tag\n");

    std::string svg = cloud_svg(c);
    std::size_t circles = 0;
    for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
    CHECK(circles == 9);

    // Duplicate coordinates survive unless deduplication is requested.
    FractalCloud dup(f, 0, 1);
    dup.add({0.25L, 0.5L}, Word{1}, 1, 0);
    dup.add({0.25L, 0.5L}, Word{2}, 2, 0);
    std::string kept = cloud_csv(dup);
    CHECK(std::count(kept.begin(), kept.end(), '\n') == 3);
    std::string dd = cloud_csv(dup, true);
    CHECK(std::count(dd.begin(), dd.end(), '\n') == 2);

    FractalCloud big = cloud(s, f, 20, 1);
    std::string a = temp_path("a.png"), b = temp_path("b.png");
    export_cloud(a, big);
    export_cloud(b, big);
    std::string pa = slurp(a), pb = slurp(b);
    REQUIRE(pa.size() > 8);
    CHECK(pa.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0);
    CHECK(pa == pb);
    std::remove(a.c_str());
    std::remove(b.c_str());

    // Three grey levels plus the white background.
    auto rgb = cloud_image(big, 256);
    std::set<std::uint32_t> colours;
    for (std::size_t k = 0; k < rgb.size(); k += 3) colours.insert(rgb[k] << 16 | rgb[k + 1] << 8 | rgb[k + 2]);
    CHECK(colours.size() == 4);

    CHECK_THROWS_MATCHES(export_cloud(temp_path("x.txt"), c), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return is_kind(e, ErrorKind::InvalidArgument);
                         }));
    CHECK_THROWS_MATCHES(export_cloud("/nonexistent-dir/x.csv", c), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return is_kind(e, ErrorKind::Io); }));
}
