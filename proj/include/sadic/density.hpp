#pragma once

#include "sadic/error.hpp"
#include "sadic/mcf.hpp"
#include "sadic/rng.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace sadic {

/// Printed Cassaigne-Selmer density 12 / (pi^2 (1 - x1)(1 - x3)).
inline double cs_density(double x1, double x3)
{
    const double pi = boost::math::constants::pi<double>();
    return 12.0 / (pi * pi * (1.0 - x1) * (1.0 - x3));
}

/// Integral of cs_density over [a1, b1] x [a3, b3] intersected with
/// x1 + x3 <= 1. The x3 integral is done in closed form and the x1 integral
/// by tanh-sinh quadrature, which absorbs the log singularity at x1 = 0.
inline double cs_density_mass(double a1, double b1, double a3, double b3, double tol = 1e-14)
{
    const double pi = boost::math::constants::pi<double>();
    b1 = std::min(b1, 1.0 - a3);
    if (b1 <= a1) return 0;
    auto outer = [&](double x1) {
        // 1 - min(b3, 1 - x1), kept exact near x1 = 0.
        double gap = b3 < 1.0 - x1 ? 1.0 - b3 : x1;
        if (gap >= 1.0 - a3) return 0.0;
        return std::log((1.0 - a3) / gap) / (1.0 - x1);
    };
    boost::math::quadrature::tanh_sinh<double> q;
    double kink = 1.0 - b3;
    double s = kink > a1 && kink < b1 ? q.integrate(outer, a1, kink, tol) + q.integrate(outer, kink, b1, tol)
                                      : q.integrate(outer, a1, b1, tol);
    return 12.0 / (pi * pi) * s;
}

struct DensityHistogram {
    std::size_t grid = 0;
    std::size_t steps = 0, burn_in = 0;
    std::uint64_t seed = 0;
    std::size_t restarts = 0;
    /// Cells (a, b) cover x1 in [a/g, (a+1)/g], x3 in [b/g, (b+1)/g], index a * grid + b.
    std::vector<std::uint64_t> counts;
    std::vector<bool> admissible;
    /// Raw quadrature of the printed density over each cell.
    std::vector<double> analytic_mass;
    /// analytic_mass divided by total_mass.
    std::vector<double> analytic_fraction;
    std::vector<double> empirical_fraction;
    /// |empirical - analytic| / analytic on admissible cells, 0 elsewhere.
    std::vector<double> relative_error;
    double max_relative_error = 0;
    /// Quadrature of the printed density over the whole simplex.
    double total_mass = 0;
};

/// Orbit histogram of the Cassaigne-Selmer map in (x1, x3) coordinates
/// against the printed invariant density.
inline DensityHistogram density_histogram(std::size_t steps, std::size_t grid, std::uint64_t seed,
                                          std::size_t burn_in = 1'000)
{
    if (grid == 0) fail(ErrorKind::InvalidArgument, "grid must be positive");
    Algorithm algo = Algorithm::cassaigne_selmer();
    DensityHistogram h;
    h.grid = grid;
    h.steps = steps;
    h.burn_in = burn_in;
    h.seed = seed;
    std::size_t cells = grid * grid;
    h.counts.assign(cells, 0);
    h.admissible.assign(cells, false);
    h.analytic_mass.assign(cells, 0.0);
    h.analytic_fraction.assign(cells, 0.0);
    h.empirical_fraction.assign(cells, 0.0);
    h.relative_error.assign(cells, 0.0);

    double g = static_cast<double>(grid);
    for (std::size_t a = 0; a < grid; ++a)
        for (std::size_t b = 0; b < grid; ++b) {
            std::size_t k = a * grid + b;
            h.admissible[k] = a + b + 1 <= grid;
            h.analytic_mass[k] = cs_density_mass(a / g, (a + 1) / g, b / g, (b + 1) / g);
        }
    h.total_mass = cs_density_mass(0, 1, 0, 1);
    for (std::size_t k = 0; k < cells; ++k) h.analytic_fraction[k] = h.analytic_mass[k] / h.total_mass;
    if (steps == 0) return h;

    CounterRng rng(seed);
    std::vector<double> x = random_simplex_double(rng, 3);
    std::size_t done = 0, warm = 0;
    while (done < steps) {
        try {
            auto [c, y] = step<double>(algo, std::span<const double>(x));
            x = std::move(y);
        } catch (const Error&) {
            ++h.restarts;
            x = random_simplex_double(rng, 3);
            warm = 0;
            continue;
        }
        if (warm < burn_in) {
            ++warm;
            continue;
        }
        auto a = std::min<std::size_t>(grid - 1, static_cast<std::size_t>(x[0] * g));
        auto b = std::min<std::size_t>(grid - 1, static_cast<std::size_t>(x[2] * g));
        ++h.counts[a * grid + b];
        ++done;
    }
    for (std::size_t k = 0; k < cells; ++k) {
        h.empirical_fraction[k] = static_cast<double>(h.counts[k]) / static_cast<double>(steps);
        if (h.admissible[k] && h.analytic_fraction[k] > 0) {
            h.relative_error[k] = std::abs(h.empirical_fraction[k] - h.analytic_fraction[k]) / h.analytic_fraction[k];
            h.max_relative_error = std::max(h.max_relative_error, h.relative_error[k]);
        }
    }
    return h;
}

} // namespace sadic
