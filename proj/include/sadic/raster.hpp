#pragma once

#include "sadic/cloud.hpp"
#include "sadic/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace sadic {

/// Pixel claims of the lattice translates x + R(i) over a square window.
///
/// A pixel is claimed by (x, i) when some point of subtile i translated
/// by x lands in it. Only claim identities are tracked: the first claim,
/// and whether a second distinct one arrived.
struct TilingRaster {
    int resolution = 0;
    /// Lower-left corner and side of the window, in basis coordinates.
    double x0 = 0, y0 = 0, side = 0;
    /// Per pixel, row-major from the top row: first claiming letter (0 if
    /// none), and whether at least two distinct (x, i) pairs claim it.
    std::vector<std::uint8_t> letter;
    std::vector<std::uint8_t> multiple;
    std::size_t translates = 0;
    std::size_t translates_used = 0;
    double coverage = 0;
    double overlap = 0;
};

struct RasterOptions {
    /// Window side as a fraction of the smaller extent of the cloud.
    double window_fraction = 1.0;
};

/// Depth at which the m = 1 cloud has about `points_per_pixel` points per
/// pixel of a resolution x resolution raster; claims are point hits, so
/// sparser clouds leave holes.
inline std::size_t raster_depth(const DirectiveSequence& seq, int resolution, double points_per_pixel = 8)
{
    double pts = points_per_pixel * resolution * resolution;
    return depth_for_points(seq, static_cast<std::uint64_t>(std::ceil(pts)));
}

/// Lattice vectors x of Z^d with sum 0 and sup-norm <= radius.
inline std::vector<std::vector<std::int64_t>> lattice_translates(int d, int radius)
{
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> x(d, -radius);
    for (;;) {
        std::int64_t s = 0;
        for (int i = 0; i + 1 < d; ++i) s += x[i];
        if (std::abs(s) <= radius) {
            auto v = x;
            v[d - 1] = -s;
            out.push_back(v);
        }
        int k = 0;
        while (k < d - 1 && x[k] == radius) x[k++] = -radius;
        if (k == d - 1) break;
        ++x[k];
    }
    return out;
}

inline TilingRaster raster_tiling_check(const FractalCloud& c, int lattice_radius, int resolution,
                                        const RasterOptions& opt = {})
{
    if (c.dimension() != 3) fail(ErrorKind::InvalidArgument, "raster tiling checks are planar (d = 3)");
    if (resolution < 1) fail(ErrorKind::InvalidArgument, "resolution must be positive");
    TilingRaster r;
    r.resolution = resolution;
    std::size_t px = static_cast<std::size_t>(resolution) * resolution;
    r.letter.assign(px, 0);
    r.multiple.assign(px, 0);
    auto translates = lattice_translates(3, lattice_radius);
    r.translates = translates.size();
    if (c.empty()) return r;

    double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY}, mean[2] = {0, 0};
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double* p = c.point(k);
        for (int a = 0; a < 2; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
            mean[a] += p[a];
        }
    }
    for (double& m : mean) m /= static_cast<double>(c.size());
    r.side = opt.window_fraction * std::min(hi[0] - lo[0], hi[1] - lo[1]);
    if (r.side <= 0) r.side = 1;
    r.x0 = mean[0] - r.side / 2;
    r.y0 = mean[1] - r.side / 2;
    double scale = resolution / r.side;

    // Claim ids: translate index * 256 + letter; 0 means unclaimed.
    std::vector<std::uint32_t> first(px, 0);
    for (std::size_t t = 0; t < translates.size(); ++t) {
        std::vector<long double> x(translates[t].begin(), translates[t].end());
        auto shift = c.frame().coordinates(x);
        double sx = static_cast<double>(shift[0]), sy = static_cast<double>(shift[1]);
        if (lo[0] + sx > r.x0 + r.side || hi[0] + sx < r.x0 || lo[1] + sy > r.y0 + r.side || hi[1] + sy < r.y0)
            continue;
        ++r.translates_used;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double* p = c.point(k);
            double fx = (p[0] + sx - r.x0) * scale, fy = (p[1] + sy - r.y0) * scale;
            if (fx < 0 || fy < 0 || fx >= resolution || fy >= resolution) continue;
            std::size_t col = static_cast<std::size_t>(fx);
            std::size_t row = static_cast<std::size_t>(resolution - 1) - static_cast<std::size_t>(fy);
            std::size_t idx = row * resolution + col;
            Letter i = c.letter(k);
            std::uint32_t id = static_cast<std::uint32_t>(t + 1) * 256u + static_cast<std::uint32_t>(i);
            if (first[idx] == 0) {
                first[idx] = id;
                r.letter[idx] = static_cast<std::uint8_t>(i);
            } else if (first[idx] != id) {
                r.multiple[idx] = 1;
            }
        }
    }
    std::size_t covered = 0, multi = 0;
    for (std::size_t k = 0; k < px; ++k) {
        covered += r.letter[k] != 0;
        multi += r.multiple[k];
    }
    r.coverage = static_cast<double>(covered) / static_cast<double>(px);
    r.overlap = static_cast<double>(multi) / static_cast<double>(px);
    return r;
}

} // namespace sadic
