#pragma once

#include "sadic/cloud.hpp"
#include "sadic/error.hpp"
#include "sadic/raster.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace sadic {

struct Rgb {
    std::uint8_t r, g, b;
};

/// Fill colour for letter i; letters beyond 3 reuse the palette.
inline Rgb letter_colour(Letter i)
{
    static constexpr std::array<Rgb, 3> palette{{{0x4a, 0x4a, 0x4a}, {0x8c, 0x8c, 0x8c}, {0xc8, 0xc8, 0xc8}}};
    if (i <= 0) return {0xff, 0xff, 0xff};
    return palette[static_cast<std::size_t>(i - 1) % palette.size()];
}

namespace detail {

inline std::string fixed(double v, int digits = 9)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v == 0 ? 0.0 : v);
    return buf;
}

/// Indices of the points kept on export: all of them, or the first point
/// of each distinct coordinate tuple.
inline std::vector<std::size_t> export_order(const FractalCloud& c, bool dedup)
{
    std::vector<std::size_t> keep;
    keep.reserve(c.size());
    std::unordered_set<std::string> seen;
    int k = c.dimension() - 1;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (dedup) {
            std::string key;
            for (int a = 0; a < k; ++a) key += fixed(c.point(i)[a]) + ",";
            if (!seen.insert(key).second) continue;
        }
        keep.push_back(i);
    }
    return keep;
}

inline std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream f(path, mode);
    if (!f) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    return f;
}

inline void write_png(const std::string& path, int width, int height, const std::vector<std::uint8_t>& rgb)
{
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        fail(ErrorKind::Io, "libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        fail(ErrorKind::Io, "libpng failed writing '" + path + "'");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(fp) != 0) fail(ErrorKind::Io, "error closing '" + path + "'");
}

} // namespace detail

/// `x,y,tag` for d = 3; `c1,...,c{d-1},tag` otherwise.
inline std::string cloud_csv(const FractalCloud& c, bool dedup = false)
{
    std::ostringstream out;
    int k = c.dimension() - 1;
    if (k == 2) {
        out << "x,y,tag\n";
    } else {
        for (int a = 0; a < k; ++a) out << "c" << a + 1 << ",";
        out << "tag\n";
    }
    for (std::size_t i : detail::export_order(c, dedup)) {
        for (int a = 0; a < k; ++a) out << detail::fixed(c.point(i)[a]) << ",";
        out << c.tag(i).to_string(c.dimension()) << "\n";
    }
    return out.str();
}

/// Scatter plot of the first two basis coordinates, coloured by letter.
inline std::string cloud_svg(const FractalCloud& c, bool dedup = false, int size = 800)
{
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
        << size << " " << size << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (c.dimension() >= 3 && !c.empty()) {
        double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
        for (std::size_t i = 0; i < c.size(); ++i)
            for (int a = 0; a < 2; ++a) {
                lo[a] = std::min(lo[a], c.point(i)[a]);
                hi[a] = std::max(hi[a], c.point(i)[a]);
            }
        double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
        double scale = (size - 20) / span;
        double r = std::max(0.5, std::min(4.0, size / std::sqrt(static_cast<double>(c.size()) + 1.0) / 4));
        for (std::size_t i : detail::export_order(c, dedup)) {
            Rgb col = letter_colour(c.letter(i));
            char fill[8];
            std::snprintf(fill, sizeof fill, "#%02x%02x%02x", col.r, col.g, col.b);
            double x = 10 + (c.point(i)[0] - lo[0]) * scale;
            double y = size - 10 - (c.point(i)[1] - lo[1]) * scale;
            out << "<circle cx=\"" << detail::fixed(x, 3) << "\" cy=\"" << detail::fixed(y, 3) << "\" r=\""
                << detail::fixed(r, 2) << "\" fill=\"" << fill << "\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

/// Renders the cloud into a size x size RGB image; later points overwrite
/// earlier ones.
inline std::vector<std::uint8_t> cloud_image(const FractalCloud& c, int size)
{
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(size) * size * 3, 0xff);
    if (c.dimension() < 3 || c.empty()) return rgb;
    double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
    for (std::size_t i = 0; i < c.size(); ++i)
        for (int a = 0; a < 2; ++a) {
            lo[a] = std::min(lo[a], c.point(i)[a]);
            hi[a] = std::max(hi[a], c.point(i)[a]);
        }
    double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
    double scale = (size - 1) / span;
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto col = static_cast<std::size_t>((c.point(i)[0] - lo[0]) * scale);
        auto row = static_cast<std::size_t>(size - 1) - static_cast<std::size_t>((c.point(i)[1] - lo[1]) * scale);
        Rgb v = letter_colour(c.letter(i));
        std::uint8_t* p = rgb.data() + (row * size + col) * 3;
        p[0] = v.r;
        p[1] = v.g;
        p[2] = v.b;
    }
    return rgb;
}

/// Raster pixels coloured by their first claiming letter; multiply
/// claimed pixels are drawn black.
inline std::vector<std::uint8_t> raster_image(const TilingRaster& r)
{
    std::vector<std::uint8_t> rgb(r.letter.size() * 3);
    for (std::size_t k = 0; k < r.letter.size(); ++k) {
        Rgb v = r.multiple[k] ? Rgb{0, 0, 0} : letter_colour(r.letter[k]);
        rgb[3 * k] = v.r;
        rgb[3 * k + 1] = v.g;
        rgb[3 * k + 2] = v.b;
    }
    return rgb;
}

inline void write_text(const std::string& path, const std::string& text)
{
    auto f = detail::open_out(path, std::ios::out | std::ios::binary);
    f << text;
    if (!f) fail(ErrorKind::Io, "error writing '" + path + "'");
}

inline void write_cloud_png(const std::string& path, const FractalCloud& c, int size = 1024)
{
    detail::write_png(path, size, size, cloud_image(c, size));
}

inline void write_raster_png(const std::string& path, const TilingRaster& r)
{
    detail::write_png(path, r.resolution, r.resolution, raster_image(r));
}

/// Writes the cloud in the format given by the extension of `path`
/// (.csv, .svg or .png).
inline void export_cloud(const std::string& path, const FractalCloud& c, bool dedup = false, int png_size = 1024)
{
    auto ends = [&](const char* ext) {
        std::string e(ext);
        return path.size() >= e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0;
    };
    if (ends(".csv"))
        write_text(path, cloud_csv(c, dedup));
    else if (ends(".svg"))
        write_text(path, cloud_svg(c, dedup));
    else if (ends(".png"))
        write_cloud_png(path, c, png_size);
    else
        fail(ErrorKind::InvalidArgument, "unknown export format for '" + path + "' (use .csv, .svg or .png)");
}

} // namespace sadic
