#pragma once

#include "sadic/directive_sequence.hpp"
#include "sadic/error.hpp"
#include "sadic/limit_word.hpp"
#include "sadic/projection.hpp"
#include "sadic/word.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <vector>

namespace sadic {

/// Points pi'_u l(p) for the proper prefixes p of sigma_[0,n)(j), tagged
/// by the m letters following p.
///
/// Points are stored in basis coordinates of 1-perp, in the order
/// (j, |p|). A prefix followed by fewer than m letters has no tag of
/// length m and is left out.
class FractalCloud {
public:
    FractalCloud(ProjectionFrame frame, std::size_t depth, std::size_t tag_length)
        : frame_(std::move(frame)), depth_(depth), tag_length_(tag_length)
    {
    }

    const ProjectionFrame& frame() const noexcept { return frame_; }
    int dimension() const noexcept { return frame_.dimension(); }
    std::size_t depth() const noexcept { return depth_; }
    std::size_t tag_length() const noexcept { return tag_length_; }
    std::size_t size() const noexcept { return tags_.size(); }
    bool empty() const noexcept { return tags_.empty(); }

    /// d - 1 basis coordinates of point k.
    const double* point(std::size_t k) const { return coords_.data() + k * (dimension() - 1); }
    const Word& tag(std::size_t k) const { return tag_table_[tags_[k]]; }
    std::uint32_t tag_index(std::size_t k) const { return tags_[k]; }
    const std::vector<Word>& tag_table() const noexcept { return tag_table_; }
    Letter letter(std::size_t k) const { return tag(k)[0]; }
    Letter source_letter(std::size_t k) const { return sources_[k]; }
    std::uint64_t prefix_length(std::size_t k) const { return lengths_[k]; }

    /// Ambient sup-norm of pi'_u l(p) for point k.
    double ambient_sup(std::size_t k) const
    {
        auto w = frame_.ambient(point(k));
        long double m = 0;
        for (auto c : w) m = std::max(m, std::abs(c));
        return static_cast<double>(m);
    }

    /// Number of points per tag, indexed like tag_table().
    std::vector<std::size_t> tag_counts() const
    {
        std::vector<std::size_t> c(tag_table_.size(), 0);
        for (auto t : tags_) ++c[t];
        return c;
    }

    /// Appends a point; used by cloud() and by tests building small clouds.
    void add(const std::vector<long double>& coords, const Word& tag, Letter source, std::uint64_t length)
    {
        for (auto c : coords) coords_.push_back(static_cast<double>(c));
        tags_.push_back(intern(tag));
        sources_.push_back(static_cast<std::uint8_t>(source));
        lengths_.push_back(length);
    }

private:
    friend FractalCloud cloud(const DirectiveSequence&, const ProjectionFrame&, std::size_t, std::size_t,
                              const std::vector<Letter>&, unsigned);

    std::uint32_t intern(const Word& w)
    {
        auto it = tag_index_.find(w);
        if (it != tag_index_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(tag_table_.size());
        tag_table_.push_back(w);
        tag_index_.emplace(w, id);
        return id;
    }

    ProjectionFrame frame_;
    std::size_t depth_;
    std::size_t tag_length_;
    std::vector<double> coords_;
    std::vector<std::uint32_t> tags_;
    std::vector<std::uint8_t> sources_;
    std::vector<std::uint64_t> lengths_;
    std::vector<Word> tag_table_;
    std::map<Word, std::uint32_t> tag_index_;
};

/// Cloud of sigma_[0,n) over the given letters (all letters when empty).
/// Projection runs on up to `threads` threads, one block of letters each.
inline FractalCloud cloud(const DirectiveSequence& seq, const ProjectionFrame& frame, std::size_t n, std::size_t m,
                          const std::vector<Letter>& letters = {}, unsigned threads = 1)
{
    int d = seq.dimension();
    if (frame.dimension() != d) fail(ErrorKind::InvalidArgument, "frame and sequence dimensions differ");
    if (m == 0) fail(ErrorKind::InvalidArgument, "tag length must be at least 1");
    std::vector<Letter> js = letters;
    if (js.empty())
        for (Letter j = 1; j <= d; ++j) js.push_back(j);
    for (Letter j : js)
        if (j < 1 || j > d) fail(ErrorKind::InvalidArgument, "letter out of range");

    // The sequence cache is not thread-safe, so images are built first.
    std::vector<Word> images;
    for (Letter j : js) images.push_back(image(seq, n, j));

    struct Block {
        std::vector<double> coords;
        std::vector<std::uint64_t> lengths;
    };
    std::vector<Block> blocks(js.size());
    auto work = [&](std::size_t b) {
        const Word& w = images[b];
        std::vector<std::int64_t> counts(d, 0);
        Block& out = blocks[b];
        for (std::size_t pos = 0; pos + m <= w.size(); ++pos) {
            auto c = frame.project_coordinates(counts);
            for (auto v : c) out.coords.push_back(static_cast<double>(v));
            out.lengths.push_back(pos);
            ++counts[w[pos] - 1];
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(js.size())));
    if (threads == 1) {
        for (std::size_t b = 0; b < js.size(); ++b) work(b);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t b = t; b < js.size(); b += threads) work(b);
            });
        for (auto& th : pool) th.join();
    }

    FractalCloud c(frame, n, m);
    std::size_t total = 0;
    for (const auto& b : blocks) total += b.lengths.size();
    c.coords_.reserve(total * (d - 1));
    c.tags_.reserve(total);
    c.sources_.reserve(total);
    c.lengths_.reserve(total);
    for (std::size_t b = 0; b < js.size(); ++b) {
        const Word& w = images[b];
        const Block& blk = blocks[b];
        for (std::size_t k = 0; k < blk.lengths.size(); ++k) {
            std::size_t pos = blk.lengths[k];
            for (int i = 0; i + 1 < d; ++i) c.coords_.push_back(blk.coords[k * (d - 1) + i]);
            c.tags_.push_back(c.intern(w.substr(pos, m)));
            c.sources_.push_back(static_cast<std::uint8_t>(js[b]));
            c.lengths_.push_back(pos);
        }
    }
    return c;
}

/// Sum over the letters of |sigma_[0,n)(j)|, i.e. the m = 1 cloud size.
inline BigInt cloud_size(const DirectiveSequence& seq, std::size_t n)
{
    BigInt s = 0;
    for (const auto& v : seq.product(n).column_sums()) s += v;
    return s;
}

/// Smallest n whose m = 1 cloud has at least `points` points.
inline std::size_t depth_for_points(const DirectiveSequence& seq, std::uint64_t points, std::size_t max_depth = 4096)
{
    for (std::size_t n = 0; n <= max_depth; ++n)
        if (cloud_size(seq, n) >= BigInt(points)) return n;
    fail(ErrorKind::NotPrimitive, "images stay shorter than " + std::to_string(points) + " letters");
}

} // namespace sadic
