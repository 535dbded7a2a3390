#pragma once

#include "sadic/error.hpp"

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace sadic {

using Letter = int;

/// Counts of each letter, l(w) in the usual notation.
using AbelianVector = std::vector<std::int64_t>;

/// A finite word over {1,...,d}.
///
/// Letters are stored one per byte, which keeps hashing, substrings and
/// factor sets cheap. Alphabets are limited to 255 letters.
class Word {
public:
    Word() = default;
    Word(std::initializer_list<Letter> letters)
    {
        data_.reserve(letters.size());
        for (Letter a : letters) push_back(a);
    }

    /// Digits "1321" for d <= 9, or whitespace-separated integers.
    static Word parse(std::string_view text)
    {
        Word w;
        bool spaced = text.find_first_of(" \t,") != std::string_view::npos;
        if (!spaced) {
            for (char c : text) {
                if (c < '1' || c > '9') fail(ErrorKind::Parse, "bad letter '" + std::string(1, c) + "'");
                w.push_back(c - '0');
            }
            return w;
        }
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',')) ++i;
            if (i == text.size()) break;
            int v = 0;
            std::size_t start = i;
            while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
                v = v * 10 + (text[i] - '0');
                if (v > 255) fail(ErrorKind::Parse, "letter too large");
                ++i;
            }
            if (i == start || v == 0) fail(ErrorKind::Parse, "bad letter in '" + std::string(text) + "'");
            w.push_back(v);
        }
        return w;
    }

    static Word from_bytes(std::string bytes)
    {
        Word w;
        w.data_ = std::move(bytes);
        return w;
    }

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    Letter operator[](std::size_t k) const { return static_cast<unsigned char>(data_[k]); }
    Letter front() const { return (*this)[0]; }
    Letter back() const { return (*this)[size() - 1]; }

    void push_back(Letter a)
    {
        if (a < 1 || a > 255) fail(ErrorKind::InvalidArgument, "letter out of range");
        data_.push_back(static_cast<char>(a));
    }
    void append(const Word& w) { data_ += w.data_; }
    void reserve(std::size_t n) { data_.reserve(n); }
    void clear() noexcept { data_.clear(); }

    Word substr(std::size_t pos, std::size_t len = std::string::npos) const
    {
        return from_bytes(data_.substr(pos, len));
    }
    bool starts_with(const Word& p) const { return data_.compare(0, p.size(), p.data_) == 0; }

    Letter max_letter() const
    {
        Letter m = 0;
        for (unsigned char c : data_) m = std::max<Letter>(m, c);
        return m;
    }

    /// Raw byte storage, one letter per byte.
    const std::string& bytes() const noexcept { return data_; }

    std::string to_string(int d = 0) const
    {
        if (d == 0) d = max_letter();
        std::string s;
        if (d <= 9) {
            for (unsigned char c : data_) s.push_back(static_cast<char>('0' + c));
            return s;
        }
        for (std::size_t k = 0; k < size(); ++k) {
            if (k) s.push_back(' ');
            s += std::to_string((*this)[k]);
        }
        return s;
    }

    friend Word operator+(Word a, const Word& b)
    {
        a.append(b);
        return a;
    }
    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word& a, const Word& b) { return a.data_ <=> b.data_; }

private:
    std::string data_;
};

inline AbelianVector abelianize(const Word& w, int d)
{
    AbelianVector v(d, 0);
    for (unsigned char c : w.bytes()) {
        if (c < 1 || c > d) fail(ErrorKind::InvalidArgument, "letter outside alphabet");
        ++v[c - 1];
    }
    return v;
}

} // namespace sadic

template <>
struct std::hash<sadic::Word> {
    std::size_t operator()(const sadic::Word& w) const noexcept { return std::hash<std::string>{}(w.bytes()); }
};
