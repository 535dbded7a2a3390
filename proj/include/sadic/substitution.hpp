#pragma once

#include "sadic/error.hpp"
#include "sadic/int_matrix.hpp"
#include "sadic/word.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace sadic {

/// Non-erasing morphism of the free monoid over {1,...,d}.
class Substitution {
public:
    Substitution() = default;
    explicit Substitution(std::vector<Word> images) : images_(std::move(images))
    {
        int d = dimension();
        if (d == 0) fail(ErrorKind::InvalidArgument, "substitution needs at least one letter");
        incidence_ = IntMatrix(d);
        for (int j = 0; j < d; ++j) {
            if (images_[j].empty()) fail(ErrorKind::InvalidArgument, "empty image for letter " + std::to_string(j + 1));
            for (std::size_t k = 0; k < images_[j].size(); ++k) {
                Letter a = images_[j][k];
                if (a > d) fail(ErrorKind::InvalidArgument, "letter " + std::to_string(a) + " outside alphabet");
                incidence_(a - 1, j) += 1;
            }
        }
    }

    static Substitution identity(int d)
    {
        std::vector<Word> im;
        for (int i = 1; i <= d; ++i) im.push_back(Word{i});
        return Substitution(std::move(im));
    }

    /// Parses rules "1->13;2->12;3->2"; newlines also separate rules.
    static Substitution parse(std::string_view text)
    {
        std::vector<std::pair<int, Word>> rules;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t end = text.find_first_of(";\n", pos);
            if (end == std::string_view::npos) end = text.size();
            std::string_view rule = trim(text.substr(pos, end - pos));
            pos = end + 1;
            if (rule.empty()) continue;
            std::size_t arrow = rule.find("->");
            if (arrow == std::string_view::npos) fail(ErrorKind::Parse, "missing '->' in rule '" + std::string(rule) + "'");
            std::string_view lhs = trim(rule.substr(0, arrow));
            std::string_view rhs = trim(rule.substr(arrow + 2));
            int letter = 0;
            for (char c : lhs) {
                if (!std::isdigit(static_cast<unsigned char>(c))) fail(ErrorKind::Parse, "bad letter '" + std::string(lhs) + "'");
                letter = letter * 10 + (c - '0');
            }
            if (lhs.empty() || letter < 1) fail(ErrorKind::Parse, "bad letter '" + std::string(lhs) + "'");
            if (rhs.empty()) fail(ErrorKind::Parse, "empty image for letter " + std::to_string(letter));
            rules.emplace_back(letter, Word::parse(rhs));
        }
        int d = static_cast<int>(rules.size());
        std::vector<Word> images(d);
        for (auto& [letter, w] : rules) {
            if (letter > d) fail(ErrorKind::Parse, "letter " + std::to_string(letter) + " out of range");
            if (!images[letter - 1].empty()) fail(ErrorKind::Parse, "duplicate rule for letter " + std::to_string(letter));
            if (w.max_letter() > d) fail(ErrorKind::Parse, "image letter out of range in rule for " + std::to_string(letter));
            images[letter - 1] = std::move(w);
        }
        return Substitution(std::move(images));
    }

    int dimension() const noexcept { return static_cast<int>(images_.size()); }
    const Word& image(Letter a) const { return images_.at(a - 1); }
    const std::vector<Word>& images() const noexcept { return images_; }

    /// M_sigma: entry (i,j) counts letter i in the image of j.
    const IntMatrix& incidence() const noexcept { return incidence_; }

    Word apply(const Word& w) const
    {
        Word r;
        for (std::size_t k = 0; k < w.size(); ++k) {
            Letter a = w[k];
            if (a > dimension()) fail(ErrorKind::InvalidArgument, "letter outside alphabet");
            r.append(images_[a - 1]);
        }
        return r;
    }

    std::string to_string() const
    {
        std::string s;
        for (int j = 0; j < dimension(); ++j) {
            if (j) s += ';';
            s += std::to_string(j + 1) + "->" + images_[j].to_string(dimension());
        }
        return s;
    }

    friend bool operator==(const Substitution& a, const Substitution& b) { return a.images_ == b.images_; }

private:
    static std::string_view trim(std::string_view s)
    {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    }

    std::vector<Word> images_;
    IntMatrix incidence_;
};

/// The substitution a -> sigma(rho(a)).
inline Substitution compose(const Substitution& sigma, const Substitution& rho)
{
    if (sigma.dimension() != rho.dimension()) fail(ErrorKind::InvalidArgument, "dimension mismatch in compose");
    std::vector<Word> im;
    for (const Word& w : rho.images()) im.push_back(sigma.apply(w));
    return Substitution(std::move(im));
}

inline Substitution power(const Substitution& sigma, unsigned k)
{
    Substitution r = Substitution::identity(sigma.dimension());
    for (unsigned i = 0; i < k; ++i) r = compose(r, sigma);
    return r;
}

inline const IntMatrix& incidence(const Substitution& sigma) { return sigma.incidence(); }

} // namespace sadic
