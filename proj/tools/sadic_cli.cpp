#include "CLI11.hpp"
#include "json.hpp"

#include "sadic/balanced_pair.hpp"
#include "sadic/cloud.hpp"
#include "sadic/density.hpp"
#include "sadic/directive_sequence.hpp"
#include "sadic/discrepancy.hpp"
#include "sadic/error.hpp"
#include "sadic/export.hpp"
#include "sadic/gcc.hpp"
#include "sadic/language.hpp"
#include "sadic/limit_word.hpp"
#include "sadic/lyapunov.hpp"
#include "sadic/mcf.hpp"
#include "sadic/pisot.hpp"
#include "sadic/polynomial.hpp"
#include "sadic/projection.hpp"
#include "sadic/raster.hpp"
#include "sadic/rng.hpp"
#include "sadic/tijdeman.hpp"
#include "sadic/torus.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace sadic;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitDomain = 2;
constexpr int kExitInconclusive = 3;

struct Common {
    std::uint64_t seed = 1;
    unsigned bits = kDefaultPrecisionBits;
    unsigned threads = 1;
    std::string out;
    bool json = false;
};

struct Source {
    std::string algo;
    int d = 3;
    std::string x;
    std::vector<std::string> subst;
    std::string cells;
    bool random = false;
    std::string eigen_mode;
};

unsigned default_bits()
{
    if (const char* env = std::getenv("SADIC_PRECISION_BITS")) {
        try {
            long v = std::stol(env);
            if (v >= 32 && v <= 1 << 20) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring invalid SADIC_PRECISION_BITS='" << env << "'\n";
    }
    return kDefaultPrecisionBits;
}

bool ends_with(const std::string& s, const std::string& e)
{
    return s.size() >= e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) parts.push_back(cur);
    return parts;
}

std::vector<double> parse_doubles(const std::string& s)
{
    std::vector<double> v;
    for (const auto& p : split(s, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(p, &used));
            if (used != p.size()) throw std::invalid_argument(p);
        } catch (const std::exception&) {
            fail(ErrorKind::Parse, "bad number '" + p + "'");
        }
    }
    return v;
}

std::vector<std::int64_t> parse_ints(const std::string& s)
{
    std::vector<std::int64_t> v;
    for (const auto& p : split(s, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stoll(p, &used));
            if (used != p.size()) throw std::invalid_argument(p);
        } catch (const std::exception&) {
            fail(ErrorKind::Parse, "bad integer '" + p + "'");
        }
    }
    return v;
}

/// "a,b;c,d" or "a;b" (second component 0).
std::vector<CellLabel> parse_cells(const std::string& s)
{
    std::vector<CellLabel> cells;
    for (const auto& c : split(s, ';')) {
        auto v = parse_ints(c);
        if (v.empty() || v.size() > 2) fail(ErrorKind::Parse, "bad cell '" + c + "'");
        cells.push_back({v[0], v.size() == 2 ? v[1] : 0});
    }
    if (cells.empty()) fail(ErrorKind::Parse, "empty cell list");
    return cells;
}

IntMatrix parse_matrix(const std::string& s)
{
    auto rows = split(s, ';');
    IntMatrix m(static_cast<int>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto r = parse_ints(rows[i]);
        if (r.size() != rows.size()) fail(ErrorKind::Parse, "matrix is not square");
        for (std::size_t j = 0; j < r.size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = r[j];
    }
    if (rows.empty()) fail(ErrorKind::Parse, "empty matrix");
    return m;
}

Json cell_json(const CellLabel& c) { return Json::array({c.first, c.second}); }

Json matrix_json(const IntMatrix& m)
{
    Json rows = Json::array();
    for (int i = 0; i < m.size(); ++i) {
        Json r = Json::array();
        for (int j = 0; j < m.size(); ++j) r.push_back(m(i, j).str());
        rows.push_back(r);
    }
    return rows;
}

Json point_json(const SimplexPoint& p, unsigned bits)
{
    return p.to_strings(static_cast<int>(digits10_for_bits(bits)));
}

Json pair_json(const BalancedPair& p) { return Json::array({p.first().to_string(), p.second().to_string()}); }

Json pairs_json(const std::set<BalancedPair>& s)
{
    Json a = Json::array();
    for (const auto& p : s) a.push_back(pair_json(p));
    return a;
}

Json header(const std::string& cmd, const Common& c)
{
    Json r;
    r["schema"] = 1;
    r["subcommand"] = cmd;
    r["seed"] = c.seed;
    r["precision_bits"] = c.bits;
    return r;
}

void emit(const Json& r, const Common& c)
{
    std::string text = r.dump(2) + "\n";
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    if (!ends_with(c.out, ".json")) fail(ErrorKind::InvalidArgument, "this subcommand writes .json reports only");
    write_text(c.out, text);
}

/// Writes `csv` when --out ends in .csv, otherwise the JSON report.
void emit_with_csv(const Json& r, const Common& c, const std::function<std::string()>& csv)
{
    if (ends_with(c.out, ".csv")) write_text(c.out, csv());
    else emit(r, c);
}

void add_common(CLI::App* app, Common& c, bool with_threads = false)
{
    app->add_option("--seed", c.seed, "Random seed, echoed into the report");
    app->add_option("--precision-bits", c.bits, "Float precision in bits (default from SADIC_PRECISION_BITS)")
        ->check(CLI::Range(32u, 1u << 20));
    app->add_option("--out", c.out, "Report path; the extension selects the format");
    app->add_flag("--json", c.json, "JSON report (the default)");
    if (with_threads) app->add_option("--threads", c.threads, "Worker thread cap")->check(CLI::Range(1u, 256u));
}

void add_source(CLI::App* app, Source& s)
{
    app->add_option("--algo", s.algo, "Algorithm: cs, ar, brun, jp");
    app->add_option("--d", s.d, "Dimension for ar and brun")->check(CLI::Range(2, 9));
    app->add_option("--x", s.x, "Start point, comma-separated p/q or decimals");
    app->add_option("--subst", s.subst, "Substitution 'i->w;...'; repeat for a periodic block");
    app->add_option("--cells", s.cells, "Periodic cell block of --algo, e.g. '1,0;2,0'");
    app->add_flag("--random", s.random, "Random start point of --algo drawn from --seed");
    app->add_option("--eigen-mode", s.eigen_mode, "Right eigenvector mode: cf-point, periodic, cone");
}

struct SequenceInput {
    DirectiveSequence seq;
    std::optional<SimplexPoint> x;
    Json description;
};

SequenceInput make_sequence(const Source& s, const Common& c)
{
    int ways = !s.subst.empty() + !s.cells.empty() + !s.x.empty() + s.random;
    if (ways != 1) fail(ErrorKind::InvalidArgument, "give exactly one of --subst, --cells, --x, --random");
    Json desc;
    if (!s.subst.empty()) {
        std::vector<Substitution> block;
        for (const auto& t : s.subst) block.push_back(Substitution::parse(t));
        desc["source"] = "periodic";
        desc["substitutions"] = s.subst;
        return {DirectiveSequence::periodic(std::move(block)), std::nullopt, desc};
    }
    if (s.algo.empty()) fail(ErrorKind::InvalidArgument, "--algo is required with --cells, --x and --random");
    Algorithm algo = Algorithm::from_name(s.algo, s.d);
    desc["algorithm"] = algo.name();
    desc["dimension"] = algo.dimension();
    if (!s.cells.empty()) {
        auto cells = parse_cells(s.cells);
        desc["source"] = "cells";
        Json cj = Json::array();
        for (const auto& cl : cells) cj.push_back(cell_json(cl));
        desc["cells"] = cj;
        return {DirectiveSequence::from_cells(algo, {}, cells), std::nullopt, desc};
    }
    SimplexPoint x = s.random ? random_simplex_point(c.seed, algo.dimension(), c.bits) : SimplexPoint::parse(s.x, c.bits);
    if (x.dimension() != algo.dimension()) fail(ErrorKind::InvalidArgument, "point dimension does not match the algorithm");
    desc["source"] = s.random ? "random" : "point";
    desc["x"] = point_json(x, c.bits);
    return {DirectiveSequence::continued_fraction(algo, x), x, desc};
}

SimplexPoint eigenvector(const SequenceInput& in, const Source& s, const Common& c, Json& r)
{
    EigenvectorMode mode = s.eigen_mode.empty() ? default_mode(in.seq) : parse_eigenvector_mode(s.eigen_mode);
    EigenvectorOptions opt;
    opt.bits = c.bits;
    auto e = right_eigenvector(in.seq, mode, opt);
    r["eigenvector"] = {{"mode", to_string(mode)}, {"u", point_json(e.u, c.bits)}};
    if (mode == EigenvectorMode::Cone) {
        r["eigenvector"]["depth"] = e.depth;
        r["eigenvector"]["residual"] = e.residual;
    }
    return e.u;
}

Json witness_json(const GccWitness& w)
{
    Json j;
    j["n"] = w.n;
    j["C"] = w.C;
    j["z"] = w.z;
    j["i"] = w.i;
    j["verdict"] = w.verdict;
    j["degenerate"] = w.degenerate;
    j["left_size"] = w.left_size;
    j["prefix_set_size"] = w.prefix_set_size;
    j["lattice_points"] = w.lattice_points;
    if (w.counterexample) j["counterexample"] = {{"y", w.counterexample->first}, {"j", w.counterexample->second}};
    else j["counterexample"] = nullptr;
    if (w.balance_depth) j["balance_depth"] = *w.balance_depth;
    else j["balance_depth"] = nullptr;
    return j;
}

Json interval_json(const Interval& i) { return Json::array({i.lo, i.hi}); }

// Subcommands. Each returns the exit status and writes one report.

int run_expand(const Common& c, const std::string& algo_name, int d, const std::string& xs, std::size_t steps)
{
    Algorithm algo = Algorithm::from_name(algo_name, d);
    SimplexPoint x = SimplexPoint::parse(xs, c.bits);
    auto rec = expand(algo, x, steps);
    auto err = convergence_errors(rec, c.bits);
    Json r = header("expand", c);
    r["algorithm"] = algo.name();
    r["dimension"] = algo.dimension();
    r["x"] = point_json(x, c.bits);
    r["mode"] = x.is_rational() ? "rational" : "float";
    r["steps_requested"] = steps;
    r["steps"] = rec.steps();
    Json cells = Json::array(), iters = Json::array(), prods = Json::array();
    for (const auto& cl : rec.cells) cells.push_back(cell_json(cl));
    for (const auto& p : rec.iterates) iters.push_back(point_json(p, c.bits));
    for (const auto& m : rec.products) prods.push_back(matrix_json(m));
    r["cells"] = cells;
    r["iterates"] = iters;
    r["products"] = prods;
    r["errors"] = {{"strong", err.strong}, {"weak", err.weak}, {"precision_bits", err.precision_bits}};
    if (rec.failure)
        r["failure"] = {{"step", rec.failure->step}, {"kind", std::string(to_string(rec.failure->kind))},
                        {"message", rec.failure->message}};
    else r["failure"] = nullptr;
    r["units"] = {{"products", "exact integers as decimal strings"},
                  {"iterates", "simplex coordinates, exact p/q or decimal at precision_bits"},
                  {"errors", "Euclidean norms, double"}};
    emit(r, c);
    return rec.failure ? kExitDomain : kExitOk;
}

int run_word(const Common& c, const Source& s, std::size_t length)
{
    auto in = make_sequence(s, c);
    Word w = limit_word_prefix(in.seq, length);
    Json r = header("word", c);
    r["sequence"] = in.description;
    r["length"] = w.size();
    r["word"] = w.to_string(in.seq.dimension());
    r["letter_counts"] = abelianize(w, in.seq.dimension());
    r["units"] = {{"letter_counts", "occurrences in the prefix"}};
    emit(r, c);
    return kExitOk;
}

int run_complexity(const Common& c, const Source& s, std::size_t n, std::optional<std::size_t> depth)
{
    auto in = make_sequence(s, c);
    if (!depth) {
        depth = saturation_depth(in.seq, n);
        if (!depth) fail(ErrorKind::Unsaturated, "no saturated depth found for factors up to length " + std::to_string(n));
    }
    auto p = factor_complexity(in.seq, n, *depth);
    Json r = header("complexity", c);
    r["sequence"] = in.description;
    r["n"] = n;
    r["depth"] = *depth;
    r["saturated"] = true;
    r["complexity"] = p;
    r["units"] = {{"complexity", "number of factors of length 1..n at depth"}};
    emit(r, c);
    return kExitOk;
}

int run_balance(const Common& c, const Source& s, std::size_t n_scan, std::optional<std::size_t> depth,
                std::size_t factors)
{
    auto in = make_sequence(s, c);
    if (!depth) {
        depth = balance_depth(in.seq, n_scan, 1, 200, factors);
        if (!depth) fail(ErrorKind::Unsaturated, "no saturated depth found for window length " + std::to_string(n_scan));
    }
    auto b = balance(in.seq, n_scan, *depth, factors);
    Json r = header("balance", c);
    r["sequence"] = in.description;
    r["n_scan"] = b.n_scan;
    r["depth"] = b.depth;
    r["saturated"] = b.saturated;
    r["letter_constants"] = b.letter_constants;
    r["max_constant"] = b.max_constant();
    Json fc = Json::array();
    for (const auto& [v, k] : b.factor_constants) fc.push_back({{"factor", v.to_string()}, {"C", k}});
    r["factor_constants"] = fc;
    r["units"] = {{"letter_constants", "max difference of letter counts over equal-length windows up to n_scan"}};
    emit(r, c);
    return kExitOk;
}

struct RauzyArgs {
    std::string action = "stats";
    std::optional<std::size_t> depth;
    std::uint64_t points = 100'000;
    std::size_t tag_len = 1;
    std::string letters;
    bool dedup = false;
    int png_size = 1024;
    std::size_t ball_scan = 0;
};

int run_rauzy(const Common& c, const Source& s, const RauzyArgs& a)
{
    auto in = make_sequence(s, c);
    Json r = header("rauzy", c);
    r["sequence"] = in.description;
    SimplexPoint u = eigenvector(in, s, c, r);
    ProjectionFrame frame(u);
    std::size_t depth = a.depth ? *a.depth : depth_for_points(in.seq, a.points);
    std::vector<Letter> letters;
    for (auto v : parse_ints(a.letters)) letters.push_back(static_cast<Letter>(v));
    FractalCloud cl = cloud(in.seq, frame, depth, a.tag_len, letters, c.threads);

    if (a.action == "render") {
        if (c.out.empty() || !(ends_with(c.out, ".png") || ends_with(c.out, ".svg") || ends_with(c.out, ".csv")))
            fail(ErrorKind::InvalidArgument, "render needs --out ending in .png, .svg or .csv");
        export_cloud(c.out, cl, a.dedup, a.png_size);
        return kExitOk;
    }

    r["depth"] = depth;
    r["tag_length"] = a.tag_len;
    r["points"] = cl.size();
    auto counts = cl.tag_counts();
    Json tags = Json::array();
    for (std::size_t t = 0; t < counts.size(); ++t)
        tags.push_back({{"tag", cl.tag_table()[t].to_string()},
                        {"count", counts[t]},
                        {"fraction", cl.empty() ? 0.0 : static_cast<double>(counts[t]) / static_cast<double>(cl.size())}});
    r["tags"] = tags;
    if (a.tag_len == 1 && letters.empty() && !cl.empty()) {
        auto ud = u.as_double();
        std::vector<std::size_t> by_letter(in.seq.dimension(), 0);
        for (std::size_t k = 0; k < cl.size(); ++k) ++by_letter[cl.letter(k) - 1];
        double worst = 0;
        for (std::size_t i = 0; i < by_letter.size(); ++i)
            worst = std::max(worst, std::abs(static_cast<double>(by_letter[i]) / static_cast<double>(cl.size()) - ud[i]));
        r["max_fraction_error"] = worst;
    }
    double sup = 0;
    for (std::size_t k = 0; k < cl.size(); ++k) sup = std::max(sup, cl.ambient_sup(k));
    r["max_ambient_sup"] = sup;
    if (a.ball_scan > 0) {
        auto bd = balance_depth(in.seq, a.ball_scan);
        if (!bd) fail(ErrorKind::Unsaturated, "balance constant did not saturate");
        auto C = balance(in.seq, a.ball_scan, *bd, 0).max_constant();
        r["balance"] = {{"n_scan", a.ball_scan}, {"depth", *bd}, {"C", C}, {"inside_ball", sup <= static_cast<double>(C)}};
    }
    r["units"] = {{"max_ambient_sup", "sup-norm of the projected prefix vector in ambient coordinates"},
                  {"fraction", "share of cloud points"}};
    emit_with_csv(r, c, [&] { return cloud_csv(cl, a.dedup); });
    return kExitOk;
}

int run_bpa(const Common& c, const std::string& subst, const BpaOptions& opt, bool edges)
{
    Substitution sigma = Substitution::parse(subst);
    auto res = bpa_run(sigma, opt);
    Json r = header("bpa", c);
    r["substitution"] = sigma.to_string();
    r["verdict"] = to_string(res.verdict);
    r["reason"] = res.reason;
    r["iterations"] = res.levels.size();
    r["pair_count"] = res.all_pairs().size();
    Json levels = Json::array(), fresh = Json::array();
    for (const auto& l : res.levels) levels.push_back(pairs_json(l));
    for (const auto& l : res.new_pairs) fresh.push_back(pairs_json(l));
    r["levels"] = levels;
    r["new_pairs"] = fresh;
    r["witness"] = pairs_json(res.witness);
    if (edges) {
        Json e = Json::array();
        for (const auto& [p, parts] : res.edges) e.push_back({{"pair", pair_json(p)}, {"parts", pairs_json(parts)}});
        r["edges"] = e;
    }
    r["caps"] = {{"pair_cap", opt.pair_cap}, {"iter_cap", opt.iter_cap}, {"length_cap", opt.length_cap}};
    r["units"] = {{"levels", "irreducible pairs per iteration, smaller word first"},
                  {"pair_count", "distinct pairs over all levels"}};
    emit(r, c);
    return res.verdict == BpaVerdict::Inconclusive ? kExitInconclusive : kExitOk;
}

int run_pisot(const Common& c, const std::string& matrix, const std::string& subst, const std::string& poly)
{
    int ways = !matrix.empty() + !subst.empty() + !poly.empty();
    if (ways != 1) fail(ErrorKind::InvalidArgument, "give exactly one of --matrix, --subst, --poly");
    Json r = header("pisot", c);
    IntPoly p;
    if (!poly.empty()) {
        p = IntPoly::parse(poly);
    } else {
        IntMatrix m = matrix.empty() ? Substitution::parse(subst).incidence() : parse_matrix(matrix);
        r["matrix"] = matrix_json(m);
        p = char_poly(m);
    }
    auto cert = pisot_certify(p, c.bits);
    r["polynomial"] = cert.poly.to_string();
    Json coeffs = Json::array();
    for (int k = cert.poly.degree(); k >= 0; --k) coeffs.push_back(cert.poly.coeff(k).str());
    r["coefficients"] = coeffs;
    r["irreducible"] = cert.irreducible;
    r["unit"] = cert.unit;
    r["dominant_real_gt_one"] = cert.dominant_real_gt_one ? Json(*cert.dominant_real_gt_one) : Json(nullptr);
    r["conjugates_inside"] = cert.conjugates_inside ? Json(*cert.conjugates_inside) : Json(nullptr);
    r["pisot"] = cert.pisot;
    r["norm_consistent"] = cert.norm_consistent;
    Json roots = Json::array();
    {
        PrecisionGuard guard(cert.precision_bits);
        int digits = static_cast<int>(digits10_for_bits(cert.precision_bits));
        for (const auto& e : cert.roots)
            roots.push_back({{"re", to_decimal(e.center.re, digits)},
                             {"im", to_decimal(e.center.im, digits)},
                             {"abs", to_decimal(e.center.abs(), digits)},
                             {"radius", to_decimal(e.radius, 6)},
                             {"multiplicity", e.multiplicity},
                             {"real", e.real}});
    }
    r["roots"] = roots;
    r["certificate_bits"] = cert.precision_bits;
    r["units"] = {{"roots", "enclosure disks: centre as decimal strings, radius bounds the distance to the root"}};
    emit(r, c);
    bool undecided = cert.irreducible && (!cert.dominant_real_gt_one || !cert.conjugates_inside);
    return undecided ? kExitInconclusive : kExitOk;
}

struct GccArgs {
    std::optional<std::size_t> n;
    std::optional<double> C;
    std::string z;
    std::optional<int> i;
    bool search = false;
    std::size_t n_min = 1, n_max = 40;
    std::size_t candidates = 32, grid = 0, balance_scan = 64;
    std::size_t budget = 10'000'000;
};

int run_gcc(const Common& c, const Source& s, const GccArgs& a)
{
    auto in = make_sequence(s, c);
    Json r = header("gcc", c);
    r["sequence"] = in.description;
    SimplexPoint u = eigenvector(in, s, c, r);
    GccOptions go;
    go.budget = a.budget;
    go.bits = c.bits;
    r["budget"] = a.budget;
    r["units"] = {{"C", "sup-norm radius in ambient coordinates of 1-perp"}, {"z", "ambient coordinates, sum 0"}};
    bool search = a.search || a.z.empty();
    if (!search) {
        if (!a.n || !a.C || !a.i) fail(ErrorKind::InvalidArgument, "a direct check needs --n, --C, --z and --i");
        auto w = effective_gcc(in.seq, u, *a.n, *a.C, parse_doubles(a.z), static_cast<Letter>(*a.i), go);
        r["mode"] = "check";
        r["witness"] = witness_json(w);
        emit(r, c);
        return kExitOk;
    }
    GccSearchOptions so;
    so.n_min = a.n ? *a.n : a.n_min;
    so.n_max = a.n ? *a.n : a.n_max;
    so.C = a.C;
    so.candidates = a.candidates;
    so.grid = a.grid;
    so.balance_scan = a.balance_scan;
    if (a.i) so.letters = {static_cast<Letter>(*a.i)};
    so.gcc = go;
    auto res = gcc_search(in.seq, u, so);
    r["mode"] = "search";
    r["n_range"] = {so.n_min, so.n_max};
    r["tuples_tested"] = res.tuples_tested;
    r["last_n"] = res.last_n;
    r["witness"] = res.witness ? witness_json(*res.witness) : Json(nullptr);
    emit(r, c);
    return res.witness ? kExitOk : kExitInconclusive;
}

struct LyapunovArgs {
    std::string algo;
    int d = 3;
    std::string loop;
    std::size_t periods = 1'000'000;
    LyapunovOptions opt;
};

int run_lyapunov(const Common& c, LyapunovArgs a)
{
    Algorithm algo = Algorithm::from_name(a.algo, a.d);
    Json r = header("lyapunov", c);
    r["algorithm"] = algo.name();
    r["dimension"] = algo.dimension();
    if (!a.loop.empty()) {
        auto cells = parse_cells(a.loop);
        for (const auto& cl : cells)
            if (!algo.valid_label(cl)) fail(ErrorKind::InvalidArgument, "cell is not a label of this algorithm");
        auto p = lyapunov_periodic(algo, cells, a.periods);
        r["mode"] = "periodic";
        Json cj = Json::array();
        for (const auto& cl : cells) cj.push_back(cell_json(cl));
        r["loop"] = cj;
        r["periods"] = a.periods;
        r["steps"] = p.steps;
        r["exponents"] = p.exponents;
        r["theta1"] = p.theta1;
        r["theta2"] = p.theta2;
        r["sum"] = p.sum;
        r["theta1_birkhoff"] = p.theta1_birkhoff;
        r["units"] = {{"exponents", "natural log per algorithm step, double"}};
        emit(r, c);
        return kExitOk;
    }
    a.opt.seed = c.seed;
    a.opt.threads = c.threads;
    auto e = lyapunov(algo, a.opt);
    r["mode"] = "monte-carlo";
    r["steps"] = e.steps;
    r["trials"] = e.trials;
    r["burn_in"] = e.burn_in;
    r["renormalize_every"] = e.renormalize_every;
    r["bootstrap"] = a.opt.bootstrap;
    r["restarts"] = e.restarts;
    r["exponents"] = e.exponents;
    r["theta1"] = e.theta1;
    r["theta2"] = e.theta2;
    r["sum"] = e.sum;
    r["theta1_birkhoff"] = e.theta1_birkhoff;
    r["theta1_ci"] = interval_json(e.theta1_ci);
    r["theta2_ci"] = interval_json(e.theta2_ci);
    r["sum_ci"] = interval_json(e.sum_ci);
    r["theta1_birkhoff_ci"] = interval_json(e.theta1_birkhoff_ci);
    r["roundoff"] = e.roundoff;
    r["pisot_condition"] = e.theta1_ci.lo > 0 && e.theta2_ci.hi < 0;
    r["sum_contains_zero"] = e.sum_ci.contains(0);
    r["per_trajectory"] = e.per_trajectory;
    r["per_trajectory_birkhoff"] = e.per_trajectory_birkhoff;
    r["units"] = {{"exponents", "natural log per algorithm step, double"},
                  {"ci", "95% percentile bootstrap over trajectory means, widened by roundoff"}};
    emit_with_csv(r, c, [&] {
        std::ostringstream o;
        o << "trajectory";
        for (int k = 0; k < e.dimension; ++k) o << ",theta" << k + 1;
        o << ",theta1_birkhoff\n";
        for (std::size_t t = 0; t < e.per_trajectory.size(); ++t) {
            o << t;
            for (double v : e.per_trajectory[t]) o << ',' << detail::fixed(v, 12);
            o << ',' << detail::fixed(e.per_trajectory_birkhoff[t], 12) << '\n';
        }
        return o.str();
    });
    return kExitOk;
}

int run_density(const Common& c, std::size_t steps, std::size_t grid, std::size_t burn_in)
{
    auto h = density_histogram(steps, grid, c.seed, burn_in);
    Json r = header("density", c);
    r["algorithm"] = "cs";
    r["steps"] = h.steps;
    r["burn_in"] = h.burn_in;
    r["grid"] = h.grid;
    r["restarts"] = h.restarts;
    r["total_mass"] = h.total_mass;
    r["max_relative_error"] = h.max_relative_error;
    Json cells = Json::array();
    for (std::size_t a = 0; a < grid; ++a)
        for (std::size_t b = 0; b < grid; ++b) {
            std::size_t k = a * grid + b;
            cells.push_back({{"x1_cell", a},
                             {"x3_cell", b},
                             {"admissible", static_cast<bool>(h.admissible[k])},
                             {"count", h.counts[k]},
                             {"analytic_mass", h.analytic_mass[k]},
                             {"analytic_fraction", h.analytic_fraction[k]},
                             {"empirical_fraction", h.empirical_fraction[k]},
                             {"relative_error", h.relative_error[k]}});
        }
    r["cells"] = cells;
    r["units"] = {{"analytic_mass", "integral of 12/(pi^2 (1-x1)(1-x3)) over the cell"},
                  {"fractions", "probability per cell"},
                  {"cell", "x1 in [a/grid, (a+1)/grid], x3 in [b/grid, (b+1)/grid]"}};
    emit_with_csv(r, c, [&] {
        std::ostringstream o;
        o << "x1_cell,x3_cell,admissible,count,analytic_fraction,empirical_fraction,relative_error\n";
        for (std::size_t a = 0; a < grid; ++a)
            for (std::size_t b = 0; b < grid; ++b) {
                std::size_t k = a * grid + b;
                o << a << ',' << b << ',' << (h.admissible[k] ? 1 : 0) << ',' << h.counts[k] << ','
                  << detail::fixed(h.analytic_fraction[k], 12) << ',' << detail::fixed(h.empirical_fraction[k], 12) << ','
                  << detail::fixed(h.relative_error[k], 12) << '\n';
            }
        return o.str();
    });
    return kExitOk;
}

int run_discrepancy(const Common& c, const Source& s, std::size_t n_max, std::size_t checkpoints, double slack)
{
    auto in = make_sequence(s, c);
    Json r = header("discrepancy", c);
    r["sequence"] = in.description;
    SimplexPoint u = in.x && s.eigen_mode.empty() ? *in.x : eigenvector(in, s, c, r);
    auto tr = letter_discrepancy(in.seq, u, n_max, checkpoints, slack);
    r["u"] = point_json(u, c.bits);
    r["n_max"] = tr.n_max;
    r["slack"] = tr.slack;
    r["max_deviation"] = tr.max_deviation;
    r["max_first_half"] = tr.max_first_half;
    r["max_second_half"] = tr.max_second_half;
    r["no_growth"] = tr.no_growth;
    r["checkpoints"] = tr.checkpoints;
    r["counts"] = tr.counts;
    r["deviations"] = tr.deviations;
    r["units"] = {{"deviations", "| |w_[0,N)|_i - N u_i |, letters"}};
    emit_with_csv(r, c, [&] {
        std::ostringstream o;
        int d = in.seq.dimension();
        o << "N";
        for (int i = 1; i <= d; ++i) o << ",count" << i;
        for (int i = 1; i <= d; ++i) o << ",dev" << i;
        o << '\n';
        for (std::size_t k = 0; k < tr.checkpoints.size(); ++k) {
            o << tr.checkpoints[k];
            for (auto v : tr.counts[k]) o << ',' << v;
            for (auto v : tr.deviations[k]) o << ',' << detail::fixed(v, 9);
            o << '\n';
        }
        return o.str();
    });
    return kExitOk;
}

int run_coding(const Common& c, const Source& s, std::size_t N, double eps, int sign)
{
    auto in = make_sequence(s, c);
    Json r = header("coding-check", c);
    r["sequence"] = in.description;
    SimplexPoint u = eigenvector(in, s, c, r);
    auto rep = coding_consistency(in.seq, u, N, eps, sign);
    r["N"] = rep.N;
    r["epsilon"] = rep.epsilon;
    r["sign"] = rep.sign;
    r["depth"] = rep.depth;
    r["cloud_points"] = rep.cloud_points;
    r["matches"] = rep.matches;
    r["match_fraction"] = rep.match_fraction;
    r["misses"] = rep.misses;
    r["units"] = {{"epsilon", "sup-norm distance on the torus R^(d-1)/Z^(d-1)"}};
    emit(r, c);
    return kExitOk;
}

struct TilingArgs {
    int resolution = 512;
    int radius = 2;
    std::optional<std::size_t> depth;
    double points_per_pixel = 8;
    double window_fraction = 1.0;
};

int run_tiling(const Common& c, const Source& s, const TilingArgs& a)
{
    auto in = make_sequence(s, c);
    Json r = header("tiling", c);
    r["sequence"] = in.description;
    SimplexPoint u = eigenvector(in, s, c, r);
    ProjectionFrame frame(u);
    std::size_t depth = a.depth ? *a.depth : raster_depth(in.seq, a.resolution, a.points_per_pixel);
    FractalCloud cl = cloud(in.seq, frame, depth, 1, {}, c.threads);
    RasterOptions ro;
    ro.window_fraction = a.window_fraction;
    auto t = raster_tiling_check(cl, a.radius, a.resolution, ro);
    if (ends_with(c.out, ".png")) {
        write_raster_png(c.out, t);
        return kExitOk;
    }
    r["depth"] = depth;
    r["points"] = cl.size();
    r["resolution"] = t.resolution;
    r["lattice_radius"] = a.radius;
    r["window"] = {{"x0", t.x0}, {"y0", t.y0}, {"side", t.side}};
    r["translates"] = t.translates;
    r["translates_used"] = t.translates_used;
    r["coverage"] = t.coverage;
    r["overlap"] = t.overlap;
    r["units"] = {{"coverage", "fraction of window pixels claimed"},
                  {"overlap", "fraction of window pixels claimed by two distinct tiles"},
                  {"window", "basis coordinates of 1-perp"}};
    emit(r, c);
    return kExitOk;
}

int run_tijdeman(const Common& c, const std::string& xs)
{
    auto x = parse_ints(xs);
    auto t = tijdeman_word(x);
    Json r = header("tijdeman", c);
    r["x"] = x;
    r["word"] = t.word.to_string(static_cast<int>(x.size()));
    r["sup_norm"] = t.sup_norm;
    r["l1_norm"] = t.l1_norm;
    r["l2_norm"] = t.l2_norm;
    r["bound"] = t.bound;
    r["greedy"] = t.greedy;
    r["units"] = {{"sup_norm", "largest prefix deviation from the line R x, sup-norm of the projection"}};
    emit(r, c);
    return kExitOk;
}

void write_error(const Common& c, const std::string& cmd, const Error& e)
{
    Json r = header(cmd, c);
    r["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.message()}};
    std::string text = r.dump(2) + "\n";
    if (!c.out.empty() && ends_with(c.out, ".json")) {
        try {
            write_text(c.out, text);
            return;
        } catch (const Error&) {
        }
    }
    std::cout << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"S-adic systems, multidimensional continued fractions and Rauzy fractals"};
    app.require_subcommand(1);

    Common c;
    c.bits = default_bits();
    Source src;
    std::function<int()> action;

    // expand
    std::string ex_algo, ex_x;
    int ex_d = 3;
    std::size_t ex_steps = 10;
    auto* ex = app.add_subcommand("expand", "Expand a point by a continued fraction algorithm");
    ex->add_option("--algo", ex_algo, "Algorithm: cs, ar, brun, jp")->required();
    ex->add_option("--d", ex_d, "Dimension for ar and brun")->check(CLI::Range(2, 9));
    ex->add_option("--x", ex_x, "Start point")->required();
    ex->add_option("--steps", ex_steps, "Number of steps");
    add_common(ex, c);
    ex->callback([&] { action = [&] { return run_expand(c, ex_algo, ex_d, ex_x, ex_steps); }; });

    // word
    std::size_t w_len = 100;
    auto* wd = app.add_subcommand("word", "Prefix of the limit word");
    add_source(wd, src);
    wd->add_option("--length", w_len, "Prefix length");
    add_common(wd, c);
    wd->callback([&] { action = [&] { return run_word(c, src, w_len); }; });

    // complexity
    std::size_t cx_n = 10;
    std::optional<std::size_t> cx_depth;
    auto* cx = app.add_subcommand("complexity", "Factor complexity p(1..n)");
    add_source(cx, src);
    cx->add_option("--n", cx_n, "Largest factor length")->check(CLI::Range(1, 64));
    cx->add_option("--depth", cx_depth, "Image depth (default: first saturated depth)");
    add_common(cx, c);
    cx->callback([&] { action = [&] { return run_complexity(c, src, cx_n, cx_depth); }; });

    // balance
    std::size_t bl_scan = 64, bl_factors = 3;
    std::optional<std::size_t> bl_depth;
    auto* bl = app.add_subcommand("balance", "Letter and factor balance constants");
    add_source(bl, src);
    bl->add_option("--n-scan", bl_scan, "Largest window length")->check(CLI::Range(1, 1 << 20));
    bl->add_option("--depth", bl_depth, "Image depth (default: first saturated depth)");
    bl->add_option("--factors", bl_factors, "Factor lengths with their own constants (0 for none)");
    add_common(bl, c);
    bl->callback([&] { action = [&] { return run_balance(c, src, bl_scan, bl_depth, bl_factors); }; });

    // rauzy
    RauzyArgs ra;
    auto* rz = app.add_subcommand("rauzy", "Rauzy fractal point cloud: stats or render");
    rz->add_option("action", ra.action, "stats or render")->check(CLI::IsMember({"stats", "render"}));
    add_source(rz, src);
    rz->add_option("--depth", ra.depth, "Depth n of sigma_[0,n)");
    rz->add_option("--points", ra.points, "Minimum number of points when --depth is not given");
    rz->add_option("--tag-len", ra.tag_len, "Tag length m")->check(CLI::Range(1, 16));
    rz->add_option("--letters", ra.letters, "Letters j to include, comma-separated");
    rz->add_flag("--dedup", ra.dedup, "Drop duplicate points in exports");
    rz->add_option("--png-size", ra.png_size, "PNG side in pixels")->check(CLI::Range(16, 8192));
    rz->add_option("--ball-scan", ra.ball_scan, "Also check the balance ball with this window length");
    add_common(rz, c, true);
    rz->callback([&] { action = [&] { return run_rauzy(c, src, ra); }; });

    // bpa
    std::string bp_subst;
    BpaOptions bp_opt;
    bool bp_edges = false;
    auto* bp = app.add_subcommand("bpa", "Balanced pair algorithm");
    bp->add_option("--subst", bp_subst, "Substitution 'i->w;...'")->required();
    bp->add_option("--pair-cap", bp_opt.pair_cap, "Largest number of distinct pairs");
    bp->add_option("--iter-cap", bp_opt.iter_cap, "Largest number of iterations");
    bp->add_option("--length-cap", bp_opt.length_cap, "Longest word in a pair");
    bp->add_flag("--edges", bp_edges, "Include the pair graph");
    add_common(bp, c);
    bp->callback([&] { action = [&] { return run_bpa(c, bp_subst, bp_opt, bp_edges); }; });

    // pisot
    std::string pi_matrix, pi_subst, pi_poly;
    auto* pi = app.add_subcommand("pisot", "Certify the Pisot property of a characteristic polynomial");
    pi->add_option("--matrix", pi_matrix, "Integer matrix, rows separated by ';'");
    pi->add_option("--subst", pi_subst, "Substitution whose incidence matrix is used");
    pi->add_option("--poly", pi_poly, "Integer coefficients from the leading one down");
    add_common(pi, c);
    pi->callback([&] { action = [&] { return run_pisot(c, pi_matrix, pi_subst, pi_poly); }; });

    // gcc
    GccArgs ga;
    std::optional<int> ga_i;
    auto* gc = app.add_subcommand("gcc", "Effective geometric coincidence check or witness search");
    add_source(gc, src);
    gc->add_option("--n", ga.n, "Level n (a single level when searching)");
    gc->add_option("--C", ga.C, "Radius C (default when searching: measured balance constant)");
    gc->add_option("--z", ga.z, "Shift z in ambient coordinates, comma-separated");
    gc->add_option("--i", ga_i, "Letter i")->check(CLI::Range(1, 9));
    gc->add_flag("--search-z", ga.search, "Search shifts z (and letters unless --i is given)");
    gc->add_option("--n-min", ga.n_min, "Smallest level searched");
    gc->add_option("--n-max", ga.n_max, "Largest level searched");
    gc->add_option("--candidates", ga.candidates, "Shift candidates per (n, i)");
    gc->add_option("--grid", ga.grid, "Extra grid shifts per axis");
    gc->add_option("--balance-scan", ga.balance_scan, "Window length for measuring C");
    gc->add_option("--budget", ga.budget, "Lattice point budget per check");
    add_common(gc, c);
    gc->callback([&] {
        ga.i = ga_i;
        action = [&] { return run_gcc(c, src, ga); };
    });

    // lyapunov
    LyapunovArgs la;
    auto* ly = app.add_subcommand("lyapunov", "Lyapunov exponents of the algorithm's cocycle");
    ly->add_option("--algo", la.algo, "Algorithm: cs, ar, brun, jp")->required();
    ly->add_option("--d", la.d, "Dimension for ar and brun")->check(CLI::Range(2, 9));
    ly->add_option("--steps", la.opt.steps, "Steps per trajectory")->check(CLI::PositiveNumber);
    ly->add_option("--trials", la.opt.trials, "Number of trajectories")->check(CLI::Range(2, 1 << 20));
    ly->add_option("--burn-in", la.opt.burn_in, "Discarded steps per trajectory");
    ly->add_option("--renorm", la.opt.renormalize_every, "Steps between QR renormalizations")->check(CLI::PositiveNumber);
    ly->add_option("--bootstrap", la.opt.bootstrap, "Bootstrap resamples")->check(CLI::PositiveNumber);
    ly->add_option("--loop", la.loop, "Periodic cell loop, e.g. '1,0;2,0'");
    ly->add_option("--periods", la.periods, "Loop periods for --loop")->check(CLI::PositiveNumber);
    add_common(ly, c, true);
    ly->callback([&] { action = [&] { return run_lyapunov(c, la); }; });

    // density
    std::size_t dn_steps = 10'000'000, dn_grid = 8, dn_burn = 1'000;
    auto* dn = app.add_subcommand("density", "Cassaigne-Selmer orbit histogram against the invariant density");
    dn->add_option("--steps", dn_steps, "Orbit length (0 for the analytic part only)");
    dn->add_option("--grid", dn_grid, "Cells per axis")->check(CLI::Range(1, 1024));
    dn->add_option("--burn-in", dn_burn, "Discarded steps");
    add_common(dn, c);
    dn->callback([&] { action = [&] { return run_density(c, dn_steps, dn_grid, dn_burn); }; });

    // discrepancy
    std::size_t ds_n = 1'000'000, ds_cps = 32;
    double ds_slack = 1;
    auto* ds = app.add_subcommand("discrepancy", "Letter-count deviations along the limit word");
    add_source(ds, src);
    ds->add_option("--n-max", ds_n, "Prefix length")->check(CLI::PositiveNumber);
    ds->add_option("--checkpoints", ds_cps, "Archived checkpoints (geometric)");
    ds->add_option("--slack", ds_slack, "Allowed growth between halves");
    add_common(ds, c);
    ds->callback([&] { action = [&] { return run_discrepancy(c, src, ds_n, ds_cps, ds_slack); }; });

    // coding-check
    std::size_t cc_n = 1'000;
    double cc_eps = 1e-3;
    int cc_sign = -1;
    auto* cc = app.add_subcommand("coding-check", "Compare the limit word with a torus translation orbit");
    add_source(cc, src);
    cc->add_option("--N", cc_n, "Orbit length");
    cc->add_option("--epsilon", cc_eps, "Tolerance on the torus");
    cc->add_option("--sign", cc_sign, "-1 for the coding convention, +1 for the negative control")
        ->check(CLI::IsMember({-1, 1}));
    add_common(cc, c);
    cc->callback([&] { action = [&] { return run_coding(c, src, cc_n, cc_eps, cc_sign); }; });

    // tiling
    TilingArgs ta;
    auto* tl = app.add_subcommand("tiling", "Raster check that lattice translates of the subtiles tile the plane");
    add_source(tl, src);
    tl->add_option("--resolution", ta.resolution, "Raster side in pixels")->check(CLI::Range(8, 8192));
    tl->add_option("--radius", ta.radius, "Lattice translate radius")->check(CLI::Range(0, 16));
    tl->add_option("--depth", ta.depth, "Cloud depth (default: about --points-per-pixel points per pixel)");
    tl->add_option("--points-per-pixel", ta.points_per_pixel, "Cloud density target")->check(CLI::PositiveNumber);
    tl->add_option("--window-fraction", ta.window_fraction, "Window side relative to the cloud extent")
        ->check(CLI::PositiveNumber);
    add_common(tl, c, true);
    tl->callback([&] { action = [&] { return run_tiling(c, src, ta); }; });

    // tijdeman
    std::string tj_x;
    auto* tj = app.add_subcommand("tijdeman", "Balanced word with a given abelianization");
    tj->add_option("--x", tj_x, "Letter counts, comma-separated")->required();
    add_common(tj, c);
    tj->callback([&] { action = [&] { return run_tijdeman(c, tj_x); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInternal;
    }

    std::string cmd = app.get_subcommands().front()->get_name();
    try {
        return action();
    } catch (const Error& e) {
        write_error(c, cmd, e);
        std::cerr << e.what() << '\n';
        return is_domain_error(e.kind()) ? kExitDomain : kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}
