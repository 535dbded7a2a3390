#pragma once

#include "sadic/error.hpp"
#include "sadic/mcf.hpp"
#include "sadic/rng.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace sadic {

struct Interval {
    double lo = 0, hi = 0;
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool excludes_zero() const { return lo > 0 || hi < 0; }
    double half_width() const { return (hi - lo) / 2; }
};

struct LyapunovOptions {
    std::size_t steps = 100'000;
    std::size_t trials = 32;
    std::uint64_t seed = 1;
    std::size_t burn_in = 1'000;
    std::size_t renormalize_every = 1;
    std::size_t bootstrap = 2'000;
    unsigned threads = 1;
    /// Restarts allowed per trajectory after the orbit leaves the domain.
    std::size_t max_restarts = 100;
};

struct LyapunovEstimate {
    std::string algorithm;
    int dimension = 0;
    /// Means over trajectories of theta_1 >= ... >= theta_d.
    std::vector<double> exponents;
    double theta1 = 0, theta2 = 0, sum = 0;
    /// theta_1 as the Birkhoff average of log(|tr A(x) v| / |v|).
    double theta1_birkhoff = 0;
    Interval theta1_ci, theta2_ci, sum_ci, theta1_birkhoff_ci;
    /// Added on both sides of every interval to cover float roundoff.
    double roundoff = 0;
    std::size_t steps = 0, trials = 0, renormalize_every = 0, burn_in = 0;
    std::uint64_t seed = 0;
    std::size_t restarts = 0;
    /// Per-trajectory exponents, trajectory-index order.
    std::vector<std::vector<double>> per_trajectory;
    std::vector<double> per_trajectory_birkhoff;
};

namespace detail {

struct KahanSum {
    double sum = 0, c = 0;
    void add(double v)
    {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

/// Orthonormal frame pushed through v -> M v, with log R_ii accumulated at
/// each renormalization (QR by modified Gram-Schmidt).
class QrAccumulator {
public:
    explicit QrAccumulator(int d) : d_(d), v_(static_cast<std::size_t>(d) * d, 0.0), logs_(d), b_(d, 0.0)
    {
        for (int i = 0; i < d; ++i) v_[static_cast<std::size_t>(i) * d + i] = 1.0;
        for (int i = 0; i < d; ++i) b_[i] = 1.0 / std::sqrt(static_cast<double>(d));
    }

    /// Applies the transpose of the row-major matrix m to every column and
    /// to the Birkhoff vector. Returns the largest column entry.
    double apply(const std::vector<std::int64_t>& m)
    {
        std::vector<double> col(d_);
        double big = 0;
        for (int c = 0; c < d_; ++c) {
            for (int r = 0; r < d_; ++r) {
                double s = 0;
                for (int k = 0; k < d_; ++k) s += static_cast<double>(m[k * d_ + r]) * at(k, c);
                col[r] = s;
                big = std::max(big, std::abs(s));
            }
            for (int r = 0; r < d_; ++r) at(r, c) = col[r];
        }
        double n2 = 0;
        for (int r = 0; r < d_; ++r) {
            double s = 0;
            for (int k = 0; k < d_; ++k) s += static_cast<double>(m[k * d_ + r]) * b_[k];
            col[r] = s;
            n2 += s * s;
        }
        double n = std::sqrt(n2);
        birkhoff_.add(std::log(n));
        for (int r = 0; r < d_; ++r) b_[r] = col[r] / n;
        return big;
    }

    void renormalize()
    {
        for (int c = 0; c < d_; ++c) {
            for (int p = 0; p < c; ++p) {
                double dot = 0;
                for (int r = 0; r < d_; ++r) dot += at(r, p) * at(r, c);
                for (int r = 0; r < d_; ++r) at(r, c) -= dot * at(r, p);
            }
            double n = 0;
            for (int r = 0; r < d_; ++r) n += at(r, c) * at(r, c);
            n = std::sqrt(n);
            logs_[c].add(std::log(n));
            for (int r = 0; r < d_; ++r) at(r, c) /= n;
        }
    }

    void reset_sums()
    {
        for (auto& l : logs_) l = KahanSum{};
        birkhoff_ = KahanSum{};
    }

    std::vector<double> exponents(std::size_t steps) const
    {
        std::vector<double> e;
        for (const auto& l : logs_) e.push_back(l.sum / static_cast<double>(steps));
        return e;
    }
    double birkhoff(std::size_t steps) const { return birkhoff_.sum / static_cast<double>(steps); }

private:
    double& at(int r, int c) { return v_[static_cast<std::size_t>(r) * d_ + c]; }
    int d_;
    std::vector<double> v_;
    std::vector<KahanSum> logs_;
    KahanSum birkhoff_;
    std::vector<double> b_;
};

/// Runs the accumulator over a matrix stream: burn-in, then `steps` steps.
template <class Next>
std::pair<std::vector<double>, double> run_cocycle(int d, std::size_t burn_in, std::size_t steps, std::size_t every,
                                                   Next&& next)
{
    QrAccumulator acc(d);
    every = std::max<std::size_t>(1, every);
    // Renormalize early once entries pass 1e6, before the frame columns
    // collapse onto each other in double precision.
    constexpr double kLimit = 1e6;
    for (std::size_t k = 0; k < burn_in; ++k)
        if (acc.apply(next()) > kLimit || (k + 1) % every == 0) acc.renormalize();
    acc.renormalize();
    acc.reset_sums();
    for (std::size_t k = 0; k < steps; ++k)
        if (acc.apply(next()) > kLimit || (k + 1) % every == 0) acc.renormalize();
    acc.renormalize();
    return {acc.exponents(steps), acc.birkhoff(steps)};
}

/// Lebesgue start in the algorithm's domain.
inline std::vector<double> random_start(const Algorithm& algo, CounterRng& rng)
{
    auto x = random_simplex_double(rng, algo.dimension());
    if (algo.kind() == AlgorithmKind::JacobiPerron) {
        // Domain x1, x2 <= x3: move the largest coordinate last.
        auto it = std::max_element(x.begin(), x.end());
        std::iter_swap(it, x.end() - 1);
    }
    return x;
}

inline Interval percentile_interval(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        double pos = p * static_cast<double>(v.size() - 1);
        auto i = static_cast<std::size_t>(pos);
        double f = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
    };
    return {q(0.025), q(0.975)};
}

/// Bootstrap 95% interval of the mean over trajectories.
inline Interval bootstrap_mean(const std::vector<double>& xs, std::size_t resamples, std::uint64_t seed,
                               std::uint64_t stream)
{
    if (xs.empty()) return {};
    CounterRng rng(seed, stream);
    std::vector<double> means;
    means.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        double s = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) s += xs[rng() % xs.size()];
        means.push_back(s / static_cast<double>(xs.size()));
    }
    return percentile_interval(std::move(means));
}

} // namespace detail

/// Lyapunov exponents along T-orbits from Lebesgue-random starts. The
/// products M_0 ... M_{n-1} of incidence matrices are tracked through
/// their transposes acting on an orthonormal frame, renormalized by QR.
inline LyapunovEstimate lyapunov(const Algorithm& algo, const LyapunovOptions& opt = {})
{
    if (algo.kind() == AlgorithmKind::ArnouxRauzy)
        fail(ErrorKind::UnsupportedMeasure, "Arnoux-Rauzy has no absolutely continuous invariant measure on the simplex");
    if (opt.steps == 0 || opt.trials == 0) fail(ErrorKind::InvalidArgument, "steps and trials must be positive");
    int d = algo.dimension();

    LyapunovEstimate est;
    est.algorithm = algo.name();
    est.dimension = d;
    est.steps = opt.steps;
    est.trials = opt.trials;
    est.renormalize_every = opt.renormalize_every;
    est.burn_in = opt.burn_in;
    est.seed = opt.seed;
    est.per_trajectory.resize(opt.trials);
    est.per_trajectory_birkhoff.resize(opt.trials);
    std::vector<std::size_t> restarts(opt.trials, 0);
    std::vector<std::optional<Error>> errors(opt.trials);

    auto trajectory = [&](std::size_t t) {
        CounterRng rng(opt.seed, t);
        for (std::size_t attempt = 0;; ++attempt) {
            std::vector<double> x = detail::random_start(algo, rng);
            try {
                auto next = [&]() {
                    auto [c, y] = step<double>(algo, std::span<const double>(x));
                    x = std::move(y);
                    return algo.incidence_entries(c);
                };
                auto [e, b] = detail::run_cocycle(d, opt.burn_in, opt.steps, opt.renormalize_every, next);
                est.per_trajectory[t] = std::move(e);
                est.per_trajectory_birkhoff[t] = b;
                return;
            } catch (const Error& err) {
                ++restarts[t];
                if (attempt + 1 >= opt.max_restarts) {
                    errors[t] = Error(ErrorKind::OrbitExit, "trajectory " + std::to_string(t) + " left the domain " +
                                                                std::to_string(attempt + 1) + " times: " + err.what());
                    return;
                }
            }
        }
    };

    unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.trials)));
    if (threads == 1) {
        for (std::size_t t = 0; t < opt.trials; ++t) trajectory(t);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < opt.trials; t += threads) trajectory(t);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) throw *e;
    for (auto r : restarts) est.restarts += r;

    std::vector<double> th1, th2, sums;
    est.exponents.assign(d, 0.0);
    for (std::size_t t = 0; t < opt.trials; ++t) {
        const auto& e = est.per_trajectory[t];
        for (int k = 0; k < d; ++k) est.exponents[k] += e[k] / static_cast<double>(opt.trials);
        th1.push_back(e[0]);
        th2.push_back(d >= 2 ? e[1] : 0.0);
        double s = 0;
        for (double v : e) s += v;
        sums.push_back(s);
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    est.theta1 = mean(th1);
    est.theta2 = mean(th2);
    est.sum = mean(sums);
    est.theta1_birkhoff = mean(est.per_trajectory_birkhoff);

    // Each step and renormalization perturbs the logs by a few ulps.
    est.roundoff = 64.0 * d * d * DBL_EPSILON;
    auto widen = [&](Interval i) { return Interval{i.lo - est.roundoff, i.hi + est.roundoff}; };
    est.theta1_ci = widen(detail::bootstrap_mean(th1, opt.bootstrap, opt.seed, 1'000'001));
    est.theta2_ci = widen(detail::bootstrap_mean(th2, opt.bootstrap, opt.seed, 1'000'002));
    est.sum_ci = widen(detail::bootstrap_mean(sums, opt.bootstrap, opt.seed, 1'000'003));
    est.theta1_birkhoff_ci = widen(detail::bootstrap_mean(est.per_trajectory_birkhoff, opt.bootstrap, opt.seed, 1'000'004));
    return est;
}

struct PeriodicLyapunov {
    std::vector<double> exponents;
    double theta1 = 0, theta2 = 0, sum = 0;
    double theta1_birkhoff = 0;
    std::size_t steps = 0;
};

/// Exponents of the periodic cocycle given by a loop of cells, from the
/// same QR estimator; averaging runs over whole periods after burn-in.
inline PeriodicLyapunov lyapunov_periodic(const Algorithm& algo, const std::vector<CellLabel>& loop,
                                          std::size_t periods = 1'000'000, std::size_t burn_in_periods = 500,
                                          std::size_t renormalize_every = 1)
{
    if (loop.empty()) fail(ErrorKind::InvalidArgument, "empty cell loop");
    std::vector<std::vector<std::int64_t>> mats;
    for (auto c : loop) mats.push_back(algo.incidence_entries(c));
    std::size_t k = 0;
    auto next = [&]() -> const std::vector<std::int64_t>& { return mats[k++ % mats.size()]; };
    PeriodicLyapunov r;
    r.steps = periods * loop.size();
    auto [e, b] = detail::run_cocycle(algo.dimension(), burn_in_periods * loop.size(), r.steps, renormalize_every, next);
    r.exponents = e;
    r.theta1 = e[0];
    r.theta2 = e.size() >= 2 ? e[1] : 0.0;
    for (double v : e) r.sum += v;
    r.theta1_birkhoff = b;
    return r;
}

} // namespace sadic
