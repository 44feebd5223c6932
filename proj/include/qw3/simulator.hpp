#pragma once

// Position-space evolution of the walk on a truncated line. One step applies
// the coin at every site, then moves the L component one site left and the R
// component one site right.

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <variant>
#include <vector>

#include "qw3/coins.hpp"
#include "qw3/errors.hpp"
#include "qw3/linalg.hpp"

namespace qw3 {

/// Amplitudes on sites x ∈ [−half_width, half_width]; site x lives at index
/// x + half_width.
class WalkState {
public:
    WalkState(int half_width, const Vec3C& initial) : half_(half_width), amp_(static_cast<std::size_t>(2 * half_width + 1)) {
        if (half_width < 1) throw DomainError("lattice needs at least three sites");
        at(0) = initial;
    }

    int t() const { return t_; }
    int half_width() const { return half_; }
    int support() const { return t_; } ///< light cone: nonzero amplitudes only on |x| ≤ t

    Vec3C& at(int x) { return amp_[index(x)]; }
    const Vec3C& at(int x) const { return amp_[index(x)]; }
    double probability(int x) const { return at(x).norm2(); }

    double total_probability() const {
        double s = 0.0;
        for (int x = -t_; x <= t_; ++x) s += probability(x);
        return s;
    }

    /// One step of the walk; throws LatticeOverflow when the light cone
    /// would reach the last site of the lattice.
    void step(const UnitaryCoin& coin) {
        if (t_ + 1 >= half_) throw LatticeOverflow("light cone reached the lattice boundary");
        const Mat3C& c = coin.matrix();
        const int w = t_ + 1;
        // sites outside [−w, w] stay zero in both buffers
        if (scratch_.size() != amp_.size()) scratch_.assign(amp_.size(), Vec3C{});
        for (int x = -w; x <= w; ++x) {
            const Vec3C& right = at(x + 1);
            const Vec3C& here = at(x);
            const Vec3C& left = at(x - 1);
            Vec3C& out = scratch_[index(x)];
            out[L] = c(L, L) * right[L] + c(L, S) * right[S] + c(L, R) * right[R];
            out[S] = c(S, L) * here[L] + c(S, S) * here[S] + c(S, R) * here[R];
            out[R] = c(R, L) * left[L] + c(R, S) * left[S] + c(R, R) * left[R];
        }
        amp_.swap(scratch_);
        ++t_;
    }

private:
    std::size_t index(int x) const { return static_cast<std::size_t>(x + half_); }

    int half_;
    int t_ = 0;
    std::vector<Vec3C> amp_, scratch_;
};

inline void step(WalkState& state, const UnitaryCoin& coin) { state.step(coin); }

/// Tag for the maximally mixed initial coin state.
struct MixedInitial {};

using InitialCoinState = std::variant<Vec3C, MixedInitial>;

struct SimulationSummary {
    int steps = 0;
    std::vector<double> origin_series; ///< P(0, t), t = 0..T
    double tail_average_trapping = 0.0;
    double front_velocity_estimate = 0.0;
    std::vector<int> positions;        ///< x = −T..T
    std::vector<double> P_L, P_S, P_R; ///< component probabilities at time T
    std::vector<double> final_distribution;
};

inline constexpr double kFrontMinVelocity = 0.05;

namespace detail {

struct PureRun {
    std::vector<double> origin;
    std::vector<double> pl, ps, pr;
};

inline PureRun run_pure(const UnitaryCoin& coin, const Vec3C& initial, int steps, int half_width) {
    WalkState st(half_width, initial);
    PureRun r;
    r.origin.reserve(static_cast<std::size_t>(steps) + 1);
    r.origin.push_back(st.probability(0));
    for (int t = 0; t < steps; ++t) {
        st.step(coin);
        r.origin.push_back(st.probability(0));
    }
    for (int x = -steps; x <= steps; ++x) {
        const Vec3C& a = st.at(x);
        r.pl.push_back(std::norm(a[L]));
        r.ps.push_back(std::norm(a[S]));
        r.pr.push_back(std::norm(a[R]));
    }
    return r;
}

} // namespace detail

/// Runs T steps from the origin. A mixed initial state is simulated as the
/// average of the three basis-state runs, which execute concurrently.
/// `half_width` defaults to T + 1 (2T + 3 sites).
inline SimulationSummary simulate(const UnitaryCoin& coin, const InitialCoinState& initial, int steps,
                                  std::optional<int> half_width = std::nullopt) {
    if (steps < 16) throw DomainError("simulate needs at least 16 steps");
    const int hw = half_width.value_or(steps + 1);
    if (hw <= steps) throw LatticeOverflow("lattice too small for the requested number of steps");

    std::vector<detail::PureRun> runs;
    if (const auto* v = std::get_if<Vec3C>(&initial)) {
        if (std::abs(v->norm2() - 1.0) > 1e-12) throw DomainError("initial coin state must have unit norm");
        runs.push_back(detail::run_pure(coin, *v, steps, hw));
    } else {
        std::vector<std::future<detail::PureRun>> jobs;
        for (int j = 0; j < 3; ++j)
            jobs.push_back(std::async(std::launch::async, detail::run_pure, std::cref(coin), Vec3C::basis(j), steps, hw));
        for (auto& f : jobs) runs.push_back(f.get());
    }
    const double w = 1.0 / static_cast<double>(runs.size());

    SimulationSummary s;
    s.steps = steps;
    const auto n_t = static_cast<std::size_t>(steps) + 1;
    const auto n_x = static_cast<std::size_t>(2 * steps + 1);
    s.origin_series.assign(n_t, 0.0);
    s.P_L.assign(n_x, 0.0);
    s.P_S.assign(n_x, 0.0);
    s.P_R.assign(n_x, 0.0);
    for (const auto& r : runs) {
        for (std::size_t t = 0; t < n_t; ++t) s.origin_series[t] += w * r.origin[t];
        for (std::size_t i = 0; i < n_x; ++i) {
            s.P_L[i] += w * r.pl[i];
            s.P_S[i] += w * r.ps[i];
            s.P_R[i] += w * r.pr[i];
        }
    }
    s.positions.resize(n_x);
    s.final_distribution.resize(n_x);
    for (std::size_t i = 0; i < n_x; ++i) {
        s.positions[i] = static_cast<int>(i) - steps;
        s.final_distribution[i] = s.P_L[i] + s.P_S[i] + s.P_R[i];
    }

    const int t0 = steps / 2;
    double acc = 0.0;
    for (int t = t0; t <= steps; ++t) acc += s.origin_series[static_cast<std::size_t>(t)];
    s.tail_average_trapping = acc / (steps - t0 + 1);

    const double x_min = kFrontMinVelocity * steps;
    int best_x = 0;
    double best_p = -1.0;
    for (int x = 1; x <= steps; ++x) {
        if (x <= x_min) continue;
        const double p = s.final_distribution[static_cast<std::size_t>(x + steps)];
        if (p > best_p) {
            best_p = p;
            best_x = x;
        }
    }
    // nothing beyond the minimum speed: the walk has no ballistic front
    if (best_p < 1e-14) best_x = 0;
    s.front_velocity_estimate = static_cast<double>(best_x) / steps;
    return s;
}

inline constexpr double kSignalFloor = 1e-14;

/// Log-log slope of |P(0,t) − P∞| over t ∈ [T/4, T], fitted through the local
/// maxima of the residual so that zero crossings of the oscillation do not
/// enter the fit.
inline double decay_exponent(const std::vector<double>& origin_series, double p_infinity = 0.0) {
    if (origin_series.size() < 256) throw DomainError("decay_exponent needs at least 256 samples");
    const std::size_t T = origin_series.size() - 1;
    const std::size_t lo = std::max<std::size_t>(1, T / 4);
    std::vector<double> r(origin_series.size());
    double peak = 0.0;
    for (std::size_t t = lo; t <= T; ++t) {
        r[t] = std::abs(origin_series[t] - p_infinity);
        peak = std::max(peak, r[t]);
    }
    if (peak < kSignalFloor) throw InsufficientSignal("residual below the noise floor");

    std::vector<std::pair<double, double>> pts;
    for (std::size_t t = lo + 1; t < T; ++t)
        if (r[t] >= r[t - 1] && r[t] >= r[t + 1] && r[t] > kSignalFloor) pts.emplace_back(std::log(double(t)), std::log(r[t]));
    if (pts.size() < 2) {
        pts.clear();
        for (std::size_t t = lo; t <= T; ++t)
            if (r[t] > kSignalFloor) pts.emplace_back(std::log(double(t)), std::log(r[t]));
    }
    if (pts.size() < 2) throw InsufficientSignal("too few points above the noise floor");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace qw3
