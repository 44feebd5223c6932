#pragma once

// Momentum-space evolution operator Ũ(k) = D(e^{-ik}, 1, e^{ik}) · C and a
// Brillouin-zone scan of its eigenvalues, used as a numerical oracle for the
// analytic classifier.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "qw3/coins.hpp"
#include "qw3/errors.hpp"
#include "qw3/linalg.hpp"

namespace qw3 {

inline Mat3C evolution_at_k(const UnitaryCoin& coin, double k) {
    Mat3C u = coin.matrix();
    const Complex left = cis(-k), right = cis(k);
    for (int c = 0; c < 3; ++c) {
        u(L, c) *= left;
        u(R, c) *= right;
    }
    return u;
}

inline constexpr double kConstantTrackTol = 1e-8;

struct SpectralScan {
    std::vector<double> k_grid;
    std::array<std::vector<Complex>, 3> tracks;
    std::vector<int> constant_tracks;     ///< every track flagged k-independent
    std::array<double, 3> phase_deviation{}; ///< max |arg(λ/mean)| per track

    /// Gauge phase χ aligning the constant track with the determinant; set
    /// only when exactly one track is constant.
    std::optional<double> gauge_phase;
    /// ω(k) of the two dispersive tracks in the normalized gauge, ordered
    /// so that omega_plus ≥ omega_minus.
    std::vector<double> omega_plus, omega_minus;

    std::optional<int> constant_track_index() const {
        if (constant_tracks.empty()) return std::nullopt;
        return constant_tracks.front();
    }
    std::size_t size() const { return k_grid.size(); }
};

namespace detail {

inline double assignment_cost(const std::array<Complex, 3>& pred, const std::array<Complex, 3>& vals,
                              const std::array<int, 3>& perm) {
    double c = 0.0;
    for (std::size_t j = 0; j < 3; ++j) c += std::abs(pred[j] - vals[static_cast<std::size_t>(perm[j])]);
    return c;
}

} // namespace detail

/// Scans k ∈ [−π, π) on `n_samples` points and links eigenvalues into
/// continuous tracks. From the third sample on, each track's next value is
/// predicted by extrapolating its phase, so crossings are followed straight
/// through.
inline SpectralScan spectral_scan(const UnitaryCoin& coin, int n_samples) {
    if (n_samples < 64) throw DomainError("spectral_scan needs at least 64 samples");
    SpectralScan scan;
    const auto n = static_cast<std::size_t>(n_samples);
    scan.k_grid.resize(n);
    for (auto& t : scan.tracks) t.resize(n);

    std::array<int, 3> perm{0, 1, 2};
    for (std::size_t i = 0; i < n; ++i) {
        const double k = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        scan.k_grid[i] = k;
        const auto vals = eigensystem(evolution_at_k(coin, k)).eigenvalues;
        if (i == 0) {
            for (std::size_t j = 0; j < 3; ++j) scan.tracks[j][0] = vals[j];
            continue;
        }
        std::array<Complex, 3> pred;
        for (std::size_t j = 0; j < 3; ++j) {
            const Complex prev = scan.tracks[j][i - 1];
            pred[j] = i >= 2 ? prev * (prev / scan.tracks[j][i - 2]) : prev;
        }
        std::array<int, 3> p{0, 1, 2}, best = p;
        double best_cost = std::numeric_limits<double>::infinity();
        do {
            const double cst = detail::assignment_cost(pred, vals, p);
            if (cst < best_cost) {
                best_cost = cst;
                best = p;
            }
        } while (std::next_permutation(p.begin(), p.end()));
        if (i >= 2) {
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = a + 1; b < 3; ++b)
                    if (std::abs(pred[a] - pred[b]) < 1e-12 &&
                        std::abs(vals[static_cast<std::size_t>(best[a])] - vals[static_cast<std::size_t>(best[b])]) > 1e-12)
                        throw TrackingFailure("two tracks coincide with equal slope and then separate");
        }
        perm = best;
        for (std::size_t j = 0; j < 3; ++j) scan.tracks[j][i] = vals[static_cast<std::size_t>(perm[j])];
    }

    for (std::size_t j = 0; j < 3; ++j) {
        Complex sum = 0.0;
        for (Complex v : scan.tracks[j]) sum += v;
        const Complex mean = sum / std::abs(sum);
        double dev = 0.0;
        for (Complex v : scan.tracks[j]) dev = std::max(dev, std::abs(std::arg(v / mean)));
        scan.phase_deviation[j] = dev;
        if (dev < kConstantTrackTol) scan.constant_tracks.push_back(static_cast<int>(j));
    }

    if (scan.constant_tracks.size() == 1) {
        const auto c = static_cast<std::size_t>(scan.constant_tracks.front());
        const double chi = gauge_phase_for(coin.det(), scan.tracks[c][0]);
        scan.gauge_phase = chi;
        scan.omega_plus.resize(n);
        scan.omega_minus.resize(n);
        const Complex g = cis(chi);
        std::array<std::size_t, 2> others{};
        std::size_t o = 0;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != c) others[o++] = j;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::arg(g * scan.tracks[others[0]][i]);
            const double b = std::arg(g * scan.tracks[others[1]][i]);
            scan.omega_plus[i] = std::max(a, b);
            scan.omega_minus[i] = std::min(a, b);
        }
    }
    return scan;
}

inline constexpr double kArccosSlack = 1e-12;

/// ω(k) = arccos(ρ cos(k − γ) − μ) ∈ [0, π].
inline double dispersion_omega(double rho, double mu, double gamma, double k) {
    double arg = rho * std::cos(k - gamma) - mu;
    if (std::abs(arg) > 1.0 + kArccosSlack) throw DomainError("dispersion argument outside [-1, 1]");
    arg = std::clamp(arg, -1.0, 1.0);
    return std::acos(arg);
}

inline double dispersion_omega(const DispersionParams& p, double k) {
    return dispersion_omega(p.rho, p.mu, p.gamma, k);
}

/// Largest deviation of cos ω along the two dispersive tracks from the
/// analytic relation built from the coin's diagonal.
inline double verify_dispersion(const UnitaryCoin& coin, const SpectralScan& scan) {
    const CoinClass cls = classify_coin(coin);
    const ExtractedDispersion ex = extract_dispersion_params(coin);
    const Complex l0 = *cls.constant_eigenvalue;

    // the track sitting on λ0 is excluded; the other two carry e^{±iω}
    std::size_t skip = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < 3; ++j) {
        double worst = 0.0;
        for (Complex v : scan.tracks[j]) worst = std::max(worst, std::abs(v - l0));
        if (worst < best) {
            best = worst;
            skip = j;
        }
    }
    const Complex g = cis(cls.gauge_phase);
    double err = 0.0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const double expected = ex.rho * std::cos(scan.k_grid[i] - ex.gamma) - ex.mu;
        for (std::size_t j = 0; j < 3; ++j) {
            if (j == skip) continue;
            err = std::max(err, std::abs((g * scan.tracks[j][i]).real() - expected));
        }
    }
    return err;
}

} // namespace qw3
