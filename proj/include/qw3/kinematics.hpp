#pragma once

// Group and peak velocities of the ballistic part of the walk for dispersion
// relations of the form cos ω(k) = ρ cos(k − γ) − μ.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <utility>

#include "qw3/coins.hpp"
#include "qw3/dispersion.hpp"
#include "qw3/errors.hpp"
#include "qw3/linalg.hpp"

namespace qw3 {

inline constexpr double kBandEdgeTol = 1e-12;
inline constexpr double kDiscriminantTol = 1e-12;

/// dω/dk = ρ sin(k−γ) / √(1 − (ρ cos(k−γ) − μ)²).
inline double group_velocity(const DispersionParams& p, double k) {
    const double u = k - p.gamma;
    const double c = p.rho * std::cos(u) - p.mu;
    if (std::abs(c) >= 1.0 - kBandEdgeTol) throw BandEdge("group velocity requested at a band edge");
    return p.rho * std::sin(u) / std::sqrt(1.0 - c * c);
}

namespace detail {

/// Group velocity at u = k − γ using the half-angle factorisation
///   1 − c² = [(1+μ−ρ) + 2ρ sin²(u/2)] · [(1−μ−ρ) + 2ρ cos²(u/2)],
/// which stays accurate next to a band edge. Constant terms below `snap` are
/// treated as exact zeros: on the cusp 1−μ−ρ vanishes but rounds to ~1e-17,
/// which would otherwise depress the supremum at the band edge. Empty when
/// the product vanishes.
inline std::optional<double> group_velocity_stable(double rho, double mu, double u, double snap = 0.0) {
    double e1 = 1.0 + mu - rho, e2 = 1.0 - mu - rho;
    if (std::abs(e1) < snap) e1 = 0.0;
    if (std::abs(e2) < snap) e2 = 0.0;
    const double sh = std::sin(0.5 * u), ch = std::cos(0.5 * u);
    const double f1 = e1 + 2.0 * rho * sh * sh;
    const double f2 = e2 + 2.0 * rho * ch * ch;
    const double den = f1 * f2;
    if (!(den > 0.0)) return std::nullopt;
    return 2.0 * rho * sh * ch / std::sqrt(den);
}

inline constexpr double kBandTouchSnap = 1e-12;

} // namespace detail

enum class PeakMethod { closed_form, numeric_fallback };

inline std::string_view to_string(PeakMethod m) {
    return m == PeakMethod::closed_form ? "closed_form" : "numeric_fallback";
}

struct PeakVelocityResult {
    double v_peak = 0.0;
    double k0 = 0.0;
    PeakMethod method = PeakMethod::closed_form;
    std::optional<double> delta; ///< cos(k0 − γ) from the closed form
};

inline double discriminant(double rho, double mu) {
    const double s = 1.0 - rho * rho - mu * mu;
    return s * s - 4.0 * rho * rho * mu * mu;
}

/// max_k |dω/dk| by a 4096-point scan refined with golden-section search.
/// The largest value seen is returned, so a 0/0 sliver at a band edge cannot
/// spoil the result.
inline PeakVelocityResult peak_velocity_numeric(const DispersionParams& p) {
    const auto speed = [&](double u) {
        const auto v = detail::group_velocity_stable(p.rho, p.mu, u, detail::kBandTouchSnap);
        return v ? std::abs(*v) : 0.0;
    };
    constexpr int kGrid = 4096;
    const double h = 2.0 * kPi / kGrid;
    double best_u = 0.0, best_v = -1.0;
    for (int i = 0; i < kGrid; ++i) {
        const double u = -kPi + h * i;
        const double v = speed(u);
        if (v > best_v) {
            best_v = v;
            best_u = u;
        }
    }
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_u - h, b = best_u + h;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = speed(x1), f2 = speed(x2);
    while (b - a > 1e-10) {
        if (f1 > best_v) best_v = f1, best_u = x1;
        if (f2 > best_v) best_v = f2, best_u = x2;
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = speed(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = speed(x1);
        }
    }
    if (f1 > best_v) best_v = f1, best_u = x1;
    if (f2 > best_v) best_v = f2, best_u = x2;
    return {best_v, p.gamma + best_u, PeakMethod::numeric_fallback, std::nullopt};
}

/// Peak velocity: closed form from the root of d²ω/dk² = 0 where it is
/// well-conditioned, numeric maximization where the discriminant vanishes
/// (the band touches ±1 and the closed form is 0/0).
inline PeakVelocityResult peak_velocity(const DispersionParams& p) {
    const double rho = p.rho, mu = p.mu;
    if (rho < 0.0) throw DomainError("peak_velocity expects rho >= 0");
    if (rho + std::abs(mu) > 1.0 + 1e-12) throw DomainError("dispersion parameters do not describe a unitary walk");
    if (rho == 0.0) return {0.0, p.gamma, PeakMethod::closed_form, std::nullopt};
    if (mu == 0.0) return {rho, p.gamma + 0.5 * kPi, PeakMethod::closed_form, 0.0};

    const double disc = discriminant(rho, mu);
    if (disc <= kDiscriminantTol) return peak_velocity_numeric(p);

    // Δ = (ρ²+μ²−1+√disc)/(2ρμ), rationalized
    const double delta = -2.0 * rho * mu / ((1.0 - rho * rho - mu * mu) + std::sqrt(disc));
    const double m = mu - rho * delta;
    const double v = rho * std::sqrt(1.0 - delta * delta) / std::sqrt(1.0 - m * m);
    // the right-moving peak sits at k − γ = +arccos Δ, its mirror at −arccos Δ
    return {v, p.gamma + std::acos(std::clamp(delta, -1.0, 1.0)), PeakMethod::closed_form, delta};
}

/// ρ, μ, γ of the first family; γ = γ2 + γ4 is passed as `gamma_shift`.
inline DispersionParams c1_dispersion_params(double theta13, double theta23, double gamma_shift = 0.0) {
    const double amp = std::cos(theta13) * std::cos(theta23);
    const double s23 = std::sin(theta23);
    return {std::abs(amp), 0.5 * (1.0 + std::sin(theta13)) * s23 * s23,
            normalize_angle(gamma_shift + (amp < 0.0 ? kPi : 0.0))};
}

/// ρ, μ, γ of the second family; γ = γ1 is passed as `gamma_shift`.
inline DispersionParams c2_dispersion_params(double delta, double kappa, double theta23, double gamma_shift = 0.0) {
    const C2Derived d = c2_derived(C2Params{-kappa, 0.0, 0.0, 0.0, delta, theta23});
    const double amp = d.B * std::cos(theta23);
    const double s23 = std::sin(theta23);
    return {std::abs(amp), std::sin(delta) * s23 * s23 / (2.0 * std::sin(delta + kappa)),
            normalize_angle(gamma_shift + (amp < 0.0 ? kPi : 0.0))};
}

struct CuspBranches {
    double theta23_plus;  ///< cos θ23 = +cos θ13 / (1 + sin θ13)
    double theta23_minus; ///< cos θ23 = −cos θ13 / (1 + sin θ13)
};

/// Curve in the (θ13, θ23) plane where the first family's peak velocity has
/// a kink; on it ρ + μ = 1.
inline CuspBranches c1_cusp_curve(double theta13) {
    const double den = 1.0 + std::sin(theta13);
    if (den <= 1e-15) throw DomainError("cusp curve undefined at theta13 = -pi/2");
    const double x = std::cos(theta13) / den;
    if (std::abs(x) > 1.0 + 1e-12) throw DomainError("cusp curve has no real theta23 for this theta13");
    const double xc = std::clamp(x, -1.0, 1.0);
    return {std::acos(xc), std::acos(-xc)};
}

/// Largest peak velocity of the first family at fixed θ23 (attained on the cusp curve).
inline double c1_vmax(double theta23) {
    const double x = std::abs(std::cos(theta23));
    return std::sqrt(x * std::cos(2.0 * std::atan((1.0 - x) / (1.0 + x))));
}

/// Largest peak velocity of the second family at fixed κ, reached at θ23 = 0, δ = π/2 − κ.
inline double c2_vmax(double kappa) { return std::abs(std::cos(kappa)); }

} // namespace qw3
