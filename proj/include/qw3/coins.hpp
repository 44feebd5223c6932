#pragma once

// Coin operators: the nine-angle parametrization of U(3), the two localizing
// families, and the analytic point-spectrum classifier.

#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>
#include <string>
#include <string_view>
#include <variant>

#include "qw3/dispersion.hpp"
#include "qw3/errors.hpp"
#include "qw3/linalg.hpp"

namespace qw3 {

/// Mixing angles θ12, θ13, θ23, the phase δ, and the five independent phase
/// combinations γ1..γ5 of the outer diagonal factors.
struct CoinParams {
    double theta12 = 0.0, theta13 = 0.0, theta23 = 0.0;
    double delta = 0.0;
    double gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0, gamma4 = 0.0, gamma5 = 0.0;

    CoinParams normalized() const {
        return {normalize_angle(theta12), normalize_angle(theta13), normalize_angle(theta23),
                normalize_angle(delta),   normalize_angle(gamma1),  normalize_angle(gamma2),
                normalize_angle(gamma3),  normalize_angle(gamma4),  normalize_angle(gamma5)};
    }
};

/// First localizing family: δ = 0, γ3 = −γ5, θ12 = θ23, γ1 = γ2 + γ4.
struct C1Params {
    double gamma2 = 0.0, gamma4 = 0.0, gamma5 = 0.0;
    double theta13 = 0.0, theta23 = 0.0;

    C1Params normalized() const {
        return {normalize_angle(gamma2), normalize_angle(gamma4), normalize_angle(gamma5),
                normalize_angle(theta13), normalize_angle(theta23)};
    }
};

/// Second localizing family. θ13 is not free: sin θ13 = −sin κ / sin(δ + κ)
/// with κ = γ2 + γ4 − γ1, which restricts the admissible δ for a given κ.
struct C2Params {
    double gamma1 = 0.0, gamma2 = 0.0, gamma4 = 0.0, gamma5 = 0.0;
    double delta = 0.0;
    double theta23 = 0.0;

    double kappa() const { return gamma2 + gamma4 - gamma1; }

    C2Params normalized() const {
        return {normalize_angle(gamma1), normalize_angle(gamma2), normalize_angle(gamma4),
                normalize_angle(gamma5), normalize_angle(delta),  normalize_angle(theta23)};
    }
};

using FamilyParams = std::variant<C1Params, C2Params>;

/// Derived C2 quantities A = 1/sin(δ+κ), B = √(A² sin δ sin(δ+2κ)) and sin θ13.
struct C2Derived {
    double kappa, A, B, s13;
};

inline constexpr double kC2Slack = 1e-12;

/// Validates the C2 admissibility condition |sin κ| ≤ |sin(δ+κ)|.
inline C2Derived c2_derived(const C2Params& p) {
    const double kappa = p.kappa();
    const double sdk = std::sin(p.delta + kappa);
    const double sk = std::sin(kappa);
    if (std::abs(sdk) < 1e-14)
        throw InvalidC2Params("sin(delta + kappa) = 0: the C2 family is undefined here");
    if (std::abs(sk) > std::abs(sdk) + kC2Slack)
        throw InvalidC2Params("|sin kappa / sin(delta + kappa)| > 1: outside the admissible C2 region");
    const double A = 1.0 / sdk;
    // sin δ sin(δ+2κ) = sin²(δ+κ) − sin²κ, non-negative on the admissible region
    const double radicand = std::max(0.0, sdk * sdk - sk * sk);
    return {kappa, A, std::abs(A) * std::sqrt(radicand), -A * sk};
}

inline bool c2_admissible(double delta, double kappa) {
    const double sdk = std::sin(delta + kappa);
    return std::abs(sdk) >= 1e-14 && std::abs(std::sin(kappa)) <= std::abs(sdk) + kC2Slack;
}

/// A 3×3 unitary coin. Construction from an arbitrary matrix is checked.
class UnitaryCoin {
public:
    UnitaryCoin() : m_(Mat3C::identity()) {}

    static UnitaryCoin from_matrix(const Mat3C& m, double tol = kUnitarityTol) {
        if (!is_unitary(m, tol)) throw NotUnitary("coin matrix is not unitary within tolerance");
        return UnitaryCoin(m);
    }

    const Mat3C& matrix() const { return m_; }
    Complex operator()(int r, int c) const { return m_(r, c); }
    Complex det() const { return m_.det(); }

private:
    explicit UnitaryCoin(const Mat3C& m) : m_(m) {}
    friend UnitaryCoin unchecked_coin(const Mat3C& m);

    Mat3C m_;
};

/// For constructors whose output is unitary by construction.
inline UnitaryCoin unchecked_coin(const Mat3C& m) { return UnitaryCoin(m); }

inline Complex cis(double x) { return std::polar(1.0, x); }

inline UnitaryCoin build_unitary(const CoinParams& p) {
    const double c12 = std::cos(p.theta12), s12 = std::sin(p.theta12);
    const double c13 = std::cos(p.theta13), s13 = std::sin(p.theta13);
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const Complex ed = cis(p.delta);
    const double g1 = p.gamma1, g2 = p.gamma2, g3 = p.gamma3, g4 = p.gamma4, g5 = p.gamma5;
    Mat3C m;
    m(L, L) = cis(g1) * c12 * c13;
    m(L, S) = cis(g2) * c13 * s12;
    m(L, R) = cis(-(p.delta - g3)) * s13;
    m(S, L) = -cis(g4) * (c23 * s12 + ed * c12 * s13 * s23);
    m(S, S) = cis(-(g1 - g2 - g4)) * (c12 * c23 - ed * s12 * s13 * s23);
    m(S, R) = cis(-(g1 - g3 - g4)) * c13 * s23;
    m(R, L) = cis(g5) * (s12 * s23 - ed * c12 * c23 * s13);
    m(R, S) = -cis(-(g1 - g2 - g5)) * (c12 * s23 + ed * c23 * s12 * s13);
    m(R, R) = cis(-(g1 - g3 - g5)) * c13 * c23;
    return unchecked_coin(m);
}

inline UnitaryCoin build_c1(const C1Params& p) {
    const double c13 = std::cos(p.theta13), s13 = std::sin(p.theta13);
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const double g2 = p.gamma2, g4 = p.gamma4, g5 = p.gamma5;
    Mat3C m;
    m(L, L) = cis(g2 + g4) * c13 * c23;
    m(L, S) = cis(g2) * c13 * s23;
    m(L, R) = cis(-g5) * s13;
    m(S, L) = -cis(g4) * c23 * (1.0 + s13) * s23;
    m(S, S) = c23 * c23 - s13 * s23 * s23;
    m(S, R) = cis(-(g2 + g5)) * c13 * s23;
    m(R, L) = cis(g5) * (s23 * s23 - c23 * c23 * s13);
    m(R, S) = -cis(-(g4 - g5)) * c23 * (1.0 + s13) * s23;
    m(R, R) = cis(-(g2 + g4)) * c13 * c23;
    return unchecked_coin(m);
}

inline UnitaryCoin build_c2(const C2Params& p) {
    const auto d = c2_derived(p);
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const double sd = std::sin(p.delta), sk = std::sin(d.kappa);
    const Complex ed = cis(p.delta);
    const double g1 = p.gamma1, g2 = p.gamma2, g4 = p.gamma4, g5 = p.gamma5;
    Mat3C m;
    m(L, L) = cis(g1) * c23 * d.B;
    m(L, S) = cis(g2) * d.B * s23;
    m(L, R) = -cis(-(p.delta + g5)) * d.A * sk;
    m(S, L) = -cis(g1 - g2) * d.A * s23 * c23 * sd;
    m(S, S) = cis(d.kappa) * (c23 * c23 + ed * d.A * s23 * s23 * sk);
    m(S, R) = cis(-(g1 - g4 + g5)) * d.B * s23;
    m(R, L) = cis(g5) * (s23 * s23 + ed * c23 * c23 * d.A * sk);
    m(R, S) = -cis(-(g4 - g5)) * d.A * s23 * c23 * sd;
    m(R, R) = cis(-g1) * c23 * d.B;
    return unchecked_coin(m);
}

inline UnitaryCoin build_coin(const FamilyParams& fp) {
    return std::visit([](const auto& p) {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, C1Params>) return build_c1(p);
        else return build_c2(p);
    }, fp);
}

// Named coins

inline UnitaryCoin grover() {
    const double a = -1.0 / 3.0, b = 2.0 / 3.0;
    return unchecked_coin(Mat3C::from_rows({{{a, b, b}, {b, a, b}, {b, b, a}}}));
}

inline UnitaryCoin dft3() {
    const double n = 1.0 / std::sqrt(3.0);
    const Complex w = cis(2.0 * kPi / 3.0);
    return unchecked_coin(Mat3C::from_rows({{{n, n, n}, {n, n * w, n * w * w}, {n, n * w * w, n * w}}}));
}

/// Eigenvector deformation of the Grover coin; ρ = 1/√3 gives Grover itself.
inline C1Params c_rho_params(double rho) {
    return {0.0, 0.0, 0.0, std::asin(1.0 - rho * rho), std::acos(-rho / std::sqrt(2.0 - rho * rho))};
}

inline Mat3C c_rho_matrix(double rho) {
    const double r2 = rho * rho, off = rho * std::sqrt(2.0 - 2.0 * r2);
    return Mat3C::from_rows({{{-r2, off, 1.0 - r2}, {off, -1.0 + 2.0 * r2, off}, {1.0 - r2, off, -r2}}});
}

/// Eigenvalue deformation of the Grover coin (C2 family).
inline C2Params c_phi_params(double phi) {
    const double acot = std::atan(1.0 / (2.0 / (3.0 * std::tan(phi))));
    return {kPi, kPi, -phi, -phi, phi + acot, -std::atan(2.0)};
}

inline Mat3C c_phi_matrix(double phi) {
    const double c = std::cos(phi) / 3.0;
    const Complex corner = 2.0 * c - kI * std::sin(phi);
    return Mat3C::from_rows({{{-c, 2.0 * c, corner}, {2.0 * c, -c - kI * std::sin(phi), 2.0 * c}, {corner, 2.0 * c, -c}}});
}

struct Minors {
    Complex L, S, R;
};

/// Principal 2×2 minors: m_L omits row/column L, and so on.
inline Minors compute_minors(const UnitaryCoin& coin) {
    const Mat3C& c = coin.matrix();
    return {c(S, S) * c(R, R) - c(S, R) * c(R, S), c(L, L) * c(R, R) - c(L, R) * c(R, L),
            c(L, L) * c(S, S) - c(L, S) * c(S, L)};
}

enum class CoinKind {
    NoPointSpectrum,
    PurePoint_Theta13,
    PurePoint_Theta12Theta23,
    Decoupled,
    Class1,
    Class2,
};

inline std::string_view to_string(CoinKind k) {
    switch (k) {
    case CoinKind::NoPointSpectrum: return "NoPointSpectrum";
    case CoinKind::PurePoint_Theta13: return "PurePoint_Theta13";
    case CoinKind::PurePoint_Theta12Theta23: return "PurePoint_Theta12Theta23";
    case CoinKind::Decoupled: return "Decoupled";
    case CoinKind::Class1: return "Class1";
    case CoinKind::Class2: return "Class2";
    }
    return "?";
}

struct CoinClass {
    CoinKind kind = CoinKind::NoPointSpectrum;
    double det_phase = 0.0;                   ///< arg det C of the coin as given
    std::optional<Complex> constant_eigenvalue; ///< k-independent eigenvalue λ0, when present
    double normalized_phase = 0.0;            ///< arg det of the gauge-normalized coin
    double gauge_phase = 0.0;                 ///< χ with C' = e^{iχ} C
    bool also_class2 = false;                 ///< Class1 coin on the C1 ∩ C2 overlap (s13 = 0)
    double condition_residual = 0.0;

    bool has_point_spectrum() const { return kind != CoinKind::NoPointSpectrum; }
};

inline constexpr double kClassifyTol = 1e-10;

namespace detail {

/// Largest violation of the conditions for λ0 to be a k-independent root of
/// det(Ũ(k) − λ): C_LL λ0 = m_R, C_RR λ0 = m_L, λ0³ − C_SS λ0² + m_S λ0 − det = 0.
inline double point_spectrum_residual(const Mat3C& c, const Minors& m, Complex det, Complex l0) {
    const double r1 = std::abs(c(L, L) * l0 - m.R);
    const double r2 = std::abs(c(R, R) * l0 - m.L);
    const double r3 = std::abs(((l0 - c(S, S)) * l0 + m.S) * l0 - det);
    const double r4 = std::abs(std::abs(l0) - 1.0);
    return std::max({r1, r2, r3, r4});
}

} // namespace detail

/// Multiplies the coin by e^{iχ}, e^{2iχ} = λ0 / det C, so that the constant
/// eigenvalue equals the determinant and the dispersive pair is e^{±iω}.
/// Returns the gauge phase χ.
inline double gauge_phase_for(Complex det, Complex constant_eigenvalue) {
    return 0.5 * std::arg(constant_eigenvalue / det);
}

inline CoinClass classify_coin(const UnitaryCoin& coin, double tol = kClassifyTol) {
    const Mat3C& c = coin.matrix();
    if (!is_unitary(c, tol)) throw NotUnitary("classify_coin: coin is not unitary within tolerance");

    CoinClass out;
    const Complex det = c.det();
    out.det_phase = std::arg(det);
    const Minors m = compute_minors(coin);

    std::optional<Complex> best;
    double best_res = std::numeric_limits<double>::infinity();
    const auto consider = [&](Complex l0) {
        if (!std::isfinite(l0.real()) || !std::isfinite(l0.imag()) || std::abs(l0) < 1e-300) return;
        const double r = detail::point_spectrum_residual(c, m, det, l0);
        if (r < best_res) {
            best_res = r;
            best = l0;
        }
    };
    try {
        for (Complex r : cubic_roots(CubicPoly{-c(S, S), m.S, -det})) consider(r);
    } catch (const NonConvergence&) {
    }
    if (std::abs(c(L, L)) > 1e-6) consider(m.R / c(L, L));
    if (std::abs(c(R, R)) > 1e-6) consider(m.L / c(R, R));

    out.condition_residual = best_res;
    if (!best || best_res > tol) return out;

    const Complex l0 = *best / std::abs(*best);
    out.constant_eigenvalue = l0;
    out.gauge_phase = gauge_phase_for(det, l0);
    Mat3C cn = c;
    cn *= cis(out.gauge_phase);
    out.normalized_phase = std::arg(cis(out.gauge_phase) * l0);

    if (std::abs(cn(L, L)) <= tol && std::abs(cn(R, R)) <= tol) {
        out.kind = std::abs(std::abs(cn(L, R)) - 1.0) <= tol ? CoinKind::PurePoint_Theta13
                                                            : CoinKind::PurePoint_Theta12Theta23;
    } else if (std::max({std::abs(cn(L, S)), std::abs(cn(R, S)), std::abs(cn(S, L)), std::abs(cn(S, R))}) <= tol) {
        out.kind = CoinKind::Decoupled;
    } else if (std::abs(std::sin(out.normalized_phase)) <= tol) {
        out.kind = CoinKind::Class1;
        out.also_class2 = std::abs(cn(L, R)) <= tol;
    } else {
        out.kind = CoinKind::Class2;
    }
    return out;
}

/// Coin multiplied by the gauge phase reported by the classifier; a reporting
/// transformation only.
inline Mat3C gauge_normalized(const UnitaryCoin& coin, const CoinClass& cls) {
    Mat3C m = coin.matrix();
    m *= cis(cls.gauge_phase);
    return m;
}

struct ExtractedDispersion {
    double rho = 0.0;
    double gamma = 0.0;
    double mu = 0.0;
    double phi = 0.0;

    DispersionParams params() const { return {rho, mu, gamma}; }
};

/// Reads ρ, γ, μ, φ off the diagonal of the gauge-normalized coin:
/// C_LL = C_RR* = ρ e^{iγ}, C_SS = e^{iφ} − 2μ.
inline ExtractedDispersion extract_dispersion_params(const UnitaryCoin& coin, double tol = kClassifyTol) {
    const CoinClass cls = classify_coin(coin, tol);
    if (!cls.has_point_spectrum()) throw InconsistentCoin("coin has no k-independent eigenvalue");
    const Mat3C cn = gauge_normalized(coin, cls);
    if (std::abs(cn(L, L) - std::conj(cn(R, R))) > tol)
        throw InconsistentCoin("C_LL != conj(C_RR) after gauge normalization");
    ExtractedDispersion out;
    out.phi = cls.normalized_phase;
    out.rho = std::abs(cn(L, L));
    out.gamma = out.rho > 0.0 ? std::arg(cn(L, L)) : 0.0;
    const Complex mu = 0.5 * (cis(out.phi) - cn(S, S));
    if (std::abs(mu.imag()) > tol) throw InconsistentCoin("mu has a non-zero imaginary part");
    out.mu = mu.real();
    return out;
}

} // namespace qw3
