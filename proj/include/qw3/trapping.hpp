#pragma once

// Asymptotic trapping at the origin. For a localizing coin the stationary
// state v(k) of the constant eigenvalue is a single harmonic
// v(k) = w0 + e^{ik} w1, its squared norm is n(k) = a − 2b cos(k − c), and
// the limiting amplitudes reduce to the integrals I_n = ∫ dk/2π e^{ink}/n(k).

#include <cmath>
#include <optional>
#include <variant>

#include "qw3/coins.hpp"
#include "qw3/errors.hpp"
#include "qw3/linalg.hpp"
#include "qw3/quadrature.hpp"
#include "qw3/spectrum.hpp"

namespace qw3 {

/// v(k) = w0 + e^{ik} w1.
struct Harmonic {
    Vec3C w0, w1;

    Vec3C operator()(double k) const { return w0 + cis(k) * w1; }
};

inline Harmonic stationary_harmonic(const C1Params& p) {
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const double hp = std::sin(0.5 * p.theta13) + std::cos(0.5 * p.theta13);
    const double hm = std::sin(0.5 * p.theta13) - std::cos(0.5 * p.theta13);
    Harmonic h;
    h.w0 = Vec3C{{-cis(-p.gamma5) * hp * s23, cis(p.gamma4 - p.gamma5) * hp * c23, 0.0}};
    h.w1 = Vec3C{{0.0, cis(-(p.gamma2 + p.gamma5)) * hm, -hp * s23}};
    return h;
}

inline Harmonic stationary_harmonic(const C2Params& p) {
    c2_derived(p); // validates
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const double sd = std::sin(p.delta);
    const double s2 = std::sin(p.delta + 2.0 * p.kappa());
    const double sigma = std::sin(p.delta + p.kappa()) < 0.0 ? -1.0 : 1.0;
    const double root = sigma * std::sqrt(std::max(0.0, sd * s2));
    Harmonic h;
    h.w0 = Vec3C{{cis(p.gamma2 + p.gamma4) * sd * s23, -cis(p.gamma1 + p.gamma4) * sd * c23, 0.0}};
    h.w1 = Vec3C{{0.0, cis(p.gamma4) * root, cis(p.gamma1 + p.gamma5) * sd * s23}};
    return h;
}

inline Harmonic stationary_harmonic(const FamilyParams& fp) {
    return std::visit([](const auto& p) { return stationary_harmonic(p); }, fp);
}

/// Non-normalized eigenvector of Ũ(k) for the constant eigenvalue
/// (1 for the first family, e^{iκ} for the second).
inline Vec3C stationary_state(const FamilyParams& fp, double k) { return stationary_harmonic(fp)(k); }

inline Complex constant_eigenvalue(const FamilyParams& fp) {
    if (const auto* p2 = std::get_if<C2Params>(&fp)) return cis(p2->kappa());
    return 1.0;
}

/// ‖v(k)‖² = a − 2b cos(k − c).
struct NormFactors {
    double a = 0.0, b = 0.0, c = 0.0;

    double operator()(double k) const { return a - 2.0 * b * std::cos(k - c); }
};

inline NormFactors norm_factors(const C1Params& p) {
    const double s13 = std::sin(p.theta13), c13 = std::cos(p.theta13);
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    return {2.0 + (1.0 + s13) * s23 * s23, c13 * c23, p.gamma2 + p.gamma4};
}

inline NormFactors norm_factors(const C2Params& p) {
    const C2Derived d = c2_derived(p);
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const double sd = std::sin(p.delta);
    const double s2 = std::sin(p.delta + 2.0 * d.kappa);
    const double sdk = std::sin(p.delta + d.kappa);
    // B sin(δ+κ) = sign(sin(δ+κ)) √(sin δ sin(δ+2κ))
    return {sd * (sd * (1.0 + s23 * s23) + s2), sd * c23 * d.B * sdk, p.gamma1};
}

inline NormFactors norm_factors(const FamilyParams& fp) {
    return std::visit([](const auto& p) { return norm_factors(p); }, fp);
}

/// I0 = ∫ dk/2π 1/n(k) and I1 = ∫ dk/2π e^{ik}/n(k); I₋₁ = conj(I1).
struct ResidueIntegrals {
    double I0 = 0.0;
    Complex I1;

    /// I1 e^{−ic}: real, carrying the sign of b.
    double J = 0.0;

    Complex Im1() const { return std::conj(I1); }
};

inline constexpr double kPoleTol = 1e-12;

inline ResidueIntegrals residue_integrals(const NormFactors& nf) {
    const double a = nf.a, b = nf.b;
    if (a <= 2.0 * std::abs(b) + kPoleTol) throw PoleOnContour("norm factor vanishes on the unit circle");
    const double s = std::sqrt((a - 2.0 * b) * (a + 2.0 * b));
    ResidueIntegrals r;
    r.I0 = 1.0 / s;
    // (a/s − 1)/(2b) rewritten without cancellation; equals 0 at b = 0
    r.J = 2.0 * b / (s * (a + s));
    r.I1 = r.J * cis(nf.c);
    return r;
}

/// Limiting amplitudes: psi[j] is the asymptotic amplitude triple at the
/// origin for the walker started at the origin in coin state j.
struct TrappingResult {
    Vec3C psi_L, psi_S, psi_R;
    double P_infinity = 0.0;   ///< family closed form
    double P_quadrature = 0.0; ///< defining integral evaluated numerically

    const Vec3C& psi(int j) const { return j == L ? psi_L : (j == S ? psi_S : psi_R); }
};

inline constexpr double kClosedFormTol = 1e-8;

/// M_{ij} = ∫ dk/2π v_i(k) conj(v_j(k)) / n(k), whose column j is ψ^j.
inline Mat3C amplitude_matrix(const Harmonic& h, const ResidueIntegrals& ri) {
    Mat3C m = ri.I0 * (outer(h.w0, h.w0) + outer(h.w1, h.w1));
    m += ri.I1 * outer(h.w1, h.w0);
    m += ri.Im1() * outer(h.w0, h.w1);
    return m;
}

inline Mat3C amplitude_matrix_quadrature(const Harmonic& h, const NormFactors& nf, double tol = kQuadratureTol) {
    return brillouin_average(
        [&](double k) {
            const Vec3C v = h(k);
            return (1.0 / nf(k)) * outer(v, v);
        },
        tol);
}

inline double trapping_from_amplitudes(const Mat3C& m) { return frobenius_norm2(m) / 3.0; }

/// Closed-form P∞ of the first family; depends on (θ13, θ23) only.
inline double trapping_closed_form(const C1Params& p) {
    const NormFactors nf = norm_factors(p);
    const ResidueIntegrals ri = residue_integrals(nf);
    const double I0 = ri.I0, J = ri.J;
    const double s13 = std::sin(p.theta13), c13 = std::cos(p.theta13);
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const double c2 = c23 * c23, s2 = s23 * s23;
    const double t0 = 1.0 + c2 * c2 + 0.5 * (2.0 + s2) * (2.0 + s2) + (s13 * s13 + 2.0 * s13 - 0.5) * s2 * s2;
    const double t1 = c13 * c23 * (1.0 + c2 + (2.0 + s13) * s2);
    const double t2 = (1.0 + s13) * (c2 * s13 - 1.0);
    return I0 * I0 * t0 / 3.0 - 4.0 / 3.0 * I0 * J * t1 - 4.0 / 3.0 * J * J * t2;
}

/// Closed-form P∞ of the second family; depends on the phases only through κ.
inline double trapping_closed_form(const C2Params& p) {
    const NormFactors nf = norm_factors(p);
    const ResidueIntegrals ri = residue_integrals(nf);
    const double I0 = ri.I0, J = ri.J;
    const double kappa = p.kappa();
    const double sd = std::sin(p.delta), s2 = std::sin(p.delta + 2.0 * kappa);
    const double sigma = std::sin(p.delta + kappa) < 0.0 ? -1.0 : 1.0;
    const double root = sigma * std::sqrt(std::max(0.0, sd * s2));
    const double c23 = std::cos(p.theta23), s23 = std::sin(p.theta23);
    const double cc = c23 * c23, ss = s23 * s23;
    const double u = cc * sd + s2;
    const double t0 = sd * sd * (u * u + 2.0 * sd * sd * ss * ss + 2.0 * sd * ss * u);
    const double t2 = sd * sd * sd * (sd * ss + (1.0 + cc) * s2);
    const double t1 = c23 * sd * sd * root * ((1.0 + ss) * sd + s2);
    return I0 * I0 * t0 / 3.0 + 2.0 / 3.0 * J * J * t2 - 4.0 / 3.0 * I0 * J * t1;
}

inline double trapping_closed_form(const FamilyParams& fp) {
    return std::visit([](const auto& p) { return trapping_closed_form(p); }, fp);
}

/// Amplitudes and P∞ from the residue closed forms, checked against
/// quadrature of the defining integrals; throws ClosedFormMismatch if any
/// component or P∞ disagrees by more than `tol`.
inline TrappingResult limiting_amplitudes(const FamilyParams& fp, double tol = kClosedFormTol) {
    const Harmonic h = stationary_harmonic(fp);
    const NormFactors nf = norm_factors(fp);
    const ResidueIntegrals ri = residue_integrals(nf);

    const Mat3C closed = amplitude_matrix(h, ri);
    const Mat3C quad = amplitude_matrix_quadrature(h, nf);
    for (std::size_t i = 0; i < 9; ++i) {
        const double d = std::abs(closed.a[i] - quad.a[i]);
        if (d > tol) throw ClosedFormMismatch("limiting amplitude component", std::abs(closed.a[i]), std::abs(quad.a[i]));
    }

    TrappingResult out;
    out.psi_L = closed.col(L);
    out.psi_S = closed.col(S);
    out.psi_R = closed.col(R);
    out.P_infinity = trapping_closed_form(fp);
    out.P_quadrature = trapping_from_amplitudes(quad);
    if (std::abs(out.P_infinity - out.P_quadrature) > tol)
        throw ClosedFormMismatch("trapping probability", out.P_infinity, out.P_quadrature);
    return out;
}

/// Trapping of an arbitrary coin from the eigenprojector of its constant
/// eigenvalue, integrated over the Brillouin zone. Returns 0 for coins
/// without point spectrum. Coins on a trivial branch (every eigenvalue
/// constant, or a decoupled middle state) are rejected with DomainError since
/// the projector is not a smooth function of k there.
inline double numeric_trapping(const UnitaryCoin& coin, double tol = 1e-10) {
    const CoinClass cls = classify_coin(coin);
    if (!cls.has_point_spectrum()) return 0.0;
    if (cls.kind != CoinKind::Class1 && cls.kind != CoinKind::Class2)
        throw DomainError("numeric_trapping supports Class1 and Class2 coins only");
    const Complex l0 = *cls.constant_eigenvalue;
    const Mat3C m = brillouin_average(
        [&](double k) {
            const EigenSystem es = eigensystem(evolution_at_k(coin, k));
            std::size_t best = 0;
            for (std::size_t j = 1; j < 3; ++j)
                if (std::abs(es.eigenvalues[j] - l0) < std::abs(es.eigenvalues[best] - l0)) best = j;
            const Vec3C& u = es.eigenvectors[best];
            return outer(u, u);
        },
        tol);
    return trapping_from_amplitudes(m);
}

} // namespace qw3
