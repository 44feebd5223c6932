#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "qw3/trapping.hpp"

using namespace qw3;
using Catch::Matchers::WithinAbs;

namespace {

const C1Params kGrover{0.0, 0.0, 0.0, std::asin(2.0 / 3.0), std::acos(-1.0 / std::sqrt(5.0))};

// Frozen from the periodic trapezoid oracle (4096 points) and the closed form;
// the two agree to 1e-16.
constexpr double kGroverI0 = 0.30618621784789724;
constexpr double kGroverI1 = -0.030931089239486398;
constexpr double kGroverP = 0.16836752405607291;

double eigen_residual(const FamilyParams& fp, double k) {
    const Vec3C v = stationary_state(fp, k);
    const Mat3C u = evolution_at_k(build_coin(fp), k);
    return (u * v - constant_eigenvalue(fp) * v).norm() / v.norm();
}

} // namespace

TEST_CASE("stationary states are eigenvectors of the walk operator") {
    CHECK(eigen_residual(kGrover, 0.0) < 1e-10);

    std::mt19937_64 rng(51);
    for (int n = 0; n < 100; ++n) {
        const FamilyParams p1 = oracle::random_c1(rng);
        const FamilyParams p2 = oracle::random_c2(rng);
        for (int i = 0; i < 16; ++i) {
            const double k = -kPi + 2.0 * kPi * i / 16.0 + 0.1;
            CHECK(eigen_residual(p1, k) < 1e-10);
            CHECK(eigen_residual(p2, k) < 1e-10);
        }
    }
}

TEST_CASE("stationary state special cases") {
    const Vec3C v = stationary_state(C1Params{0.2, 0.3, 0.4, 0.5, 0.0}, 0.7);
    CHECK(std::abs(v[L]) + std::abs(v[R]) < 1e-15);
    CHECK(std::abs(v[S]) > 0.1);

    const double kappa = kPi / 5, delta = kPi / 2 - kappa;
    for (double k : {0.0, 1.1}) {
        const Vec3C w = stationary_state(C2Params{-kappa, 0.0, 0.0, 0.0, delta, 0.0}, k);
        CHECK(std::abs(w[L]) < 1e-15);
        CHECK(std::abs(w[R]) < 1e-15);
        const Complex root = std::sqrt(std::sin(delta) * std::sin(delta + 2 * kappa));
        CHECK(std::abs(w[S] - (-std::sin(delta) * cis(-kappa) + cis(k) * root)) < 1e-14);
    }
    CHECK_THROWS_AS(stationary_state(C2Params{-kappa, 0.0, 0.0, 0.0, -0.01, 0.3}, 0.0), InvalidC2Params);
}

TEST_CASE("norm factors") {
    const NormFactors g = norm_factors(kGrover);
    CHECK_THAT(g.a, WithinAbs(10.0 / 3.0, 1e-14));
    CHECK_THAT(g.b, WithinAbs(-1.0 / 3.0, 1e-14));
    CHECK_THAT(g.c, WithinAbs(0.0, 1e-15));

    const NormFactors flat = norm_factors(C1Params{0.1, 0.2, 0.3, 0.4, kPi / 2});
    CHECK_THAT(flat.a, WithinAbs(3.0 + std::sin(0.4), 1e-14));
    CHECK_THAT(flat.b, WithinAbs(0.0, 1e-15));

    std::mt19937_64 rng(52);
    for (int n = 0; n < 100; ++n) {
        const FamilyParams fp = n % 2 ? FamilyParams{oracle::random_c1(rng)} : FamilyParams{oracle::random_c2(rng)};
        const NormFactors nf = norm_factors(fp);
        double grid_min = 1e300;
        for (int i = 0; i < 256; ++i) {
            const double k = -kPi + 2.0 * kPi * i / 256.0;
            const double n2 = stationary_state(fp, k).norm2();
            CHECK_THAT(n2, WithinAbs(nf(k), 1e-10));
            grid_min = std::min(grid_min, n2);
        }
        // the minimum a − 2|b| sits at k = c or c + π, off-grid in general
        CHECK(grid_min >= nf.a - 2.0 * std::abs(nf.b) - 1e-10);
        CHECK(grid_min - (nf.a - 2.0 * std::abs(nf.b)) < 2.0 * std::abs(nf.b) * (1.0 - std::cos(kPi / 256.0)) + 1e-10);
    }
    CHECK_THROWS_AS(norm_factors(C2Params{-kPi / 5, 0.0, 0.0, 0.0, -0.01, 0.3}), InvalidC2Params);
}

TEST_CASE("residue integrals") {
    const ResidueIntegrals g = residue_integrals(norm_factors(kGrover));
    CHECK_THAT(g.I0, WithinAbs(3.0 / (4.0 * std::sqrt(6.0)), 1e-15));
    CHECK_THAT(g.I0, WithinAbs(kGroverI0, 1e-15));
    CHECK_THAT(g.I1.real(), WithinAbs(kGroverI1, 1e-15));
    CHECK_THAT(g.I1.imag(), WithinAbs(0.0, 1e-15));

    const ResidueIntegrals flat = residue_integrals({2.0, 0.0, 0.3});
    CHECK(flat.I0 == 0.5);
    CHECK(flat.I1 == Complex(0.0));

    CHECK_THROWS_AS(residue_integrals({2.0, 1.0, 0.0}), PoleOnContour);
    CHECK_THROWS_AS(residue_integrals({2.0, -1.0 + 1e-14, 0.0}), PoleOnContour);

    std::mt19937_64 rng(53);
    for (int n = 0; n < 100; ++n) {
        const double b = oracle::uniform(rng, -2.0, 2.0);
        const NormFactors nf{2.0 * std::abs(b) + oracle::uniform(rng, 0.05, 3.0), b, oracle::uniform(rng, -kPi, kPi)};
        const ResidueIntegrals r = residue_integrals(nf);
        for (int m : {-1, 0, 1}) {
            const Complex ref = oracle::periodic_mean([&](double k) { return cis(m * k) / nf(k); }, 8192);
            const Complex closed = m == 0 ? Complex(r.I0) : (m == 1 ? r.I1 : r.Im1());
            CHECK(std::abs(closed - ref) < 1e-10);
        }
        CHECK(std::abs(r.I1) <= r.I0);
    }
}

TEST_CASE("Gauss-Legendre quadrature") {
    CHECK_THAT(integrate([](double x) { return std::exp(x); }, 0.0, 1.0), WithinAbs(std::exp(1.0) - 1.0, 1e-14));
    const Complex z = brillouin_average([](double k) { return cis(2.0 * k) / (3.0 - std::cos(k)); });
    const Complex ref = oracle::periodic_mean([](double k) { return cis(2.0 * k) / (3.0 - std::cos(k)); });
    CHECK(std::abs(z - ref) < 1e-13);
}

TEST_CASE("limiting amplitudes: Grover fixture") {
    const TrappingResult r = limiting_amplitudes(kGrover);
    CHECK_THAT(r.P_infinity, WithinAbs(kGroverP, 1e-14));
    CHECK_THAT(r.P_quadrature, WithinAbs(kGroverP, 1e-12));
    const double sum = r.psi_L.norm2() + r.psi_S.norm2() + r.psi_R.norm2();
    CHECK_THAT(sum / 3.0, WithinAbs(r.P_infinity, 1e-12));

    // independent: eigenprojector of the coin matrix integrated by trapezoid
    const UnitaryCoin g = grover();
    const Mat3C m = oracle::periodic_mean(
        [&](double k) {
            const Vec3C v = stationary_state(kGrover, k);
            return (1.0 / v.norm2()) * outer(v, v);
        },
        4096);
    CHECK_THAT(frobenius_norm2(m) / 3.0, WithinAbs(kGroverP, 1e-13));
    CHECK_THAT(numeric_trapping(g), WithinAbs(kGroverP, 1e-10));
}

TEST_CASE("closed forms match quadrature on random draws") {
    std::mt19937_64 rng(54);
    for (int n = 0; n < 60; ++n) {
        const FamilyParams fp = n % 2 ? FamilyParams{oracle::random_c1(rng)} : FamilyParams{oracle::random_c2(rng)};
        const TrappingResult r = limiting_amplitudes(fp);
        const Harmonic h = stationary_harmonic(fp);
        const NormFactors nf = norm_factors(fp);
        const Mat3C ref = oracle::periodic_mean(
            [&](double k) {
                const Vec3C v = h(k);
                return (1.0 / nf(k)) * outer(v, v);
            },
            4096);
        for (int j = 0; j < 3; ++j) CHECK(max_abs_diff(r.psi(j), ref.col(j)) < 1e-8);
        CHECK_THAT(r.P_infinity, WithinAbs(frobenius_norm2(ref) / 3.0, 1e-8));
        CHECK(r.P_infinity >= 0.0);
        CHECK(r.P_infinity <= 1.0);
        CHECK_THAT(numeric_trapping(build_coin(fp)), WithinAbs(r.P_infinity, 1e-8));
    }
}

TEST_CASE("first family trapping is independent of the phases") {
    std::mt19937_64 rng(55);
    for (int n = 0; n < 10; ++n) {
        C1Params p = oracle::random_c1(rng);
        const double ref = limiting_amplitudes(p).P_infinity;
        for (int m = 0; m < 10; ++m) {
            p.gamma2 = oracle::uniform(rng, -kPi, kPi);
            p.gamma4 = oracle::uniform(rng, -kPi, kPi);
            p.gamma5 = oracle::uniform(rng, -kPi, kPi);
            CHECK(std::abs(limiting_amplitudes(p).P_infinity - ref) < 1e-10);
        }
    }
}

TEST_CASE("second family trapping depends on the phases only through kappa") {
    std::mt19937_64 rng(56);
    for (int n = 0; n < 10; ++n) {
        C2Params p = oracle::random_c2(rng);
        const double kappa = p.kappa();
        const double ref = limiting_amplitudes(p).P_infinity;
        for (int m = 0; m < 10; ++m) {
            p.gamma1 = oracle::uniform(rng, -kPi, kPi);
            p.gamma2 = oracle::uniform(rng, -kPi, kPi);
            p.gamma4 = kappa + p.gamma1 - p.gamma2;
            p.gamma5 = oracle::uniform(rng, -kPi, kPi);
            CHECK(std::abs(limiting_amplitudes(p).P_infinity - ref) < 1e-10);
        }
    }
}

TEST_CASE("trapping structural cases") {
    // decoupled middle state: an S-started walker never leaves the origin
    const C1Params dec{0.3, -0.2, 0.4, 0.6, 0.0};
    const TrappingResult r = limiting_amplitudes(dec);
    CHECK_THAT(std::abs(r.psi_S[S]), WithinAbs(1.0, 1e-12));
    CHECK(r.psi_L.norm2() + r.psi_R.norm2() < 1e-24);
    CHECK_THAT(r.P_infinity, WithinAbs(1.0 / 3.0, 1e-12));

    // second family at θ23 = 0: only sin δ, sin(δ+2κ) and the integrals remain
    // (δ = π/2 − κ would put a zero of the norm on the unit circle)
    const double kappa = kPi / 5, delta = 1.0;
    const C2Params p{-kappa, 0.0, 0.0, 0.0, delta, 0.0};
    const double sd = std::sin(delta), s2 = std::sin(delta + 2 * kappa);
    const NormFactors nf = norm_factors(p);
    const ResidueIntegrals ri = residue_integrals(nf);
    const double expected = ri.I0 * ri.I0 * sd * sd * (sd + s2) * (sd + s2) / 3.0 + 4.0 / 3.0 * ri.J * ri.J * sd * sd * sd * s2 -
                            4.0 / 3.0 * ri.I0 * ri.J * sd * sd * std::sqrt(sd * s2) * (sd + s2);
    CHECK_THAT(limiting_amplitudes(p).P_infinity, WithinAbs(expected, 1e-12));
}

TEST_CASE("numeric_trapping on other classes") {
    CHECK(numeric_trapping(dft3()) == 0.0);
    CHECK_THROWS_AS(numeric_trapping(build_c1({0.0, 0.0, 0.0, 0.4, 0.0})), DomainError);
}
