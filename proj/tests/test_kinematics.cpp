#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "qw3/kinematics.hpp"

using namespace qw3;
using Catch::Matchers::WithinAbs;

TEST_CASE("group_velocity") {
    for (double k : {-2.0, 0.1, 3.0}) CHECK(group_velocity({0.0, 0.3, 0.0}, k) == 0.0);
    CHECK_THAT(group_velocity({0.5, 0.2, 0.4}, 0.4), WithinAbs(0.0, 1e-15));
    const DispersionParams g{1.0 / 3.0, 2.0 / 3.0, kPi};
    CHECK_THAT(group_velocity(g, kPi + kPi / 2), WithinAbs(1.0 / std::sqrt(5.0), 1e-14));
    CHECK_THAT(group_velocity(g, kPi + kPi / 2), WithinAbs(0.4472135954999579, 1e-14));
    // Grover touches cos ω = −1 at k = 0
    CHECK_THROWS_AS(group_velocity(g, 0.0), BandEdge);
}

TEST_CASE("peak_velocity fixed examples") {
    SECTION("Grover is degenerate and uses the fallback") {
        const PeakVelocityResult r = peak_velocity({1.0 / 3.0, 2.0 / 3.0, kPi});
        CHECK(r.method == PeakMethod::numeric_fallback);
        CHECK_THAT(r.v_peak, WithinAbs(1.0 / std::sqrt(3.0), 1e-8));
    }
    SECTION("first family at theta13 = 0, theta23 = pi/4") {
        const PeakVelocityResult r = peak_velocity({std::sqrt(0.5), 0.25, 0.0});
        CHECK(r.method == PeakMethod::closed_form);
        REQUIRE(r.delta);
        // frozen from the independent grid maximizer
        CHECK_THAT(*r.delta, WithinAbs(-0.508567880220796, 1e-12));
        CHECK_THAT(r.v_peak, WithinAbs(0.768051397498532, 1e-12));
        CHECK_THAT(r.v_peak, WithinAbs(oracle::brute_peak_velocity(std::sqrt(0.5), 0.25), 1e-8));
        CHECK_THAT(std::cos(r.k0), WithinAbs(*r.delta, 1e-12));
        CHECK_THAT(group_velocity({std::sqrt(0.5), 0.25, 0.0}, r.k0), WithinAbs(r.v_peak, 1e-12));
    }
    SECTION("special cases") {
        CHECK(peak_velocity({0.9, 0.0, 0.3}).v_peak == 0.9);
        CHECK(peak_velocity({0.0, 0.4, 0.3}).v_peak == 0.0);
    }
}

TEST_CASE("peak_velocity does not depend on gamma") {
    std::mt19937_64 rng(41);
    for (int n = 0; n < 100; ++n) {
        const double rho = oracle::uniform(rng, 0.0, 1.0);
        const double mu = oracle::uniform(rng, -(1.0 - rho), 1.0 - rho);
        const PeakVelocityResult r0 = peak_velocity({rho, mu, 0.0});
        for (double g : {1.0, 2.0, 3.0}) {
            const PeakVelocityResult r = peak_velocity({rho, mu, g});
            CHECK(std::abs(r.v_peak - r0.v_peak) <= 1e-12);
            if (r.delta) CHECK(std::abs(*r.delta - *r0.delta) <= 1e-12);
        }
    }
}

TEST_CASE("closed form agrees with the numeric maximizer") {
    std::mt19937_64 rng(42);
    int tested = 0;
    while (tested < 500) {
        const double rho = oracle::uniform(rng, 0.01, 1.0);
        const double mu = oracle::uniform(rng, -(1.0 - rho), 1.0 - rho);
        if (discriminant(rho, mu) <= 1e-6 || std::abs(mu) < 1e-6) continue;
        ++tested;
        const PeakVelocityResult c = peak_velocity({rho, mu, 0.5});
        REQUIRE(c.method == PeakMethod::closed_form);
        const PeakVelocityResult n = peak_velocity_numeric({rho, mu, 0.5});
        CHECK(std::abs(c.v_peak - n.v_peak) < 1e-8);
        CHECK(c.v_peak >= 0.0);
        CHECK(c.v_peak <= 1.0);
    }
}

TEST_CASE("family dispersion parameters") {
    SECTION("first family") {
        CHECK(c1_dispersion_params(kPi / 2, 0.7).rho < 1e-15);
        const DispersionParams g = c1_dispersion_params(std::asin(2.0 / 3.0), std::acos(-1.0 / std::sqrt(5.0)));
        CHECK_THAT(g.rho, WithinAbs(1.0 / 3.0, 1e-14));
        CHECK_THAT(g.mu, WithinAbs(2.0 / 3.0, 1e-14));
        CHECK_THAT(std::abs(g.gamma), WithinAbs(kPi, 1e-14));
        const DispersionParams q = c1_dispersion_params(0.0, kPi / 4);
        CHECK_THAT(q.rho, WithinAbs(std::sqrt(0.5), 1e-14));
        CHECK_THAT(q.mu, WithinAbs(0.25, 1e-14));
    }
    SECTION("second family") {
        const double kappa = kPi / 5;
        CHECK(c2_dispersion_params(kPi / 2 - kappa, kappa, kPi / 2).rho < 1e-15);
        CHECK(peak_velocity(c2_dispersion_params(kPi / 2 - kappa, kappa, -kPi / 2)).v_peak < 1e-15);
        CHECK_THAT(peak_velocity(c2_dispersion_params(kPi / 2 - kappa, kappa, 0.0)).v_peak, WithinAbs(std::cos(kappa), 1e-12));
        CHECK_THAT(peak_velocity(c2_dispersion_params(kPi / 2 - kappa, kappa, 0.0)).v_peak, WithinAbs(0.8090169943749475, 1e-12));
        const DispersionParams free = c2_dispersion_params(kPi / 2, 0.0, 0.0);
        CHECK_THAT(free.rho, WithinAbs(1.0, 1e-15));
        CHECK_THAT(free.mu, WithinAbs(0.0, 1e-15));
        CHECK_THAT(peak_velocity(free).v_peak, WithinAbs(1.0, 1e-15));
        CHECK_THROWS_AS(c2_dispersion_params(-0.01, kappa, 0.3), InvalidC2Params);
    }
    SECTION("agreement with the coin's diagonal") {
        std::mt19937_64 rng(43);
        for (int n = 0; n < 50; ++n) {
            const C1Params p = oracle::random_c1(rng);
            const DispersionParams d = c1_dispersion_params(p.theta13, p.theta23, p.gamma2 + p.gamma4);
            const ExtractedDispersion e = extract_dispersion_params(build_c1(p));
            CHECK_THAT(d.rho, WithinAbs(e.rho, 1e-10));
            CHECK_THAT(d.mu, WithinAbs(e.mu, 1e-10));
            CHECK(std::abs(std::remainder(d.gamma - e.gamma, 2.0 * kPi)) < 1e-9);

            const C2Params q = oracle::random_c2(rng);
            const DispersionParams d2 = c2_dispersion_params(q.delta, q.kappa(), q.theta23, q.gamma1);
            const ExtractedDispersion e2 = extract_dispersion_params(build_c2(q));
            CHECK_THAT(d2.rho, WithinAbs(e2.rho, 1e-10));
            CHECK_THAT(d2.mu, WithinAbs(e2.mu, 1e-10));
            CHECK(std::abs(std::remainder(d2.gamma - e2.gamma, 2.0 * kPi)) < 1e-9);
        }
    }
}

TEST_CASE("cusp curve") {
    const CuspBranches z = c1_cusp_curve(0.0);
    CHECK_THAT(z.theta23_plus, WithinAbs(0.0, 1e-7));
    CHECK_THAT(z.theta23_minus, WithinAbs(kPi, 1e-7));

    const CuspBranches g = c1_cusp_curve(std::asin(2.0 / 3.0));
    CHECK_THAT(std::cos(g.theta23_plus), WithinAbs(1.0 / std::sqrt(5.0), 1e-14));
    CHECK_THAT(std::cos(g.theta23_minus), WithinAbs(-1.0 / std::sqrt(5.0), 1e-14));

    const CuspBranches top = c1_cusp_curve(kPi / 2);
    CHECK_THAT(top.theta23_plus, WithinAbs(kPi / 2, 1e-12));

    CHECK_THROWS_AS(c1_cusp_curve(-kPi / 2), DomainError);
    CHECK_THROWS_AS(c1_cusp_curve(-1.0), DomainError);

    // the discriminant vanishes on the curve, which is where v_peak = √ρ
    for (int i = 0; i <= 40; ++i) {
        const double t13 = kPi / 2 * i / 40.0;
        const CuspBranches b = c1_cusp_curve(t13);
        for (double t23 : {b.theta23_plus, b.theta23_minus, -b.theta23_plus}) {
            const DispersionParams d = c1_dispersion_params(t13, t23);
            CHECK(std::abs(discriminant(d.rho, d.mu)) < 1e-10);
            CHECK_THAT(d.rho + d.mu, WithinAbs(1.0, 1e-12));
        }
    }
}

TEST_CASE("family maxima") {
    CHECK_THAT(c1_vmax(0.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(c1_vmax(kPi / 2), WithinAbs(0.0, 1e-8));
    CHECK_THAT(c1_vmax(std::acos(1.0 / std::sqrt(5.0))), WithinAbs(1.0 / std::sqrt(3.0), 1e-12));
    CHECK_THAT(c2_vmax(0.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(c2_vmax(kPi / 2), WithinAbs(0.0, 1e-15));
    CHECK_THAT(c2_vmax(kPi / 5), WithinAbs(0.8090169943749475, 1e-15));

    // c1_vmax dominates the grid and is attained on the cusp
    for (int j = 0; j < 11; ++j) {
        const double t23 = -kPi / 2 + kPi * j / 10.0;
        const double vmax = c1_vmax(t23);
        double best = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double t13 = -kPi / 2 + kPi * i / 100.0;
            const double v = peak_velocity(c1_dispersion_params(t13, t23)).v_peak;
            CHECK(v <= vmax + 1e-9);
            best = std::max(best, v);
        }
        CHECK(best <= vmax + 1e-9);
    }
    for (double t23 : {0.3, 1.0, 2.0}) {
        // cusp point with cos θ23 = c13/(1+s13) for θ13 ∈ (−π/2, π/2)
        const double x = std::abs(std::cos(t23));
        const double t13 = std::asin((1.0 - x * x) / (1.0 + x * x));
        CHECK_THAT(peak_velocity(c1_dispersion_params(t13, t23)).v_peak, WithinAbs(c1_vmax(t23), 1e-8));
    }
}

TEST_CASE("second family maximum over the admissible grid") {
    for (int j = 0; j < 11; ++j) {
        const double kappa = -kPi / 2 + kPi * j / 10.0;
        double best = 0.0;
        for (int a = 0; a < 120; ++a) {
            const double delta = -kPi + 2.0 * kPi * (a + 0.5) / 120.0;
            if (!c2_admissible(delta, kappa)) continue;
            for (int b = 0; b <= 40; ++b) {
                const double t23 = -kPi / 2 + kPi * b / 40.0;
                const double v = peak_velocity(c2_dispersion_params(delta, kappa, t23)).v_peak;
                CHECK(v <= c2_vmax(kappa) + 1e-9);
                best = std::max(best, v);
            }
        }
        if (std::abs(std::cos(kappa)) > 1e-9) {
            CHECK_THAT(peak_velocity(c2_dispersion_params(kPi / 2 - kappa, kappa, 0.0)).v_peak,
                       WithinAbs(c2_vmax(kappa), 1e-6));
        }
    }
}
