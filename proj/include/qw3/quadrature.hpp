#pragma once

// Composite Gauss–Legendre quadrature with panel doubling. Works for any value
// type closed under addition and scaling by a real (double, Complex, Vec3C,
// Mat3C).

#include <array>
#include <cmath>
#include <cstddef>

#include "qw3/errors.hpp"
#include "qw3/linalg.hpp"

namespace qw3 {

namespace detail {

inline double quad_distance(double a, double b) { return std::abs(a - b); }
inline double quad_distance(Complex a, Complex b) { return std::abs(a - b); }
inline double quad_distance(const Vec3C& a, const Vec3C& b) { return max_abs_diff(a, b); }
inline double quad_distance(const Mat3C& a, const Mat3C& b) { return max_abs_diff(a, b); }

inline constexpr int kGaussOrder = 16;

struct GaussRule {
    std::array<double, kGaussOrder> x{}, w{};
};

/// Nodes and weights on [−1, 1] by Newton iteration on P_n.
inline GaussRule make_gauss_rule() {
    GaussRule g;
    constexpr int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        g.x[static_cast<std::size_t>(i)] = x;
        g.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

inline const GaussRule& gauss_rule() {
    static const GaussRule g = make_gauss_rule();
    return g;
}

template <class F>
auto composite_gauss(F&& f, double a, double b, int panels) {
    const GaussRule& g = gauss_rule();
    const double h = (b - a) / panels;
    using T = decltype(f(a));
    T sum{};
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < g.x.size(); ++i) sum = sum + (0.5 * h * g.w[i]) * f(mid + 0.5 * h * g.x[i]);
    }
    return sum;
}

} // namespace detail

inline constexpr double kQuadratureTol = 1e-12;

/// ∫_a^b f, doubling the number of panels until two successive estimates
/// differ by less than `tol`.
template <class F>
auto integrate(F&& f, double a, double b, double tol = kQuadratureTol, int max_panels = 1 << 12) {
    int panels = 2;
    auto prev = detail::composite_gauss(f, a, b, panels);
    while (panels < max_panels) {
        panels *= 2;
        auto next = detail::composite_gauss(f, a, b, panels);
        if (detail::quad_distance(next, prev) < tol) return next;
        prev = next;
    }
    throw NonConvergence("quadrature did not converge");
}

/// (1/2π) ∫_{−π}^{π} f(k) dk.
template <class F>
auto brillouin_average(F&& f, double tol = kQuadratureTol) {
    const auto v = integrate(f, -kPi, kPi, tol);
    return (1.0 / (2.0 * kPi)) * v;
}

} // namespace qw3
