#pragma once

// Fixed-size complex linear algebra for the three internal states of the walk.
// Rows and columns are indexed in the order (L, S, R).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "qw3/errors.hpp"

namespace qw3 {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

/// Internal coin state labels; used as indices into Vec3C / Mat3C.
enum Dir : int { L = 0, S = 1, R = 2 };

struct Vec3C {
    std::array<Complex, 3> e{};

    constexpr Complex& operator[](int i) { return e[static_cast<std::size_t>(i)]; }
    constexpr const Complex& operator[](int i) const { return e[static_cast<std::size_t>(i)]; }

    static constexpr Vec3C basis(int i) {
        Vec3C v;
        v[i] = 1.0;
        return v;
    }

    double norm2() const { return std::norm(e[0]) + std::norm(e[1]) + std::norm(e[2]); }
    double norm() const { return std::sqrt(norm2()); }

    Vec3C& operator+=(const Vec3C& o) {
        for (int i = 0; i < 3; ++i) (*this)[i] += o[i];
        return *this;
    }
    Vec3C& operator-=(const Vec3C& o) {
        for (int i = 0; i < 3; ++i) (*this)[i] -= o[i];
        return *this;
    }
    Vec3C& operator*=(Complex s) {
        for (auto& x : e) x *= s;
        return *this;
    }
    friend Vec3C operator+(Vec3C a, const Vec3C& b) { return a += b; }
    friend Vec3C operator-(Vec3C a, const Vec3C& b) { return a -= b; }
    friend Vec3C operator*(Complex s, Vec3C a) { return a *= s; }
    friend Vec3C operator*(Vec3C a, Complex s) { return a *= s; }
};

/// Hermitian inner product, conjugate-linear in the first argument.
inline Complex dot(const Vec3C& a, const Vec3C& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

/// Bilinear cross product; `cross(a, b)` annihilates both a and b under the
/// bilinear (unconjugated) pairing.
inline Vec3C cross(const Vec3C& a, const Vec3C& b) {
    return Vec3C{{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}

inline Vec3C conj(const Vec3C& a) { return Vec3C{{std::conj(a[0]), std::conj(a[1]), std::conj(a[2])}}; }

inline double max_abs_diff(const Vec3C& a, const Vec3C& b) {
    double m = 0.0;
    for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct Mat3C {
    std::array<Complex, 9> a{};

    constexpr Complex& operator()(int r, int c) { return a[static_cast<std::size_t>(3 * r + c)]; }
    constexpr const Complex& operator()(int r, int c) const { return a[static_cast<std::size_t>(3 * r + c)]; }

    static constexpr Mat3C identity() { return diagonal(1.0, 1.0, 1.0); }
    static constexpr Mat3C diagonal(Complex d0, Complex d1, Complex d2) {
        Mat3C m;
        m(0, 0) = d0;
        m(1, 1) = d1;
        m(2, 2) = d2;
        return m;
    }
    static Mat3C from_rows(const std::array<std::array<Complex, 3>, 3>& rows) {
        Mat3C m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        return m;
    }

    Vec3C row(int r) const { return Vec3C{{(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}}; }
    Vec3C col(int c) const { return Vec3C{{(*this)(0, c), (*this)(1, c), (*this)(2, c)}}; }

    Mat3C adjoint() const {
        Mat3C m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = std::conj((*this)(c, r));
        return m;
    }

    Complex trace() const { return (*this)(0, 0) + (*this)(1, 1) + (*this)(2, 2); }

    Complex det() const {
        const auto& m = *this;
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }

    Mat3C& operator*=(Complex s) {
        for (auto& x : a) x *= s;
        return *this;
    }
    friend Mat3C operator*(Complex s, Mat3C m) { return m *= s; }
    Mat3C& operator+=(const Mat3C& y) {
        for (std::size_t i = 0; i < 9; ++i) a[i] += y.a[i];
        return *this;
    }
    friend Mat3C operator+(Mat3C x, const Mat3C& y) { return x += y; }
    friend Mat3C operator-(Mat3C x, const Mat3C& y) {
        for (std::size_t i = 0; i < 9; ++i) x.a[i] -= y.a[i];
        return x;
    }
};

inline Mat3C mat_mul(const Mat3C& A, const Mat3C& B) {
    Mat3C C;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) C(r, c) = A(r, 0) * B(0, c) + A(r, 1) * B(1, c) + A(r, 2) * B(2, c);
    return C;
}
inline Mat3C operator*(const Mat3C& A, const Mat3C& B) { return mat_mul(A, B); }

inline Vec3C operator*(const Mat3C& A, const Vec3C& v) {
    Vec3C out;
    for (int r = 0; r < 3; ++r) out[r] = A(r, 0) * v[0] + A(r, 1) * v[1] + A(r, 2) * v[2];
    return out;
}

inline double max_abs_diff(const Mat3C& A, const Mat3C& B) {
    double m = 0.0;
    for (std::size_t i = 0; i < 9; ++i) m = std::max(m, std::abs(A.a[i] - B.a[i]));
    return m;
}

/// a b† as a matrix.
inline Mat3C outer(const Vec3C& a, const Vec3C& b) {
    Mat3C m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = a[r] * std::conj(b[c]);
    return m;
}

inline double frobenius_norm2(const Mat3C& m) {
    double s = 0.0;
    for (const auto& x : m.a) s += std::norm(x);
    return s;
}

inline constexpr double kUnitarityTol = 1e-12;
inline constexpr double kResidualTol = 1e-10;

/// True iff every entry of M†M − I is within `tol`.
inline bool is_unitary(const Mat3C& M, double tol = kUnitarityTol) {
    return max_abs_diff(mat_mul(M.adjoint(), M), Mat3C::identity()) <= tol;
}

/// Monic characteristic polynomial λ³ + c2 λ² + c1 λ + c0 of a 3×3 matrix.
struct CubicPoly {
    Complex c2, c1, c0;

    Complex operator()(Complex x) const { return ((x + c2) * x + c1) * x + c0; }
    Complex derivative(Complex x) const { return (3.0 * x + 2.0 * c2) * x + c1; }
};

inline CubicPoly characteristic_poly(const Mat3C& m) {
    const Complex minors = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) + (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
                           (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    return CubicPoly{-m.trace(), minors, -m.det()};
}

/// Roots of a monic complex cubic: Cardano's formula followed by Newton
/// polishing until |p(λ)| < 1e-13.
inline std::array<Complex, 3> cubic_roots(const CubicPoly& p) {
    const Complex a = p.c2, b = p.c1, c = p.c0;
    // depressed cubic t³ + P t + Q with λ = t − a/3
    const Complex P = b - a * a / 3.0;
    const Complex Q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const Complex disc = std::sqrt(Q * Q / 4.0 + P * P * P / 27.0);
    Complex u3 = -Q / 2.0 + disc;
    if (std::abs(-Q / 2.0 - disc) > std::abs(u3)) u3 = -Q / 2.0 - disc;

    std::array<Complex, 3> roots;
    const Complex shift = -a / 3.0;
    if (std::abs(u3) < 1e-300) {
        roots = {shift, shift, shift};
    } else {
        const Complex u = std::pow(u3, 1.0 / 3.0);
        const Complex w = std::polar(1.0, 2.0 * kPi / 3.0);
        Complex uk = u;
        for (auto& r : roots) {
            r = uk - P / (3.0 * uk) + shift;
            uk *= w;
        }
    }

    constexpr double kPolishTol = 1e-13;
    for (auto& r : roots) {
        int it = 0;
        for (; it < 100; ++it) {
            const Complex f = p(r);
            if (std::abs(f) < kPolishTol) break;
            const Complex df = p.derivative(r);
            if (std::abs(df) < 1e-300) break;
            r -= f / df;
        }
        if (std::abs(p(r)) >= kPolishTol)
            throw NonConvergence("cubic root polishing did not reach |p| < 1e-13 in 100 iterations");
    }
    return roots;
}

struct EigenSystem {
    std::array<Complex, 3> eigenvalues;
    std::array<Vec3C, 3> eigenvectors;
};

namespace detail {

inline Vec3C normalized(Vec3C v) {
    v *= 1.0 / v.norm();
    return v;
}

/// Null vector of (M − λI) from the pair of rows whose cross product is largest.
inline Vec3C null_vector(const Mat3C& M, Complex lambda, double& strength) {
    Mat3C A = M - lambda * Mat3C::identity();
    const Vec3C r0 = A.row(0), r1 = A.row(1), r2 = A.row(2);
    const std::array<Vec3C, 3> cands{cross(r0, r1), cross(r1, r2), cross(r2, r0)};
    const Vec3C* best = &cands[0];
    for (const auto& c : cands)
        if (c.norm2() > best->norm2()) best = &c;
    strength = best->norm();
    return *best;
}

/// Unit vector orthogonal (Hermitian) to unit vector u.
inline Vec3C orthogonal_to(const Vec3C& u) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(u[i]) < std::abs(u[k])) k = i;
    Vec3C e = Vec3C::basis(k);
    e -= dot(u, e) * u;
    return normalized(e);
}

} // namespace detail

inline constexpr double kDegenerateEigenvalueTol = 1e-6;

/// Eigenpairs of a unitary 3×3 matrix. Clusters of eigenvalues closer than
/// 1e-6 are resolved on the orthogonal complement of the separated eigenvector.
inline EigenSystem eigensystem(const Mat3C& M) {
    auto lam = cubic_roots(characteristic_poly(M));
    std::sort(lam.begin(), lam.end(), [](Complex x, Complex y) { return std::arg(x) < std::arg(y); });

    const auto close = [](Complex x, Complex y) { return std::abs(x - y) < kDegenerateEigenvalueTol; };
    EigenSystem es;

    // Identify a lone eigenvalue (if any) that is separated from the other two.
    int lone = -1;
    int clustered = 0;
    for (int i = 0; i < 3; ++i) {
        int near = 0;
        for (int j = 0; j < 3; ++j)
            if (j != i && close(lam[static_cast<std::size_t>(i)], lam[static_cast<std::size_t>(j)])) ++near;
        if (near == 0 && lone < 0) lone = i;
        if (near > 0) ++clustered;
    }

    if (clustered == 0) {
        for (std::size_t i = 0; i < 3; ++i) {
            double strength = 0.0;
            Vec3C v = detail::null_vector(M, lam[i], strength);
            if (strength < 1e-14) throw DegenerateEigenvector("null space of (M - lambda I) is rank deficient");
            es.eigenvalues[i] = lam[i];
            es.eigenvectors[i] = detail::normalized(v);
        }
    } else if (lone >= 0) {
        // One separated eigenvalue; diagonalize M on its orthogonal complement.
        double strength = 0.0;
        const Vec3C u = detail::normalized(detail::null_vector(M, lam[static_cast<std::size_t>(lone)], strength));
        if (strength < 1e-14) throw DegenerateEigenvector("separated eigenvalue has no clean null vector");
        const Vec3C w1 = detail::orthogonal_to(u);
        const Vec3C w2 = detail::normalized(conj(cross(u, w1)));
        const Vec3C Mw1 = M * w1, Mw2 = M * w2;
        const Complex b00 = dot(w1, Mw1), b01 = dot(w1, Mw2), b10 = dot(w2, Mw1), b11 = dot(w2, Mw2);
        const Complex half_tr = 0.5 * (b00 + b11);
        const Complex root = std::sqrt(half_tr * half_tr - (b00 * b11 - b01 * b10));
        const Complex mu1 = half_tr + root;
        Vec3C x1 = w1, x2 = w2;
        Complex e1 = b00, e2 = b11;
        if (std::abs(b01) + std::abs(b10) > 1e-14) {
            Complex c1, c2;
            if (std::abs(b01) >= std::abs(b10)) {
                c1 = b01;
                c2 = mu1 - b00;
            } else {
                c1 = mu1 - b11;
                c2 = b10;
            }
            x1 = detail::normalized(c1 * w1 + c2 * w2);
            x2 = detail::normalized(conj(cross(u, x1)));
            e1 = mu1;
            e2 = dot(x2, M * x2);
        }
        std::size_t slot = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            if (static_cast<int>(i) == lone) {
                es.eigenvalues[i] = lam[i];
                es.eigenvectors[i] = u;
            } else {
                es.eigenvalues[i] = slot == 0 ? e1 : e2;
                es.eigenvectors[i] = slot == 0 ? x1 : x2;
                ++slot;
            }
        }
    } else {
        // Triple cluster: a normal matrix with one eigenvalue is a multiple of I.
        for (std::size_t i = 0; i < 3; ++i) {
            es.eigenvectors[i] = Vec3C::basis(static_cast<int>(i));
            es.eigenvalues[i] = M(static_cast<int>(i), static_cast<int>(i));
        }
    }

    for (std::size_t i = 0; i < 3; ++i) {
        const Vec3C res = M * es.eigenvectors[i] - es.eigenvalues[i] * es.eigenvectors[i];
        if (res.norm() > kResidualTol)
            throw DegenerateEigenvector("eigenvector residual exceeds 1e-10 after degenerate fallback");
    }
    return es;
}

/// Wraps an angle into (−π, π].
inline double normalize_angle(double x) {
    double y = std::remainder(x, 2.0 * kPi);
    if (y <= -kPi) y += 2.0 * kPi;
    return y;
}

} // namespace qw3
