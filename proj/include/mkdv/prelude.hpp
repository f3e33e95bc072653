#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace mkdv {

using Real = double;
using Cplx = std::complex<double>;

inline constexpr Real pi = std::numbers::pi_v<Real>;
inline constexpr Cplx iu{0.0, 1.0};

inline Real sq(Real x) { return x * x; }
inline Cplx sq(Cplx z) { return z * z; }

inline std::vector<Real> linspace(Real a, Real b, std::size_t n) {
    std::vector<Real> xs(n);
    if (n == 1) {
        xs[0] = a;
        return xs;
    }
    const Real h = (b - a) / static_cast<Real>(n - 1);
    for (std::size_t k = 0; k < n; ++k) xs[k] = a + h * static_cast<Real>(k);
    xs.back() = b;
    return xs;
}

// Wrap an angle into (-pi, pi].
inline Real principal_angle(Real a) {
    a = std::fmod(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    if (a > pi) a -= 2.0 * pi;
    return a;
}

struct Vec2 {
    Cplx v1{}, v2{};
};

// Dense 2x2 complex matrix, value semantics. Enough for Jost frames,
// transition matrices and the breather local model.
struct Mat2 {
    Cplx m11{}, m12{}, m21{}, m22{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Cplx det() const { return m11 * m22 - m12 * m21; }

    Mat2 inverse() const {
        const Cplx d = det();
        return {m22 / d, -m12 / d, -m21 / d, m11 / d};
    }

    Mat2 operator*(const Mat2& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }

    Vec2 operator*(const Vec2& v) const {
        return {m11 * v.v1 + m12 * v.v2, m21 * v.v1 + m22 * v.v2};
    }

    Mat2 operator+(const Mat2& o) const {
        return {m11 + o.m11, m12 + o.m12, m21 + o.m21, m22 + o.m22};
    }

    Mat2 operator-(const Mat2& o) const {
        return {m11 - o.m11, m12 - o.m12, m21 - o.m21, m22 - o.m22};
    }

    friend Mat2 operator*(Cplx s, const Mat2& m) {
        return {s * m.m11, s * m.m12, s * m.m21, s * m.m22};
    }

    Real max_abs() const {
        return std::max(std::max(std::abs(m11), std::abs(m12)),
                        std::max(std::abs(m21), std::abs(m22)));
    }
};

}  // namespace mkdv
