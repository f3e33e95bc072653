#pragma once

#include <functional>

#include "mkdv/errors.hpp"
#include "mkdv/prelude.hpp"
#include "mkdv/quadrature.hpp"

namespace mkdv {
namespace detail {

// Lanczos approximation, g = 607/128, 15 coefficients. Good to ~1e-14
// relative on Re z >= 0.5; reflection handles the rest.
inline constexpr Real lanczos_g = 4.7421875;
inline constexpr Real lanczos_c[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

inline Cplx log_gamma_lanczos(Cplx z) {
    // valid for Re z >= 0.5
    Cplx series = lanczos_c[0];
    for (int k = 1; k < 15; ++k) series += lanczos_c[k] / (z - 1.0 + static_cast<Real>(k));
    const Cplx t = z + (lanczos_g - 0.5);
    return 0.5 * std::log(2.0 * pi) + (z - 0.5) * std::log(t) - t + std::log(series);
}

}  // namespace detail

// Principal-branch log Gamma. Contract: exp(log_gamma(z)) carries relative
// error <= 1e-12 for |z| <= 50. Throws on z within 1e-14 of a pole.
inline Cplx log_gamma(Cplx z) {
    if (z.real() >= 0.5) return detail::log_gamma_lanczos(z);
    const Real n = std::round(z.real());
    if (n <= 0.0 && std::abs(z - Cplx(n, 0.0)) < 1e-14)
        throw numerical_error("log_gamma: pole at non-positive integer");
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    return std::log(pi) - std::log(std::sin(pi * z)) - detail::log_gamma_lanczos(1.0 - z);
}

inline Cplx gamma_fn(Cplx z) { return std::exp(log_gamma(z)); }

namespace detail {

inline constexpr Real airy_ai0 = 0.35502805388781723926;   // Ai(0)
inline constexpr Real airy_aip0 = -0.25881940379280679840;  // Ai'(0)
// The decaying side tolerates the asymptotic series early (the e^{-xi}
// prefactor crushes the truncation floor); the oscillatory side does not,
// so the Maclaurin series stretches to -8 there.
inline constexpr Real airy_switch_pos = 6.0;
inline constexpr Real airy_switch_neg = -8.0;

struct AiryPair {
    Real ai, aip;
};

// Double-double scalar: the Maclaurin partial sums cancel by up to ~1e6 near
// s = -8, which plain doubles cannot absorb inside the 1e-12 budget.
struct dd {
    Real hi{0.0}, lo{0.0};

    dd& operator+=(const dd& o) {
        const Real s = hi + o.hi;
        const Real bb = s - hi;
        const Real err = (hi - (s - bb)) + (o.hi - bb);
        const Real l = err + lo + o.lo;
        hi = s + l;
        lo = l - (hi - s);
        return *this;
    }

    // exact double factor
    dd& operator*=(Real d) {
        const Real p = hi * d;
        const Real e = std::fma(hi, d, -p);
        const Real l = std::fma(lo, d, e);
        hi = p + l;
        lo = l - (hi - p);
        return *this;
    }

    dd& operator/=(Real d) {
        const Real q0 = hi / d;
        const Real r = std::fma(-q0, d, hi) + lo;
        const Real q1 = r / d;
        hi = q0 + q1;
        lo = q1 - (hi - q0);
        return *this;
    }

    Real value() const { return hi + lo; }
};

inline AiryPair airy_maclaurin(Real s) {
    const Real s3 = s * s * s;
    // f = sum a_k, a_{k+1} = a_k s^3 / ((3k+2)(3k+3));  g likewise with
    // ((3k+3)(3k+4)). Derivative series carry their own denominators. The
    // denominators are exact small integers, so each term sees the same
    // rounded s^3 and the recurrence stays coherent in dd precision.
    dd f{1.0}, tf{1.0};
    dd g{s}, tg{s};
    dd fp{0.5 * s * s}, tfp{0.5 * s * s};
    dd gp{1.0}, tgp{1.0};
    for (int k = 0; k < 160; ++k) {
        const Real k3 = 3.0 * k;
        tf *= s3;
        tf /= (k3 + 2.0) * (k3 + 3.0);
        tg *= s3;
        tg /= (k3 + 3.0) * (k3 + 4.0);
        tfp *= s3;
        tfp /= (k3 + 5.0) * (k3 + 3.0);
        tgp *= s3;
        tgp /= (k3 + 1.0) * (k3 + 3.0);
        f += tf;
        g += tg;
        fp += tfp;
        gp += tgp;
        if (std::abs(tf.hi) < 1e-22 * std::abs(f.hi) &&
            std::abs(tg.hi) < 1e-22 * (std::abs(g.hi) + 1e-30) &&
            std::abs(tgp.hi) < 1e-22 * (std::abs(gp.hi) + 1e-30))
            break;
    }
    dd ai{}, aip{};
    f *= airy_ai0;
    g *= airy_aip0;
    ai += f;
    ai += g;
    fp *= airy_ai0;
    gp *= airy_aip0;
    aip += fp;
    aip += gp;
    return {ai.value(), aip.value()};
}

// Asymptotic series for s > switchover, truncated at the smallest term.
inline AiryPair airy_asymptotic_pos(Real s) {
    const Real xi = (2.0 / 3.0) * std::pow(s, 1.5);
    Real u = 1.0, v = 1.0;
    Real sum_u = 1.0, sum_v = 1.0;
    Real sign = -1.0;
    Real prev = 1.0;
    for (int k = 0; k < 40; ++k) {
        u *= (6.0 * k + 1.0) * (6.0 * k + 5.0) / (72.0 * (k + 1.0));
        v = u * (6.0 * (k + 1.0) + 1.0) / (1.0 - 6.0 * (k + 1.0));
        const Real term = u / std::pow(xi, k + 1.0);
        if (std::abs(term) > prev) break;  // divergent tail reached
        prev = std::abs(term);
        sum_u += sign * term;
        sum_v += sign * v / std::pow(xi, k + 1.0);
        sign = -sign;
        if (std::abs(term) < 1e-18) break;
    }
    const Real pref = std::exp(-xi) / (2.0 * std::sqrt(pi) * std::pow(s, 0.25));
    const Real prefp = -std::pow(s, 0.25) * std::exp(-xi) / (2.0 * std::sqrt(pi));
    return {pref * sum_u, prefp * sum_v};
}

inline AiryPair airy_asymptotic_neg(Real s) {
    // s < 0; oscillatory expansion in zeta = (2/3)|s|^{3/2}.
    const Real x = -s;
    const Real zeta = (2.0 / 3.0) * std::pow(x, 1.5);
    // u_k, v_k ladders
    Real u[40], v[40];
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 0; k + 1 < 40; ++k) {
        u[k + 1] = u[k] * (6.0 * k + 1.0) * (6.0 * k + 5.0) / (72.0 * (k + 1.0));
        v[k + 1] = u[k + 1] * (6.0 * (k + 1.0) + 1.0) / (1.0 - 6.0 * (k + 1.0));
    }
    Real ce = 0.0, se = 0.0;   // even/odd sums for Ai
    Real cep = 0.0, sep = 0.0;  // for Ai'
    Real prev = 1e300;
    for (int m = 0; m < 19; ++m) {
        const Real te = u[2 * m] / std::pow(zeta, 2.0 * m);
        if (std::abs(te) > prev) break;
        prev = std::abs(te);
        const Real sgn = (m % 2 == 0) ? 1.0 : -1.0;
        ce += sgn * te;
        se += sgn * u[2 * m + 1] / std::pow(zeta, 2.0 * m + 1.0);
        cep += sgn * v[2 * m] / std::pow(zeta, 2.0 * m);
        sep += sgn * v[2 * m + 1] / std::pow(zeta, 2.0 * m + 1.0);
    }
    const Real ph = zeta - 0.25 * pi;
    const Real pref = 1.0 / (std::sqrt(pi) * std::pow(x, 0.25));
    const Real ai = pref * (std::cos(ph) * ce + std::sin(ph) * se);
    const Real aip = std::pow(x, 0.25) / std::sqrt(pi) * (std::sin(ph) * cep - std::cos(ph) * sep);
    return {ai, aip};
}

inline AiryPair airy_pair(Real s) {
    if (s >= airy_switch_pos) return airy_asymptotic_pos(s);
    if (s <= airy_switch_neg) return airy_asymptotic_neg(s);
    return airy_maclaurin(s);
}

}  // namespace detail

// Ai(s), absolute error <= 1e-12 on [-40, 40].
inline Real airy_ai(Real s) { return detail::airy_pair(s).ai; }

inline Real airy_ai_prime(Real s) { return detail::airy_pair(s).aip; }

// Principal-value integral of f(x)/(x - pole) over [a, b] by singularity
// subtraction: the subtracted integrand is smooth, the log term is exact.
template <class F>
Real cauchy_pv_integral(F&& f, Real a, Real b, Real pole, int nodes = 96) {
    if (!(a < b)) throw input_error("cauchy_pv_integral: need a < b");
    const Real margin = 1e-12 * (b - a);
    if (pole <= a + margin || pole >= b - margin)
        throw input_error("cauchy_pv_integral: pole must lie strictly inside (a, b)");
    const Real fp = f(pole);
    auto g = [&](Real x) { return (f(x) - fp) / (x - pole); };
    const Real left = integrate(g, a, pole, nodes);
    const Real right = integrate(g, pole, b, nodes);
    return left + right + fp * std::log((b - pole) / (pole - a));
}

}  // namespace mkdv
