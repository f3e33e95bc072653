#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "mkdv/errors.hpp"
#include "mkdv/ode.hpp"
#include "mkdv/prelude.hpp"
#include "mkdv/specfun.hpp"

namespace mkdv {

// Real solutions of P'' = s P - 2 P^3 on the oscillatory branch: P ~ alpha *
// Ai(s) as s -> +inf, and for |alpha| < 1 the solution stays bounded with a
// (-s)^{-1/4} envelope on the left. Downward integration from the Airy tail
// is stable because the contaminating second solution decays in that
// direction.

struct PainleveSolution {
    Real alpha = 0.0;
    std::vector<Real> s_grid;  // uniform, ascending
    std::vector<Real> P;
    Real residual_max = 0.0;  // five-point finite-difference defect, interior nodes
};

namespace detail {

inline constexpr Real painleve_grid_h = 1e-3;
// Right of this point 2 P^2 is below 1e-13 * |s| for |alpha| < 1, so the
// solution equals alpha * Ai(s) to double precision and integration is not
// needed (and would lose relative accuracy against the absolute error floor).
inline constexpr Real painleve_tail_switch = 8.0;
inline constexpr Real painleve_blow_up = 1e3;

}  // namespace detail

inline PainleveSolution solve_painleve(Real alpha, Real s_min, Real s_max, Real tol = 1e-12) {
    if (!std::isfinite(alpha) || !std::isfinite(s_min) || !std::isfinite(s_max))
        throw input_error("solve_painleve: arguments must be finite");
    if (!(std::abs(alpha) < 1.0))
        throw input_error("solve_painleve: need |alpha| < 1 for the bounded branch");
    if (!(s_max >= 10.0)) throw input_error("solve_painleve: need s_max >= 10");
    if (!(s_min >= -30.0)) throw input_error("solve_painleve: need s_min >= -30");
    if (!(s_min < s_max)) throw input_error("solve_painleve: need s_min < s_max");

    const Real span = s_max - s_min;
    const std::size_t n = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(span / detail::painleve_grid_h)) + 1);
    const Real h = span / static_cast<Real>(n - 1);

    PainleveSolution sol;
    sol.alpha = alpha;
    sol.s_grid.resize(n);
    sol.P.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) sol.s_grid[k] = s_min + h * static_cast<Real>(k);
    sol.s_grid.back() = s_max;

    // Tail nodes carry the Airy profile directly; the integration leg starts
    // at the first such node and sweeps down through the rest.
    std::size_t k_switch = 0;
    while (k_switch + 1 < n && sol.s_grid[k_switch] < detail::painleve_tail_switch) ++k_switch;
    for (std::size_t k = k_switch; k < n; ++k) sol.P[k] = alpha * airy_ai(sol.s_grid[k]);

    if (k_switch > 0) {
        auto rhs = [](Real s, const std::vector<Real>& y, std::vector<Real>& dy) {
            if (std::abs(y[0]) > detail::painleve_blow_up)
                throw numerical_error("solve_painleve: trajectory blew up");
            dy[0] = y[1];
            dy[1] = s * y[0] - 2.0 * y[0] * y[0] * y[0];
        };
        const Real s0 = sol.s_grid[k_switch];
        std::vector<Real> y0 = {alpha * airy_ai(s0), alpha * airy_ai_prime(s0)};
        std::vector<Real> ts(k_switch + 1);
        for (std::size_t j = 0; j <= k_switch; ++j) ts[j] = sol.s_grid[k_switch - j];
        const auto rows = ode_integrate(rhs, std::move(y0), ts, tol);
        for (std::size_t j = 1; j <= k_switch; ++j) sol.P[k_switch - j] = rows[j][0];
    }

    // Stride-2 stencil: rounding jitter in the stored nodes amplifies like
    // 1/H^2, so the wider spacing buys a 4x jitter margin while the O(H^4)
    // truncation stays two orders below the defect budget.
    if (n >= 9) {
        const Real ih2 = 1.0 / (48.0 * h * h);
        Real worst = 0.0;
        for (std::size_t k = 4; k + 4 < n; ++k) {
            const Real p = sol.P[k];
            const Real d2 = (-sol.P[k - 4] + 16.0 * sol.P[k - 2] - 30.0 * p +
                             16.0 * sol.P[k + 2] - sol.P[k + 4]) *
                            ih2;
            worst = std::max(worst, std::abs(d2 - sol.s_grid[k] * p + 2.0 * p * p * p));
        }
        sol.residual_max = worst;
    }
    return sol;
}

// Linear interpolation on the solution grid; the 1e-3 spacing keeps the
// interpolation error around 1e-6, far below the self-similar error scale.
inline Real painleve_value(const PainleveSolution& sol, Real s) {
    if (sol.s_grid.size() < 2) throw input_error("painleve_value: solution has no grid");
    const Real lo = sol.s_grid.front();
    const Real hi = sol.s_grid.back();
    const Real slack = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (!std::isfinite(s) || s < lo - slack || s > hi + slack)
        throw input_error("painleve_value: s outside the solved range");
    const Real h = sol.s_grid[1] - sol.s_grid[0];
    const std::size_t last = sol.s_grid.size() - 2;
    const Real pos = (s - lo) / h;
    const std::size_t k = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<Real>(last)));
    const Real sl = sol.s_grid[k];
    const Real sr = sol.s_grid[k + 1];
    const Real w = std::clamp((s - sl) / (sr - sl), 0.0, 1.0);
    return (1.0 - w) * sol.P[k] + w * sol.P[k + 1];
}

// Self-similar profile (3t)^{-1/3} P(x / (3t)^{1/3}).
inline Real self_similar_value(const PainleveSolution& sol, Real x, Real t) {
    if (!std::isfinite(x) || !std::isfinite(t) || !(t > 0.0))
        throw input_error("self_similar_value: need finite x and t > 0");
    const Real w = std::cbrt(3.0 * t);
    return painleve_value(sol, x / w) / w;
}

struct AlphaFit {
    Real alpha = 0.0;
    Real residual = 0.0;  // rms misfit over the fitted window
    Real scale = 0.0;     // t^{-1/2} error scale the residual is judged against
    std::size_t points = 0;
};

// Least-squares fit of the tail coefficient against a sampled profile at time
// t, restricted to the self-similar window |x| <= 4 (3t)^{1/3}. The relation
// between alpha and r(0) stays data-driven: candidate closed forms (for
// example alpha = Im r(0)) are judged against this fit downstream rather than
// assumed here. r0 enters only through its symmetry constraint and the
// reflectionless short-circuit.
inline AlphaFit calibrate_alpha(Cplx r0, const std::vector<Real>& x, const std::vector<Real>& u,
                                Real t) {
    if (x.size() != u.size()) throw input_error("calibrate_alpha: sample size mismatch");
    if (!std::isfinite(r0.real()) || !std::isfinite(r0.imag()))
        throw input_error("calibrate_alpha: r0 must be finite");
    if (!std::isfinite(t) || !(t > 0.0)) throw input_error("calibrate_alpha: need t > 0");
    if (std::abs(r0.real()) > 1e-8 * std::max(1.0, std::abs(r0)))
        throw input_error("calibrate_alpha: r0 must be purely imaginary");

    const Real w = std::cbrt(3.0 * t);
    std::vector<Real> xs, us;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!std::isfinite(x[k]) || !std::isfinite(u[k]))
            throw input_error("calibrate_alpha: samples must be finite");
        if (std::abs(x[k]) <= 4.0 * w) {
            xs.push_back(x[k]);
            us.push_back(u[k]);
        }
    }
    if (xs.size() < 8)
        throw input_error("calibrate_alpha: too few samples in the self-similar window");

    AlphaFit fit;
    fit.scale = 1.0 / std::sqrt(t);
    fit.points = xs.size();

    auto guard = [&](Real residual) {
        if (residual > 5.0 * fit.scale)
            throw numerical_error("calibrate_alpha: fit residual exceeds the self-similar scale");
        return residual;
    };

    if (std::abs(r0) <= 1e-15) {
        Real acc = 0.0;
        for (const Real v : us) acc += v * v;
        fit.alpha = 0.0;
        fit.residual = guard(std::sqrt(acc / static_cast<Real>(us.size())));
        return fit;
    }

    auto misfit = [&](Real a) {
        const PainleveSolution sol = solve_painleve(a, -4.5, 10.0, 1e-11);
        Real acc = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const Real d = self_similar_value(sol, xs[k], t) - us[k];
            acc += d * d;
        }
        return std::sqrt(acc / static_cast<Real>(xs.size()));
    };

    // Coarse scan brackets the global minimum, golden-section polishes it.
    constexpr Real bound = 0.999;
    constexpr int coarse = 25;
    int best = 0;
    Real best_f = std::numeric_limits<Real>::infinity();
    for (int j = 0; j < coarse; ++j) {
        const Real a = -bound + 2.0 * bound * j / (coarse - 1.0);
        const Real f = misfit(a);
        if (f < best_f) {
            best_f = f;
            best = j;
        }
    }
    const Real step = 2.0 * bound / (coarse - 1.0);
    Real lo = std::max(-bound, -bound + step * (best - 1));
    Real hi = std::min(bound, -bound + step * (best + 1));
    const Real gr = 0.5 * (std::sqrt(5.0) - 1.0);
    Real a1 = hi - gr * (hi - lo);
    Real a2 = lo + gr * (hi - lo);
    Real f1 = misfit(a1);
    Real f2 = misfit(a2);
    while (hi - lo > 1e-10) {
        if (f1 <= f2) {
            hi = a2;
            a2 = a1;
            f2 = f1;
            a1 = hi - gr * (hi - lo);
            f1 = misfit(a1);
        } else {
            lo = a1;
            a1 = a2;
            f1 = f2;
            a2 = lo + gr * (hi - lo);
            f2 = misfit(a2);
        }
    }
    fit.alpha = 0.5 * (lo + hi);
    fit.residual = guard(misfit(fit.alpha));
    return fit;
}

}  // namespace mkdv
