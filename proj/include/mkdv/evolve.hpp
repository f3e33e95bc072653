#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "mkdv/errors.hpp"
#include "mkdv/fft.hpp"
#include "mkdv/prelude.hpp"
#include "mkdv/scattering.hpp"

namespace mkdv {

// Periodic spectral surrogate for the line problem: domain [-L, L), N nodes,
// wavenumbers pi m / L. The Airy factor e^{i k^3 dt} is applied exactly per
// step; the advective nonlinearity -6 u^2 u_x = -2 (u^3)_x goes through a
// 2/3-rule dealiased pseudospectral product inside a fourth-order
// integrating-factor Runge-Kutta stage loop.

struct SpectralState {
    Real L = 0.0;             // half-period
    std::size_t N = 0;        // node count, power of two
    Real t = 0.0;
    std::vector<Cplx> u_hat;  // raw DFT of node values, top third zeroed
};

namespace detail {

inline void check_state(const SpectralState& s, const char* who) {
    if (s.N == 0 || !is_power_of_two(s.N) || s.u_hat.size() != s.N)
        throw input_error(std::string(who) + ": malformed spectral state");
    if (!std::isfinite(s.L) || !(s.L > 0.0))
        throw input_error(std::string(who) + ": need L > 0");
}

inline std::vector<Real> wavenumbers(std::size_t n, Real L) {
    std::vector<Real> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Real m = j <= n / 2 ? static_cast<Real>(j)
                                  : static_cast<Real>(j) - static_cast<Real>(n);
        k[j] = pi * m / L;
    }
    return k;
}

// zero every mode with |m| > N/3 (cubic products alias back above that)
inline void dealias(std::vector<Cplx>& u_hat) {
    const std::size_t n = u_hat.size();
    const std::size_t keep = n / 3;
    for (std::size_t j = keep + 1; j + keep + 1 <= n; ++j) u_hat[j] = Cplx{};
}

// phi_m(z) = sum z^n / (n+m)!; series below |z| = 1/2, closed form above,
// so the removable singularities never cancel catastrophically.
inline Cplx phi_fn(int m, Cplx z, Cplx ez) {
    if (std::abs(z) < 0.5) {
        Real fact = 1.0;
        for (int i = 2; i <= m; ++i) fact *= static_cast<Real>(i);
        Cplx term = 1.0 / fact;
        Cplx acc = term;
        for (int nn = 0; nn < 24; ++nn) {
            term *= z / static_cast<Real>(nn + m + 1);
            acc += term;
        }
        return acc;
    }
    switch (m) {
        case 1: return (ez - 1.0) / z;
        case 2: return (ez - 1.0 - z) / (z * z);
        default: return (ez - 1.0 - z - 0.5 * z * z) / (z * z * z);
    }
}

// Exponential RK4 weights (diagonal linear part i k^3): the update integrates
// the Duhamel integral with the exact e^{i k^3 dt} kernel and fourth-order
// stage quadrature.
struct EtdCoeffs {
    Real dt = 0.0;
    std::vector<Cplx> e_full, e_half, q, f1, f2, f3;
};

inline EtdCoeffs make_etd(const std::vector<Real>& k, Real dt) {
    const std::size_t n = k.size();
    EtdCoeffs c;
    c.dt = dt;
    c.e_full.resize(n);
    c.e_half.resize(n);
    c.q.resize(n);
    c.f1.resize(n);
    c.f2.resize(n);
    c.f3.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Real ph = k[j] * k[j] * k[j] * dt;
        const Cplx z{0.0, ph};
        const Cplx ez{std::cos(ph), std::sin(ph)};
        const Cplx ez2{std::cos(0.5 * ph), std::sin(0.5 * ph)};
        c.e_full[j] = ez;
        c.e_half[j] = ez2;
        const Cplx p1h = phi_fn(1, 0.5 * z, ez2);
        const Cplx p1 = phi_fn(1, z, ez);
        const Cplx p2 = phi_fn(2, z, ez);
        const Cplx p3 = phi_fn(3, z, ez);
        c.q[j] = (0.5 * dt) * p1h;
        c.f1[j] = dt * (p1 - 3.0 * p2 + 4.0 * p3);
        c.f2[j] = dt * (p2 - 2.0 * p3);
        c.f3[j] = dt * (4.0 * p3 - p2);
    }
    return c;
}

}  // namespace detail

inline std::vector<Real> grid_x(const SpectralState& s) {
    detail::check_state(s, "grid_x");
    std::vector<Real> x(s.N);
    const Real dx = 2.0 * s.L / static_cast<Real>(s.N);
    for (std::size_t j = 0; j < s.N; ++j) x[j] = -s.L + dx * static_cast<Real>(j);
    return x;
}

inline std::vector<Real> to_physical(const SpectralState& s) {
    detail::check_state(s, "to_physical");
    std::vector<Cplx> w = s.u_hat;
    fft_inverse(w);
    std::vector<Real> u(s.N);
    for (std::size_t j = 0; j < s.N; ++j) u[j] = w[j].real();
    return u;
}

// max |Im u| on the nodes; a real field keeps this at rounding level
inline Real reality_defect(const SpectralState& s) {
    detail::check_state(s, "reality_defect");
    std::vector<Cplx> w = s.u_hat;
    fft_inverse(w);
    Real worst = 0.0;
    for (const auto& z : w) worst = std::max(worst, std::abs(z.imag()));
    return worst;
}

inline Real hermitian_defect(const SpectralState& s) {
    detail::check_state(s, "hermitian_defect");
    Real worst = std::abs(s.u_hat[0].imag());
    for (std::size_t j = 1; j < s.N; ++j)
        worst = std::max(worst, std::abs(s.u_hat[j] - std::conj(s.u_hat[s.N - j])));
    return worst;
}

// advective stability ceiling for the explicit stages
inline Real cfl_dt_bound(const SpectralState& s) {
    detail::check_state(s, "cfl_dt_bound");
    std::vector<Cplx> w = s.u_hat;
    fft_inverse(w);
    Real umax = 0.0;
    for (const auto& z : w) umax = std::max(umax, std::abs(z.real()));
    return 2.8 / ((pi * static_cast<Real>(s.N) / s.L) * 6.0 * umax * umax + 1e-12);
}

inline SpectralState init_state(const PotentialSample& u0, Real L, std::size_t N) {
    if (!std::isfinite(L) || !(L > 0.0)) throw input_error("init_state: need L > 0");
    if (!is_power_of_two(N) || N < 8) throw input_error("init_state: N must be a power of two >= 8");
    if (u0.x.size() < 2 || u0.x.size() != u0.u.size())
        throw input_error("init_state: malformed sample");
    for (std::size_t j = 0; j < u0.x.size(); ++j) {
        if (!std::isfinite(u0.x[j]) || !std::isfinite(u0.u[j]))
            throw input_error("init_state: sample must be finite");
        if (std::abs(u0.x[j]) > 0.5 * L && std::abs(u0.u[j]) > 1e-8)
            throw input_error("init_state: support overflows [-L/2, L/2]");
    }
    if (std::abs(u0.u.front()) > 1e-8 || std::abs(u0.u.back()) > 1e-8)
        throw input_error("init_state: sample must decay at its ends");

    const CubicSpline spline(u0.x.front(), u0.h(), u0.u);
    SpectralState s;
    s.L = L;
    s.N = N;
    s.t = 0.0;
    s.u_hat.resize(N);
    const Real dx = 2.0 * L / static_cast<Real>(N);
    for (std::size_t j = 0; j < N; ++j)
        s.u_hat[j] = Cplx{spline(-L + dx * static_cast<Real>(j)), 0.0};
    fft_forward(s.u_hat);
    detail::dealias(s.u_hat);
    return s;
}

namespace detail {

inline void step_inplace(SpectralState& state, const std::vector<Real>& k, const EtdCoeffs& co) {
    const std::size_t n = state.N;
    const Real dt = co.dt;

    std::vector<Cplx> phys = state.u_hat;
    fft_inverse(phys);
    Real umax = 0.0;
    for (const auto& z : phys) umax = std::max(umax, std::abs(z.real()));
    const Real bound = 2.8 / ((pi * static_cast<Real>(n) / state.L) * 6.0 * umax * umax + 1e-12);
    if (dt > bound) throw input_error("step: dt exceeds the advective stability bound");

    // -2 i k * DFT(u^3), from node values already in physical space
    auto finish = [&](std::vector<Cplx> w) {
        for (auto& z : w) {
            const Real v = z.real();
            z = Cplx{v * v * v, 0.0};
        }
        fft_forward(w);
        for (std::size_t j = 0; j < n; ++j) w[j] *= Cplx{0.0, -2.0 * k[j]};
        dealias(w);
        return w;
    };
    auto nl = [&](const std::vector<Cplx>& uh) {
        std::vector<Cplx> w = uh;
        fft_inverse(w);
        return finish(std::move(w));
    };

    const std::vector<Cplx>& y0 = state.u_hat;
    std::vector<Cplx> sa(n), tmp(n);

    const auto n1 = finish(std::move(phys));
    for (std::size_t j = 0; j < n; ++j) sa[j] = co.e_half[j] * y0[j] + co.q[j] * n1[j];
    const auto n2 = nl(sa);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = co.e_half[j] * y0[j] + co.q[j] * n2[j];
    const auto n3 = nl(tmp);
    for (std::size_t j = 0; j < n; ++j)
        tmp[j] = co.e_half[j] * sa[j] + co.q[j] * (2.0 * n3[j] - n1[j]);
    const auto n4 = nl(tmp);

    for (std::size_t j = 0; j < n; ++j)
        state.u_hat[j] = co.e_full[j] * y0[j] + co.f1[j] * n1[j] +
                         2.0 * co.f2[j] * (n2[j] + n3[j]) + co.f3[j] * n4[j];
    state.t += dt;
}

}  // namespace detail

inline SpectralState step(SpectralState state, Real dt) {
    detail::check_state(state, "step");
    if (!std::isfinite(dt) || !(dt > 0.0)) throw input_error("step: need dt > 0");
    const auto k = detail::wavenumbers(state.N, state.L);
    detail::step_inplace(state, k, detail::make_etd(k, dt));
    return state;
}

struct EvolveParams {
    Real L = 0.0;
    std::size_t N = 0;
    Real dt = 0.0;                  // maximum step; segments subdivide to land exactly
    std::vector<Real> checkpoints;  // ascending times in (0, T]; T itself is always recorded
};

struct Checkpoint {
    Real t = 0.0;
    std::vector<Real> u;
    Real mass = 0.0;
    Real momentum = 0.0;
    Real boundary_max = 0.0;  // max |u| where |x| >= 0.95 L
};

struct Trajectory {
    std::vector<Real> x;
    std::vector<Checkpoint> checkpoints;  // t = 0 first
    Real boundary_max = 0.0;
};

inline Trajectory run_evolution(const PotentialSample& u0, Real T, const EvolveParams& p) {
    if (!std::isfinite(T) || !(T > 0.0)) throw input_error("run_evolution: need T > 0");
    if (!std::isfinite(p.dt) || !(p.dt > 0.0)) throw input_error("run_evolution: need dt > 0");

    std::vector<Real> targets = p.checkpoints;
    for (const Real c : targets)
        if (!std::isfinite(c) || !(c > 0.0) || c > T * (1.0 + 1e-12))
            throw input_error("run_evolution: checkpoints must lie in (0, T]");
    if (targets.empty() || std::abs(targets.back() - T) > 1e-12 * std::max(1.0, T))
        targets.push_back(T);
    for (std::size_t i = 1; i < targets.size(); ++i)
        if (!(targets[i] > targets[i - 1]))
            throw input_error("run_evolution: checkpoints must be strictly ascending");

    SpectralState s = init_state(u0, p.L, p.N);

    Trajectory traj;
    traj.x = grid_x(s);
    const Real dx = 2.0 * s.L / static_cast<Real>(s.N);

    bool warned = false;
    auto record = [&](const SpectralState& st) {
        Checkpoint cp;
        cp.t = st.t;
        cp.u = to_physical(st);
        for (std::size_t j = 0; j < cp.u.size(); ++j) {
            cp.mass += cp.u[j];
            cp.momentum += cp.u[j] * cp.u[j];
            if (std::abs(traj.x[j]) >= 0.95 * st.L)
                cp.boundary_max = std::max(cp.boundary_max, std::abs(cp.u[j]));
        }
        cp.mass *= dx;
        cp.momentum *= dx;
        traj.boundary_max = std::max(traj.boundary_max, cp.boundary_max);
        if (cp.boundary_max > 1e-8 && !warned) {
            std::fprintf(stderr,
                         "run_evolution: boundary amplitude %.3e at t = %.6g exceeds 1e-8; "
                         "enlarge L\n",
                         cp.boundary_max, cp.t);
            warned = true;
        }
        traj.checkpoints.push_back(std::move(cp));
    };

    record(s);
    const auto k = detail::wavenumbers(s.N, s.L);
    for (const Real target : targets) {
        const Real span = target - s.t;
        const auto nsteps =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / p.dt - 1e-12)));
        const Real h = span / static_cast<Real>(nsteps);
        const auto co = detail::make_etd(k, h);
        for (std::size_t i = 0; i < nsteps; ++i) detail::step_inplace(s, k, co);
        s.t = target;  // absorb accumulated rounding in the clock only
        record(s);
    }
    return traj;
}

}  // namespace mkdv
