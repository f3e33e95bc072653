#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "mkdv/errors.hpp"
#include "mkdv/linalg.hpp"
#include "mkdv/prelude.hpp"

namespace mkdv {

enum class EigenKind { soliton, breather_rep };

// Eigenvalue in C+ with its norming constant. Solitons sit on the imaginary
// axis (c purely imaginary); breather representatives have Re z > 0 and stand
// for the full quartet {z, conj z, -z, -conj z}.
struct DiscreteEigenpair {
    Cplx z;
    Cplx c;
    EigenKind kind = EigenKind::soliton;
};

// Envelope velocity 4 Im(z)^2 - 12 Re(z)^2; covers both kinds (solitons
// have Re z = 0, giving the familiar 4 zeta^2).
inline Real eigen_velocity(const DiscreteEigenpair& e) {
    return 4.0 * sq(e.z.imag()) - 12.0 * sq(e.z.real());
}

inline Real one_soliton(Real zeta, Cplx c, Real x, Real t) {
    if (!(zeta > 0.0)) throw input_error("one_soliton: zeta must be positive");
    if (c == Cplx{}) throw input_error("one_soliton: zero norming constant");
    if (std::abs(c.real()) > 1e-8 * std::abs(c))
        throw input_error("one_soliton: norming constant must be purely imaginary");
    const Real eps = c.imag() > 0.0 ? 1.0 : -1.0;
    const Real omega = std::log(std::abs(c) / (2.0 * zeta));
    return 2.0 * zeta * eps / std::cosh(-2.0 * zeta * (x - 4.0 * zeta * zeta * t) + omega);
}

inline Real one_breather(Real xi, Real eta, Cplx c, Real x, Real t) {
    if (!(xi > 0.0) || !(eta > 0.0)) throw input_error("one_breather: need xi > 0 and eta > 0");
    if (c == Cplx{}) throw input_error("one_breather: zero norming constant");
    const Real A = c.real(), B = c.imag();
    const Real nu1 = 2.0 * xi * (x + 4.0 * (xi * xi - 3.0 * eta * eta) * t);
    const Real nu2 = 2.0 * eta * (x - 4.0 * (eta * eta - 3.0 * xi * xi) * t);
    const Real om1 = std::atan2(B * xi - A * eta, A * xi + B * eta);
    const Real om2 = -std::log(std::abs(xi / (2.0 * eta)) *
                               std::sqrt((A * A + B * B) / (xi * xi + eta * eta)));
    // sech/tanh form stays finite for any argument (cosh overflows past ~710)
    const Real se = 1.0 / std::cosh(nu2 + om2), th = std::tanh(nu2 + om2);
    const Real sn = std::sin(nu1 + om1), cn = std::cos(nu1 + om1);
    return -4.0 * (eta / xi) * se * (xi * sn + eta * th * cn) /
           (1.0 + sq((eta / xi) * cn * se));
}

// Expanded discrete scattering data at a fixed (x,t): every pole of the
// piecewise-rational matrix together with its residue coefficient. Weights
// are carried in log form so e^{2i theta} never overflows before the solver
// has a chance to rescale; the exponentiated copies are for inspection only.
struct PoleSystem {
    std::vector<Cplx> poles;        // sorted by (Im, Re)
    std::vector<Cplx> weights;      // exp(log_weights), may be inf/0 at extreme t
    std::vector<Cplx> log_weights;  // authoritative
    Real x = 0.0, t = 0.0;

    std::size_t size() const { return poles.size(); }
    // residue triangle: C- poles carry the upper (column-2) nilpotent shape
    bool upper(std::size_t i) const { return poles[i].imag() < 0.0; }
};

using DressingFn = std::function<Cplx(Cplx)>;

namespace detail {

// Residue weights in log form for one eigenpair, expanded over its orbit.
// The pattern is pinned by the two symmetries of the scattering problem:
// w(conj p) = -conj(w(p)) and w(-p) = -w(p). The closed forms above use a
// norming-constant convention rotated against the residue frame; the factor
// below is the empirically frozen bridge (sech/breather profiles match the
// linear-system reconstruction to 1e-14 with it, and with no other phase).
inline void expand_eigenpair(const DiscreteEigenpair& ep, Real x, Real t,
                             const DressingFn& dressing, std::vector<Cplx>& poles,
                             std::vector<Cplx>& log_weights) {
    Cplx c = ep.c;
    if (dressing) {
        const Cplx d = dressing(ep.z);
        if (d == Cplx{} || !std::isfinite(d.real()) || !std::isfinite(d.imag()))
            throw numerical_error("assemble_pole_system: dressing value not invertible");
        c /= d * d;
    }
    const Cplx lc = std::log(ep.kind == EigenKind::soliton ? iu * c : -iu * c);
    const Cplx ipi{0.0, pi};
    const Cplx z = ep.z;
    const auto th = [x, t](Cplx w) { return 4.0 * t * w * w * w + x * w; };
    poles.push_back(z);
    log_weights.push_back(lc + 2.0 * iu * th(z));
    poles.push_back(std::conj(z));
    log_weights.push_back(std::conj(lc) + ipi - 2.0 * iu * th(std::conj(z)));
    if (ep.kind == EigenKind::breather_rep) {
        poles.push_back(-std::conj(z));
        log_weights.push_back(std::conj(lc) + 2.0 * iu * th(-std::conj(z)));
        poles.push_back(-z);
        log_weights.push_back(lc + ipi - 2.0 * iu * th(-z));
    }
}

}  // namespace detail

inline PoleSystem assemble_pole_system(const std::vector<DiscreteEigenpair>& solitons,
                                       const std::vector<DiscreteEigenpair>& breathers,
                                       Real x, Real t, const DressingFn& dressing = {}) {
    PoleSystem sys;
    sys.x = x;
    sys.t = t;
    for (const auto& s : solitons) {
        if (s.kind != EigenKind::soliton || std::abs(s.z.real()) > 1e-10 || !(s.z.imag() > 0.0))
            throw input_error("assemble_pole_system: soliton eigenvalue must lie on i R+");
        if (s.c == Cplx{} || std::abs(s.c.real()) > 1e-8 * std::abs(s.c))
            throw input_error("assemble_pole_system: soliton norming constant must be purely imaginary");
        // canonicalize onto the axis so the pair is exactly conjugate
        DiscreteEigenpair se = s;
        se.z = Cplx{0.0, s.z.imag()};
        detail::expand_eigenpair(se, x, t, dressing, sys.poles, sys.log_weights);
    }
    for (const auto& b : breathers) {
        if (b.kind != EigenKind::breather_rep || !(b.z.real() > 0.0) || !(b.z.imag() > 0.0))
            throw input_error("assemble_pole_system: breather representative needs Re z > 0, Im z > 0");
        if (b.c == Cplx{}) throw input_error("assemble_pole_system: zero norming constant");
        detail::expand_eigenpair(b, x, t, dressing, sys.poles, sys.log_weights);
    }

    std::vector<std::size_t> order(sys.poles.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Cplx pa = sys.poles[a], pb = sys.poles[b];
        if (pa.imag() != pb.imag()) return pa.imag() < pb.imag();
        return pa.real() < pb.real();
    });
    PoleSystem sorted;
    sorted.x = x;
    sorted.t = t;
    sorted.poles.reserve(order.size());
    sorted.log_weights.reserve(order.size());
    sorted.weights.reserve(order.size());
    for (std::size_t k : order) {
        sorted.poles.push_back(sys.poles[k]);
        sorted.log_weights.push_back(sys.log_weights[k]);
        sorted.weights.push_back(std::exp(sys.log_weights[k]));
    }
    for (std::size_t i = 0; i < sorted.poles.size(); ++i)
        for (std::size_t j = i + 1; j < sorted.poles.size(); ++j)
            if (std::abs(sorted.poles[i] - sorted.poles[j]) < 1e-10)
                throw input_error("assemble_pole_system: pole collision");
    return sorted;
}

// Solved discrete system: the first row of mu at every pole plus the nonzero
// column of each residue of m (rows 1 and 2), enough to evaluate m anywhere.
struct DiscreteBCSolution {
    std::vector<Cplx> poles;
    std::vector<Vec2> mu_row1;    // (mu_11, mu_12) at poles[i]
    std::vector<Vec2> residues;   // nonzero column of Res m at poles[i]
    Real u = 0.0;
    Real u_imag = 0.0;  // diagnostic: reality defect of the reconstruction
    Real cond1 = 1.0;

    bool upper(std::size_t i) const { return poles[i].imag() < 0.0; }
};

inline DiscreteBCSolution discrete_rhp_solve(const PoleSystem& system) {
    DiscreteBCSolution out;
    const std::size_t n = system.size();
    if (n == 0) return out;
    out.poles = system.poles;

    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(system.poles[i].imag()) < 1e-10)
            throw input_error("discrete_rhp_solve: pole on the real axis");

    // Column-rescale the unknowns so every matrix entry stays representable:
    // column j of the raw system scales with w_j = e^{l_j}, so substituting
    // xhat_j = x_j e^{s_j}, s_j = max(Re l_j, 0), caps off-diagonal moduli at
    // 1/gap and keeps diagonals in (0,1].
    std::vector<Real> s(n);
    std::vector<Cplx> scaled_w(n);  // w_j e^{-s_j}, modulus <= 1
    for (std::size_t j = 0; j < n; ++j) {
        s[j] = std::max(system.log_weights[j].real(), 0.0);
        scaled_w[j] = std::exp(system.log_weights[j] - s[j]);
    }

    std::vector<Cplx> a(n * n, Cplx{});
    std::vector<Cplx> rhs1(n), rhs2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool up = system.upper(i);
        a[i * n + i] = std::exp(Cplx{-s[i], 0.0});
        rhs1[i] = up ? 1.0 : 0.0;
        rhs2[i] = up ? 0.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || system.upper(j) == up) continue;
            a[i * n + j] = -scaled_w[j] / (system.poles[i] - system.poles[j]);
        }
    }

    auto sol = solve_dense(std::move(a), static_cast<int>(n), {std::move(rhs1), std::move(rhs2)});
    if (!(sol.cond1 <= 1e12))
        throw numerical_error("discrete_rhp_solve: condition number exceeds 1e12");
    out.cond1 = sol.cond1;

    // active unknowns: row 1 holds mu_12 at lower poles and mu_11 at upper
    // poles; row 2 holds mu_22 / mu_21 in the same slots. Residue columns are
    // w_j * active_j, formed with the column scale folded back in so the
    // product never sees the raw exponential.
    std::vector<Cplx> act1(n), act2(n);
    out.residues.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Real undo = std::exp(-s[j]);
        act1[j] = sol.x[0][j] * undo;
        act2[j] = sol.x[1][j] * undo;
        out.residues[j] = Vec2{scaled_w[j] * sol.x[0][j], scaled_w[j] * sol.x[1][j]};
    }

    Cplx urec{};
    for (std::size_t j = 0; j < n; ++j)
        if (system.upper(j)) urec += out.residues[j].v1;
    urec *= 2.0;
    out.u = urec.real();
    out.u_imag = urec.imag();

    out.mu_row1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (system.upper(i)) {
            Cplx m12{};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && system.upper(j)) m12 += out.residues[j].v1 / (out.poles[i] - out.poles[j]);
            out.mu_row1[i] = Vec2{act1[i], m12};
        } else {
            Cplx m11{1.0};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && !system.upper(j)) m11 += out.residues[j].v1 / (out.poles[i] - out.poles[j]);
            out.mu_row1[i] = Vec2{m11, act1[i]};
        }
    }
    return out;
}

// m(z) away from the poles, by partial fractions over the solved residues.
inline Mat2 bc_matrix_at(const DiscreteBCSolution& sol, Cplx z) {
    Mat2 m = Mat2::identity();
    for (std::size_t j = 0; j < sol.poles.size(); ++j) {
        const Cplx f = 1.0 / (z - sol.poles[j]);
        if (sol.upper(j)) {
            m.m12 += sol.residues[j].v1 * f;
            m.m22 += sol.residues[j].v2 * f;
        } else {
            m.m11 += sol.residues[j].v1 * f;
            m.m21 += sol.residues[j].v2 * f;
        }
    }
    return m;
}

inline Mat2 breather_matrix(const DiscreteEigenpair& ell_pair, Cplx dressed_c, Real x, Real t,
                            Cplx z_eval) {
    DiscreteEigenpair ep = ell_pair;
    ep.c = dressed_c;
    const auto sys = assemble_pole_system({}, {ep}, x, t);
    for (const Cplx p : sys.poles)
        if (std::abs(z_eval - p) < 1e-6)
            throw input_error("breather_matrix: evaluation point too close to a pole");
    return bc_matrix_at(discrete_rhp_solve(sys), z_eval);
}

}  // namespace mkdv
