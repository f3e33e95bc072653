#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mkdv/errors.hpp"
#include "mkdv/ode.hpp"
#include "mkdv/prelude.hpp"
#include "mkdv/reflectionless.hpp"

namespace mkdv {

// Direct scattering for the focusing AKNS system in the normalized frame
// m_x = -iz [sigma_3, m] + U m, m -> I at the anchoring infinity, with
// U = i u sigma_1. Transition coefficients come from the x-independent
// determinants abrev = det[m^-_1, m^+_2] and b = e^{-2ixz} det[m^-_1, m^+_1];
// the discrete spectrum is the zero set of abrev in the upper half plane.

// ---------------------------------------------------------------------------
// sampled potential

struct PotentialSample {
    std::vector<Real> x;  // uniform, strictly increasing
    std::vector<Real> u;  // real values, decayed at both ends

    Real h() const {
        return x.size() > 1 ? (x.back() - x.front()) / Real(x.size() - 1) : 0.0;
    }
};

inline Real max_abs_potential(const PotentialSample& s) {
    Real m = 0.0;
    for (Real v : s.u) m = std::max(m, std::abs(v));
    return m;
}

inline void check_potential(const PotentialSample& s) {
    if (s.x.size() != s.u.size() || s.x.size() < 8)
        throw input_error("potential: need matching x/u arrays with at least 8 nodes");
    const Real h = s.h();
    if (!(h > 0.0)) throw input_error("potential: grid must be strictly increasing");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.u[i]))
            throw input_error("potential: non-finite sample");
        if (std::abs(s.x[i] - s.x.front() - Real(i) * h) > 1e-9 * std::max(1.0, std::abs(s.x[i])))
            throw input_error("potential: grid must be uniform");
    }
    if (std::abs(s.u.front()) > 1e-8 || std::abs(s.u.back()) > 1e-8)
        throw input_error("potential has not decayed at the grid ends");
}

// Natural cubic spline on a uniform grid; evaluates to zero outside the
// table, which is consistent with the decay requirement above.
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(Real x0, Real h, std::vector<Real> y)
        : x0_(x0), h_(h), y_(std::move(y)), m_(y_.size(), 0.0) {
        const std::size_t n = y_.size();
        if (n < 2 || !(h > 0.0)) throw input_error("spline: need h > 0 and two nodes");
        if (n > 2) {
            // Thomas sweep on the (1, 4, 1) system for interior second derivatives
            std::vector<Real> diag(n - 2, 4.0), rhs(n - 2);
            for (std::size_t i = 1; i + 1 < n; ++i)
                rhs[i - 1] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / (h * h);
            for (std::size_t i = 1; i < n - 2; ++i) {
                const Real w = 1.0 / diag[i - 1];
                diag[i] -= w;
                rhs[i] -= w * rhs[i - 1];
            }
            for (std::size_t i = n - 2; i-- > 0;)
                m_[i + 1] = (rhs[i] - (i + 2 < n - 1 ? m_[i + 2] : 0.0)) / diag[i];
        }
    }

    Real operator()(Real x) const {
        const Real s = (x - x0_) / h_;
        if (s <= 0.0 || s >= Real(y_.size() - 1)) return 0.0;
        const std::size_t i = std::min(y_.size() - 2, std::size_t(s));
        const Real a = s - Real(i), b = 1.0 - a;
        return b * y_[i] + a * y_[i + 1] +
               (h_ * h_ / 6.0) * ((b * b * b - b) * m_[i] + (a * a * a - a) * m_[i + 1]);
    }

  private:
    Real x0_ = 0.0, h_ = 1.0;
    std::vector<Real> y_{0.0, 0.0}, m_{0.0, 0.0};
};

inline CubicSpline make_spline(const PotentialSample& s) {
    check_potential(s);
    return CubicSpline(s.x.front(), s.h(), s.u);
}

namespace detail {

// rhs of the full-matrix frame equation, state (m11, m12, m21, m22)
struct JostRhs {
    const CubicSpline* u;
    Cplx two_iz;
    void operator()(Real x, const std::vector<Cplx>& y, std::vector<Cplx>& d) const {
        const Cplx q = iu * (*u)(x);
        d[0] = q * y[2];
        d[1] = -two_iz * y[1] + q * y[3];
        d[2] = two_iz * y[2] + q * y[0];
        d[3] = q * y[1];
    }
};

// single column: col 1 carries (m11, m21), col 2 carries (m12, m22)
struct JostColRhs {
    const CubicSpline* u;
    Cplx two_iz;
    int col;
    void operator()(Real x, const std::vector<Cplx>& y, std::vector<Cplx>& d) const {
        const Cplx q = iu * (*u)(x);
        if (col == 1) {
            d[0] = q * y[1];
            d[1] = two_iz * y[1] + q * y[0];
        } else {
            d[0] = -two_iz * y[0] + q * y[1];
            d[1] = q * y[0];
        }
    }
};

inline Vec2 jost_column(const CubicSpline& sp, Cplx z, Real x_from, Real x_to, int col,
                        Real tol) {
    const std::vector<Cplx> y0 =
        col == 1 ? std::vector<Cplx>{1.0, 0.0} : std::vector<Cplx>{0.0, 1.0};
    const auto out =
        ode_integrate(JostColRhs{&sp, 2.0 * iu * z, col}, y0, {x_from, x_to}, tol);
    return {out.back()[0], out.back()[1]};
}

inline Mat2 jost_matrix(const CubicSpline& sp, Cplx z, Real x_from, Real x_to, Real tol) {
    const auto out = ode_integrate(JostRhs{&sp, 2.0 * iu * z},
                                   std::vector<Cplx>{1.0, 0.0, 0.0, 1.0}, {x_from, x_to}, tol);
    return {out.back()[0], out.back()[1], out.back()[2], out.back()[3]};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Jost frames on the full grid

struct JostPair {
    std::vector<Mat2> m_minus, m_plus;  // per grid node
    Cplx z;
};

// Off the real axis only the columns decaying toward their anchor stay
// bounded (m^- column 1, m^+ column 2); the other columns are left at their
// free-field values there and must not be used.
inline JostPair jost_solve(const PotentialSample& u0, Cplx z, Real tol = 1e-12) {
    check_potential(u0);
    const CubicSpline sp = make_spline(u0);
    const std::size_t n = u0.x.size();
    JostPair jp;
    jp.z = z;
    jp.m_minus.assign(n, Mat2::identity());
    jp.m_plus.assign(n, Mat2::identity());

    std::vector<Real> fwd = u0.x, bwd(u0.x.rbegin(), u0.x.rend());
    if (std::abs(z.imag()) <= 1e-12) {
        const auto mm = ode_integrate(detail::JostRhs{&sp, 2.0 * iu * z},
                                      std::vector<Cplx>{1.0, 0.0, 0.0, 1.0}, fwd, tol);
        const auto mp = ode_integrate(detail::JostRhs{&sp, 2.0 * iu * z},
                                      std::vector<Cplx>{1.0, 0.0, 0.0, 1.0}, bwd, tol);
        for (std::size_t i = 0; i < n; ++i) {
            jp.m_minus[i] = {mm[i][0], mm[i][1], mm[i][2], mm[i][3]};
            const auto& r = mp[n - 1 - i];
            jp.m_plus[i] = {r[0], r[1], r[2], r[3]};
        }
    } else {
        const auto c1 = ode_integrate(detail::JostColRhs{&sp, 2.0 * iu * z, 1},
                                      std::vector<Cplx>{1.0, 0.0}, fwd, tol);
        const auto c2 = ode_integrate(detail::JostColRhs{&sp, 2.0 * iu * z, 2},
                                      std::vector<Cplx>{0.0, 1.0}, bwd, tol);
        for (std::size_t i = 0; i < n; ++i) {
            jp.m_minus[i].m11 = c1[i][0];
            jp.m_minus[i].m21 = c1[i][1];
            jp.m_plus[i].m12 = c2[n - 1 - i][0];
            jp.m_plus[i].m22 = c2[n - 1 - i][1];
        }
    }
    return jp;
}

// ---------------------------------------------------------------------------
// transition coefficients on a real grid

struct TransitionSample {
    Real z = 0.0;
    Cplx a, b;  // abrev = conj(a) and brev_b = -conj(b) on the real axis
};

namespace detail {

// a and b from determinants of the one-sided frames met at x_eval
inline TransitionSample transition_at(const CubicSpline& sp, Real xl, Real xr, Real z,
                                      Real x_eval, Real tol) {
    const Vec2 c1 = jost_column(sp, z, xl, x_eval, 1, tol);    // m^- column 1
    const Vec2 p1 = jost_column(sp, z, xr, x_eval, 1, tol);    // m^+ column 1
    const Vec2 p2 = jost_column(sp, z, xr, x_eval, 2, tol);    // m^+ column 2
    const Cplx abrev = c1.v1 * p2.v2 - c1.v2 * p2.v1;
    const Cplx b = std::exp(-2.0 * iu * x_eval * z) * (c1.v1 * p1.v2 - c1.v2 * p1.v1);
    return {z, std::conj(abrev), b};
}

}  // namespace detail

inline std::vector<TransitionSample> transition_coefficients(const PotentialSample& u0,
                                                             const std::vector<Real>& z_grid,
                                                             Real tol = 1e-12) {
    check_potential(u0);
    if (z_grid.empty()) throw input_error("transition: empty z grid");
    const std::size_t n = z_grid.size();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(z_grid[i] + z_grid[n - 1 - i]) > 1e-12 * std::max(1.0, std::abs(z_grid[i])))
            throw input_error("transition: z grid must be symmetric about zero");
    const Real xl = u0.x.front(), xr = u0.x.back();
    if (!(xl < 0.0 && xr > 0.0))
        throw input_error("transition: grid must contain the evaluation point x = 0");
    const CubicSpline sp = make_spline(u0);

    std::vector<TransitionSample> out;
    out.reserve(n);
    for (Real z : z_grid) out.push_back(detail::transition_at(sp, xl, xr, z, 0.0, tol));

    // determinants are x-independent; drift across evaluation points flags an
    // under-resolved integration. Checked once at the stiffest (largest) z.
    const Real zc = z_grid[n - 1];
    const Real off = std::min(2.0, 0.25 * std::min(-xl, xr));
    for (Real xe : {-off, off}) {
        const TransitionSample probe = detail::transition_at(sp, xl, xr, zc, xe, tol);
        if (std::abs(probe.a - out.back().a) + std::abs(probe.b - out.back().b) > 1e-8)
            throw numerical_error("transition coefficients drift with the evaluation point");
    }
    return out;
}

inline Cplx reflection(const TransitionSample& s) {
    const Cplx abrev = std::conj(s.a);
    if (std::abs(abrev) <= 1e-12)
        throw input_error("reflection: transition coefficient vanishes on the real axis");
    return -s.b / abrev;
}

// ---------------------------------------------------------------------------
// discrete spectrum

// Cached evaluator of abrev(z) = det[m^-_1, m^+_2] at x = 0, valid on the
// closed upper half plane. Every contour, bisection and Newton query lands
// here, so repeated points (shared box edges) cost one integration total.
class AbrevEvaluator {
  public:
    explicit AbrevEvaluator(const PotentialSample& u0, Real tol = 1e-12)
        : sp_(make_spline(u0)), xl_(u0.x.front()), xr_(u0.x.back()), tol_(tol) {
        if (!(xl_ < 0.0 && xr_ > 0.0))
            throw input_error("spectrum: grid must contain the evaluation point x = 0");
    }

    Cplx operator()(Cplx z) {
        const auto key = std::make_pair(z.real(), z.imag());
        const auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const Vec2 c1 = detail::jost_column(sp_, z, xl_, 0.0, 1, tol_);
        const Vec2 p2 = detail::jost_column(sp_, z, xr_, 0.0, 2, tol_);
        const Cplx val = c1.v1 * p2.v2 - c1.v2 * p2.v1;
        cache_.emplace(key, val);
        return val;
    }

    Cplx derivative(Cplx z, Real step = 1e-6) {
        return ((*this)(z + step) - (*this)(z - step)) / (2.0 * step);
    }

  private:
    CubicSpline sp_;
    Real xl_, xr_, tol_;
    std::map<std::pair<Real, Real>, Cplx> cache_;
};

struct SpectrumBox {
    Real re_lo, re_hi, im_lo, im_hi;
};

inline SpectrumBox default_spectrum_box(const PotentialSample& u0) {
    const Real Z = 2.0 + 2.0 * max_abs_potential(u0);
    return {0.0, Z, 1e-3, Z};
}

namespace detail {

// Zero count inside a rectangle by accumulating the argument of abrev along
// the boundary, refining until adjacent phase jumps are small. An exact
// integer by construction once resolved; failure to resolve reports as a
// numerical error.
inline int winding_number(AbrevEvaluator& ab, const SpectrumBox& box) {
    const Cplx c0{box.re_lo, box.im_lo}, c1{box.re_hi, box.im_lo};
    const Cplx c2{box.re_hi, box.im_hi}, c3{box.re_lo, box.im_hi};
    const Cplx corner[4] = {c0, c1, c2, c3};

    struct Node {
        Real s;  // contour parameter in [0, 4), one unit per edge
        Cplx f;
    };
    auto point = [&](Real s) {
        const int e = std::min(3, int(s));
        return corner[e] + (s - Real(e)) * (corner[(e + 1) % 4] - corner[e]);
    };

    std::vector<Node> nodes;
    for (int e = 0; e < 4; ++e) {
        const Real len = std::abs(corner[(e + 1) % 4] - corner[e]);
        const int m = std::max(6, int(std::ceil(len / 0.2)));
        for (int k = 0; k < m; ++k) {
            const Real s = Real(e) + Real(k) / Real(m);
            nodes.push_back({s, ab(point(s))});
        }
    }

    for (int pass = 0;; ++pass) {
        if (pass > 40 || nodes.size() > 8000)
            throw numerical_error("spectrum: winding contour failed to resolve");
        bool refined = false;
        std::vector<Node> next;
        next.reserve(2 * nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const Node& a = nodes[k];
            const Node& b = nodes[(k + 1) % nodes.size()];
            if (std::abs(a.f) < 1e-13)
                throw numerical_error("spectrum: zero on the search contour");
            next.push_back(a);
            // two triggers: a large phase jump, and a large relative change in
            // |f|. The second catches a zero sitting close to the contour,
            // whose full 2 pi phase swing aliases to ~0 between coarse nodes.
            const Real jump = principal_angle(std::arg(b.f) - std::arg(a.f));
            const bool dip = std::abs(b.f - a.f) >
                             0.5 * std::min(std::abs(a.f), std::abs(b.f));
            if (std::abs(jump) > 1.0 || dip) {
                const Real sm = a.s + 0.5 * (b.s - a.s + (b.s < a.s ? 4.0 : 0.0));
                const Real s = sm >= 4.0 ? sm - 4.0 : sm;
                next.push_back({s, ab(point(s))});
                refined = true;
            }
        }
        nodes.swap(next);
        // wrap-segment midpoints land at small s; restore cyclic order
        std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
            return a.s < b.s;
        });
        if (!refined) break;
    }

    Real total = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        total += principal_angle(std::arg(nodes[(k + 1) % nodes.size()].f) -
                                 std::arg(nodes[k].f));
    const Real w = total / (2.0 * pi);
    const Real r = std::round(w);
    if (std::abs(w - r) > 0.1)
        throw numerical_error("spectrum: winding number did not settle on an integer");
    return int(r);
}

inline bool newton_refine(AbrevEvaluator& ab, const SpectrumBox& box, Cplx& z) {
    const Real slack_re = 0.3 * (box.re_hi - box.re_lo), slack_im = 0.3 * (box.im_hi - box.im_lo);
    auto inside = [&](Cplx w, Real sre, Real sim) {
        return w.real() >= box.re_lo - sre && w.real() <= box.re_hi + sre &&
               w.imag() >= box.im_lo - sim && w.imag() <= box.im_hi + sim;
    };
    // polish past the acceptance threshold: the position error ~|f|/|f'| of a
    // barely-accepted zero would exceed the axis-classification band
    Cplx best = z;
    Real best_f = std::numeric_limits<Real>::infinity();
    for (int it = 0; it < 80; ++it) {
        const Cplx f = ab(z);
        if (std::abs(f) < best_f) {
            best_f = std::abs(f);
            best = z;
        }
        if (best_f <= 1e-14) break;
        const Cplx d = ab.derivative(z);
        if (!(std::abs(d) > 0.0) || !std::isfinite(std::abs(d))) break;
        z -= f / d;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
        if (!inside(z, slack_re, slack_im)) break;
        if (z.imag() < 1e-12) z = {z.real(), 1e-12};  // stay in the closed upper half plane
    }
    z = best;
    // the refined zero must land in this box proper, otherwise a sibling box
    // would report the same zero twice
    return best_f <= 1e-10 && inside(z, 1e-12, 1e-12);
}

inline void locate_zeros(AbrevEvaluator& ab, const SpectrumBox& box, int count, int depth,
                         std::vector<Cplx>& out) {
    if (count == 0) return;
    if (depth > 60) throw numerical_error("spectrum: bisection failed to isolate a zero");
    if (count == 1) {
        Cplx z{0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi)};
        if (newton_refine(ab, box, z)) {
            out.push_back(z);
            return;
        }
        // fall through: bisect until the basin is tight enough for Newton
    }
    const bool split_re = (box.re_hi - box.re_lo) >= (box.im_hi - box.im_lo);
    for (Real frac : {0.5, 0.55, 0.45, 0.6, 0.4}) {
        SpectrumBox b1 = box, b2 = box;
        if (split_re) {
            const Real cut = box.re_lo + frac * (box.re_hi - box.re_lo);
            b1.re_hi = cut;
            b2.re_lo = cut;
        } else {
            const Real cut = box.im_lo + frac * (box.im_hi - box.im_lo);
            b1.im_hi = cut;
            b2.im_lo = cut;
        }
        int w1 = 0, w2 = 0;
        try {
            w1 = winding_number(ab, b1);
            w2 = winding_number(ab, b2);
        } catch (const numerical_error&) {
            continue;  // cut ran too close to a zero; try a shifted cut
        }
        if (w1 + w2 != count) continue;
        locate_zeros(ab, b1, w1, depth + 1, out);
        locate_zeros(ab, b2, w2, depth + 1, out);
        return;
    }
    throw numerical_error("spectrum: could not split the search box cleanly");
}

}  // namespace detail

// Returns the representatives (Re z >= 0) of the zero set of abrev inside the
// box, classified by kind; norming constants are left unset. The box's left
// edge is pushed to -1e-3 so imaginary-axis zeros sit strictly inside the
// contour; mirror zeros picked up by the overhang are dropped.
inline std::vector<DiscreteEigenpair> find_discrete_spectrum(
    const PotentialSample& u0, const SpectrumBox& box,
    std::vector<std::string>* warnings = nullptr, Real tol = 1e-12) {
    if (!(box.im_lo >= 1e-3))
        throw input_error("spectrum: search box must keep a 1e-3 margin above the real axis");
    if (!(box.re_hi > box.re_lo) || !(box.im_hi > box.im_lo))
        throw input_error("spectrum: empty search box");
    AbrevEvaluator ab(u0, tol);
    SpectrumBox work = box;
    // the overhang puts imaginary-axis zeros strictly inside the contour; a
    // user box with re_lo > 0 deliberately excludes the axis and is kept as is
    const bool axis_edge = box.re_lo <= 0.0;
    if (axis_edge) work.re_lo = box.re_lo - 1e-3;

    const int count = detail::winding_number(ab, work);
    std::vector<Cplx> zeros;
    detail::locate_zeros(ab, work, count, 0, zeros);
    if (int(zeros.size()) != count)
        throw numerical_error("spectrum: located zeros disagree with the winding count");

    for (std::size_t i = 0; i < zeros.size(); ++i)
        for (std::size_t j = i + 1; j < zeros.size(); ++j)
            if (std::abs(zeros[i] - zeros[j]) < 1e-8)
                throw input_error("spectrum: repeated eigenvalue (simplicity violated)");

    std::vector<DiscreteEigenpair> out;
    for (Cplx z : zeros) {
        // the axis band must dominate the refined zeros' position noise, or a
        // soliton wobbling to Re z < 0 would be discarded as a mirror
        if (z.real() < -1e-6) continue;  // mirror of a representative
        DiscreteEigenpair e;
        if (std::abs(z.real()) <= 1e-6) {
            e.z = {0.0, z.imag()};
            e.kind = EigenKind::soliton;
        } else {
            e.z = z;
            e.kind = EigenKind::breather_rep;
        }
        out.push_back(e);
    }

    if (warnings) {
        // edges the user chose can clip the spectrum; the axis overhang and
        // the default spectral floor are by construction and stay silent
        const Real wre = box.re_hi - box.re_lo, wim = box.im_hi - box.im_lo;
        for (const auto& e : out) {
            Real d = std::min((box.re_hi - e.z.real()) / wre,
                              (box.im_hi - e.z.imag()) / wim);
            if (!axis_edge) d = std::min(d, (e.z.real() - box.re_lo) / wre);
            if (box.im_lo > 1e-3) d = std::min(d, (e.z.imag() - box.im_lo) / wim);
            if (d < 0.05)
                warnings->push_back("eigenvalue near the search boundary; enlarge the box");
            if (e.kind == EigenKind::breather_rep && e.z.real() < 1e-2)
                warnings->push_back(
                    "breather eigenvalue close to the imaginary axis; its mirror nearly "
                    "touches the search contour");
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::pair(a.z.imag(), a.z.real()) < std::pair(b.z.imag(), b.z.real());
    });
    return out;
}

// ---------------------------------------------------------------------------
// norming constants

// c is returned in the closed-form (public) convention: the raw scattering
// ratio b_i/abrev'(z_i) is the residue-frame constant, rotated here by -i for
// solitons and +i for breathers (the inverse of the assembly-side rotation).
inline std::vector<DiscreteEigenpair> norming_constants(const PotentialSample& u0,
                                                        const std::vector<DiscreteEigenpair>& zeros,
                                                        Real tol = 1e-12) {
    check_potential(u0);
    if (zeros.empty()) return {};
    const CubicSpline sp = make_spline(u0);
    AbrevEvaluator ab(u0, tol);
    const std::size_t n = u0.x.size();

    std::vector<DiscreteEigenpair> out;
    out.reserve(zeros.size());
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        const Cplx zi = zeros[i].z;
        if (!(zi.imag() > 0.0)) throw input_error("norming: eigenvalue must have Im z > 0");

        // contour radius: clear of the axis, the other zeros, and every mirror
        Real rho = std::min(1e-2, 0.5 * zi.imag());
        for (std::size_t j = 0; j < zeros.size(); ++j) {
            const Cplx zj = zeros[j].z;
            if (j != i) rho = std::min(rho, 0.5 * std::abs(zi - zj));
            if (zj.real() > 1e-10) rho = std::min(rho, 0.5 * std::abs(zi + std::conj(zj)));
        }
        if (!(rho > 1e-8)) throw input_error("norming: eigenvalues too close for a contour");

        Cplx dsum = 0.0;
        for (int k = 0; k < 32; ++k) {
            const Cplx ph = std::exp(iu * (2.0 * pi * k / 32.0));
            dsum += ab(zi + rho * ph) / ph;
        }
        const Cplx dab = dsum / (32.0 * rho);
        if (std::abs(dab) < 1e-8) throw input_error("norming: eigenvalue is not a simple zero");

        // least-squares ratio m^-_1 = b e^{2ixz} m^+_2. The residual abrev at
        // the located zero (~1e-13) rides the e^{2 Im z |x|} growing mode, so
        // each column drowns near its decayed end; the window must shrink as
        // Im z grows or the edge nodes bias b and inflate the residual.
        const Real half = std::min(-u0.x.front(), u0.x.back());
        const Real win = std::min(0.8 * half, std::max(3.0, 7.0 / zi.imag()));
        const auto c1 = ode_integrate(detail::JostColRhs{&sp, 2.0 * iu * zi, 1},
                                      std::vector<Cplx>{1.0, 0.0}, u0.x, tol);
        const std::vector<Real> bwd(u0.x.rbegin(), u0.x.rend());
        const auto c2 = ode_integrate(detail::JostColRhs{&sp, 2.0 * iu * zi, 2},
                                      std::vector<Cplx>{0.0, 1.0}, bwd, tol);
        Cplx num = 0.0, den = 0.0;
        Real vv = 0.0;
        std::size_t used = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(u0.x[k]) > win) continue;
            const Cplx e = std::exp(2.0 * iu * u0.x[k] * zi);
            const Cplx w1 = e * c2[n - 1 - k][0], w2 = e * c2[n - 1 - k][1];
            num += std::conj(w1) * c1[k][0] + std::conj(w2) * c1[k][1];
            den += std::conj(w1) * w1 + std::conj(w2) * w2;
            vv += sq(std::abs(c1[k][0])) + sq(std::abs(c1[k][1]));
            ++used;
        }
        if (used < 16) throw input_error("norming: grid too coarse around x = 0");
        const Cplx b = num / den;
        Real rr = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(u0.x[k]) > win) continue;
            const Cplx e = std::exp(2.0 * iu * u0.x[k] * zi);
            rr += sq(std::abs(c1[k][0] - b * e * c2[n - 1 - k][0])) +
                  sq(std::abs(c1[k][1] - b * e * c2[n - 1 - k][1]));
        }
        if (!(std::sqrt(rr / vv) <= 1e-4))
            throw numerical_error("norming: Jost columns are not proportional at the eigenvalue");

        DiscreteEigenpair e = zeros[i];
        const Cplx raw = b / dab;
        Cplx c = (e.kind == EigenKind::soliton ? -iu : iu) * raw;
        if (e.kind == EigenKind::soliton) {
            if (std::abs(c.real()) > 1e-6 * std::abs(c))
                throw numerical_error("norming: soliton constant is not purely imaginary");
            c = {0.0, c.imag()};
        }
        e.c = c;
        out.push_back(e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// scattering data snapshots

struct ScatteringData {
    std::vector<Real> z_grid;
    std::vector<Cplx> r;
    std::vector<DiscreteEigenpair> solitons;   // sorted by zeta ascending
    std::vector<DiscreteEigenpair> breathers;  // sorted by velocity ascending
    Real t = 0.0;
};

inline ScatteringData evolve_scattering(const ScatteringData& data, Real t) {
    if (data.t != 0.0) throw input_error("evolve: scattering data must start at t = 0");
    ScatteringData out = data;
    out.t = t;
    for (std::size_t k = 0; k < out.r.size(); ++k) {
        const Real z = out.z_grid[k];
        out.r[k] *= std::exp(8.0 * iu * t * z * z * z);
    }
    auto push = [&](DiscreteEigenpair& e) {
        const Cplx ex = 8.0 * iu * t * e.z * e.z * e.z;
        if (std::abs(ex.real()) > 600.0)
            throw numerical_error("evolve: norming constant factor overflows; evolve at assembly");
        e.c *= std::exp(ex);
    };
    for (auto& e : out.solitons) push(e);
    for (auto& e : out.breathers) push(e);
    return out;
}

struct GenericityReport {
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

inline GenericityReport validate_genericity(const ScatteringData& data) {
    GenericityReport rep;
    std::vector<DiscreteEigenpair> all = data.solitons;
    all.insert(all.end(), data.breathers.begin(), data.breathers.end());

    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (std::abs(all[i].z - all[j].z) < 1e-8)
                rep.violations.push_back("repeated eigenvalue (simplicity violated)");
            if (std::abs(eigen_velocity(all[i]) - eigen_velocity(all[j])) < 1e-6)
                rep.violations.push_back("envelope velocities collide");
        }
    for (const auto& e : data.solitons)
        if (std::abs(e.z.real()) > 1e-10 || !(e.z.imag() > 0.0))
            rep.violations.push_back("soliton eigenvalue off the positive imaginary axis");
    for (const auto& e : data.breathers)
        if (!(e.z.real() > 1e-10) || !(e.z.imag() > 0.0))
            rep.violations.push_back("breather representative outside the open first quadrant");

    // |r|^2 = (1 - |abrev|^2)/|abrev|^2 on the real axis, so |abrev| >= 1e-6
    // is exactly |r| <= sqrt(1e12 - 1)
    for (std::size_t k = 0; k < data.r.size(); ++k)
        if (!std::isfinite(std::abs(data.r[k])) || std::abs(data.r[k]) > 1e6) {
            rep.violations.push_back("transition coefficient vanishes near the real axis");
            break;
        }
    return rep;
}

// Full direct transform at t = 0: reflection on the given grid, spectrum in
// the default box, norming constants, components sorted per convention.
inline ScatteringData analyze_potential(const PotentialSample& u0,
                                        const std::vector<Real>& z_grid,
                                        std::vector<std::string>* warnings = nullptr,
                                        Real tol = 1e-12) {
    ScatteringData data;
    data.z_grid = z_grid;
    const auto ts = transition_coefficients(u0, z_grid, tol);
    data.r.reserve(ts.size());
    for (const auto& s : ts) data.r.push_back(reflection(s));

    const auto zeros = find_discrete_spectrum(u0, default_spectrum_box(u0), warnings, tol);
    for (const auto& e : norming_constants(u0, zeros, tol))
        (e.kind == EigenKind::soliton ? data.solitons : data.breathers).push_back(e);
    std::sort(data.solitons.begin(), data.solitons.end(),
              [](const auto& a, const auto& b) { return a.z.imag() < b.z.imag(); });
    std::sort(data.breathers.begin(), data.breathers.end(),
              [](const auto& a, const auto& b) { return eigen_velocity(a) < eigen_velocity(b); });
    data.t = 0.0;
    return data;
}

}  // namespace mkdv
