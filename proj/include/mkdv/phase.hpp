#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "mkdv/errors.hpp"
#include "mkdv/prelude.hpp"
#include "mkdv/quadrature.hpp"
#include "mkdv/scattering.hpp"
#include "mkdv/specfun.hpp"

namespace mkdv {

// Oscillatory phase driving every residue weight and jump factor. Odd in z;
// theta(conj z) = conj(theta(z)) for real (x,t).
inline Cplx theta(Cplx z, Real x, Real t) { return 4.0 * t * z * z * z + x * z; }

// Observation frame x = vt at a fixed t > 0. For x <= 0 the phase has two
// real stationary points +-z0 with 12 t z0^2 = -x; for x > 0 they leave the
// real axis, so the frame carries no z0 and refuses to hand one out.
class FrameContext {
  public:
    FrameContext(Real x, Real t) : x_(x), t_(t) {
        if (!std::isfinite(x) || !std::isfinite(t) || !(t > 0.0))
            throw input_error("frame_context: need finite x and t > 0");
        if (x_ <= 0.0) z0_ = std::sqrt(-x_ / (12.0 * t_));
    }

    Real x() const { return x_; }
    Real t() const { return t_; }
    Real velocity() const { return x_ / t_; }
    bool has_stationary_points() const { return x_ <= 0.0; }

    Real z0() const {
        if (!has_stationary_points())
            throw input_error("frame_context: stationary points are off the real axis for x > 0");
        return z0_;
    }

    // slow time z0^3 t; non-negative whenever it exists
    Real tau() const { return z0() * z0_ * z0_ * t_; }

  private:
    Real x_, t_, z0_ = 0.0;
};

inline Cplx theta(const FrameContext& ctx, Cplx z) { return theta(z, ctx.x(), ctx.t()); }

// kappa = -(1/2pi) log(1 + |r(z0)|^2); zero only for a reflectionless point.
inline Real kappa_of(Cplx r_at_z0) { return -std::log1p(std::norm(r_at_z0)) / (2.0 * pi); }

// Complex samples on a strictly increasing real grid with a natural cubic
// spline in between; the reflection coefficient is continuous, so pointwise
// values off the grid are meaningful.
class ReflectionInterp {
  public:
    ReflectionInterp(std::vector<Real> z, std::vector<Cplx> r)
        : z_(std::move(z)), r_(std::move(r)), m_(r_.size(), Cplx{}) {
        const std::size_t n = z_.size();
        if (n != r_.size() || n < 2)
            throw input_error("reflection samples: need matching arrays with two nodes");
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(z_[i]) || !std::isfinite(r_[i].real()) || !std::isfinite(r_[i].imag()))
                throw input_error("reflection samples: non-finite entry");
            if (i > 0 && !(z_[i] > z_[i - 1]))
                throw input_error("reflection samples: grid must be strictly increasing");
        }
        if (n > 2) {
            // Thomas sweep for the natural-spline second derivatives on a
            // possibly non-uniform grid
            std::vector<Real> diag(n - 2), sup(n - 2);
            std::vector<Cplx> rhs(n - 2);
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const Real hl = z_[i] - z_[i - 1], hr = z_[i + 1] - z_[i];
                diag[i - 1] = 2.0 * (hl + hr);
                sup[i - 1] = hr;
                rhs[i - 1] = 6.0 * ((r_[i + 1] - r_[i]) / hr - (r_[i] - r_[i - 1]) / hl);
            }
            for (std::size_t k = 1; k < n - 2; ++k) {
                const Real w = (z_[k + 1] - z_[k]) / diag[k - 1];  // sub-diagonal h_k
                diag[k] -= w * sup[k - 1];
                rhs[k] -= w * rhs[k - 1];
            }
            for (std::size_t k = n - 2; k-- > 0;)
                m_[k + 1] = (rhs[k] - (k + 2 < n - 1 ? sup[k] * m_[k + 2] : Cplx{})) / diag[k];
        }
    }

    Cplx operator()(Real s) const {
        if (s < z_.front() - 1e-12 || s > z_.back() + 1e-12)
            throw input_error("reflection samples: point outside the sampled grid");
        std::size_t i = std::upper_bound(z_.begin(), z_.end(), s) - z_.begin();
        i = std::min(std::max<std::size_t>(i, 1), z_.size() - 1) - 1;
        const Real h = z_[i + 1] - z_[i];
        const Real b = std::clamp((s - z_[i]) / h, 0.0, 1.0), a = 1.0 - b;
        return a * r_[i] + b * r_[i + 1] +
               (h * h / 6.0) * ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]);
    }

    Real zmin() const { return z_.front(); }
    Real zmax() const { return z_.back(); }
    bool covers(Real lo, Real hi) const {
        return z_.front() <= lo + 1e-12 && z_.back() + 1e-12 >= hi;
    }

  private:
    std::vector<Real> z_;
    std::vector<Cplx> r_;
    std::vector<Cplx> m_;  // spline second derivatives, natural ends
};

// chi(z) = (1/2pi i) int_{-z0}^{z0} log((1+|r(s)|^2)/(1+|r(z0)|^2)) ds/(s-z).
// The log ratio vanishes at s = z0 by construction. Points within 1e-12 of
// the open interval get the principal value; everything else, endpoint
// evaluations included, goes through plain Gauss-Legendre.
inline Cplx chi_of(const ReflectionInterp& r, Real z0, Cplx z) {
    if (!std::isfinite(z0) || !(z0 >= 0.0)) throw input_error("chi: z0 must be non-negative");
    if (!r.covers(-z0, z0))
        throw input_error("chi: reflection samples do not cover [-z0, z0]");
    if (z0 == 0.0) return {};
    const Real base = std::log1p(std::norm(r(z0)));
    const auto g = [&](Real s) { return std::log1p(std::norm(r(s))) - base; };
    const Real edge = 1e-10 * std::max(1.0, z0);
    if (std::abs(z.imag()) <= 1e-12 && std::abs(z.real()) < z0 - edge) {
        const Real pv = cauchy_pv_integral(g, -z0, z0, z.real(), 96);
        return Cplx(0.0, -pv / (2.0 * pi));
    }
    const Cplx val = integrate([&](Real s) { return g(s) / (s - z); }, -z0, z0, 128);
    return val / (2.0 * pi * iu);
}

// prod (z - conj p)/(z - p) over poles p in C+; unimodular for real z.
inline Cplx blaschke_product(const std::vector<Cplx>& poles, Cplx z) {
    Cplx prod = 1.0;
    for (const Cplx& p : poles) {
        const Cplx den = z - p;
        if (std::abs(den) < 1e-12) throw numerical_error("blaschke: evaluation at a pole");
        prod *= (z - std::conj(p)) / den;
    }
    return prod;
}

// ((z - z0)/(z + z0))^{i kappa} with each argument on the principal branch,
// accumulated through atan2 rather than a log of the quotient.
inline Cplx cut_power(Real z0, Real kappa, Cplx z) {
    if (z0 <= 0.0) return 1.0;
    const Cplx num = z - z0, den = z + z0;
    const Real logmod = 0.5 * (std::log(std::norm(num)) - std::log(std::norm(den)));
    const Real darg = std::arg(num) - std::arg(den);
    return std::exp(iu * kappa * Cplx(logmod, darg));
}

// Scalar conjugating factor for the stationary interval: a finite Blaschke
// product over the fast discrete modes, the cut power and the Cauchy-integral
// tail. Immutable once built; evaluation is pure.
class DeltaFunction {
  public:
    DeltaFunction(ReflectionInterp r, Real z0, std::vector<Cplx> poles)
        : r_(std::move(r)), z0_(z0), poles_(std::move(poles)) {
        if (!std::isfinite(z0_) || !(z0_ >= 0.0))
            throw input_error("delta: z0 must be non-negative");
        if (!r_.covers(-z0_, z0_))
            throw input_error("delta: reflection samples do not cover [-z0, z0]");
        for (const Cplx& p : poles_)
            if (!(p.imag() > 0.0))
                throw input_error("delta: blaschke poles must lie in the upper half plane");
        base_ = std::log1p(std::norm(r_(z0_)));
        kappa_ = -base_ / (2.0 * pi);
    }

    Real z0() const { return z0_; }
    Real kappa() const { return kappa_; }
    const std::vector<Cplx>& blaschke_poles() const { return poles_; }

    // log((1+|r(s)|^2)/(1+|r(z0)|^2)); vanishes at s = z0
    Real log_ratio(Real s) const { return std::log1p(std::norm(r_(s))) - base_; }

    Cplx chi(Cplx z) const { return chi_of(r_, z0_, z); }

  private:
    ReflectionInterp r_;
    Real z0_;
    std::vector<Cplx> poles_;
    Real base_ = 0.0;
    Real kappa_ = 0.0;
};

// Poles of the delta product: every soliton plus the pair {z_j, -conj z_j}
// for each breather of the faster set.
inline std::vector<Cplx> delta_poles(const ScatteringData& data,
                                     const std::vector<DiscreteEigenpair>& B_set) {
    std::vector<Cplx> p;
    p.reserve(data.solitons.size() + 2 * B_set.size());
    for (const auto& e : data.solitons) p.push_back(e.z);
    for (const auto& e : B_set) {
        p.push_back(e.z);
        p.push_back(-std::conj(e.z));
    }
    return p;
}

inline DeltaFunction make_delta_function(const ScatteringData& data, Real z0,
                                         const std::vector<DiscreteEigenpair>& B_set) {
    return DeltaFunction(ReflectionInterp(data.z_grid, data.r), z0, delta_poles(data, B_set));
}

enum class CutSide { none, plus, minus };

// delta(z) off the cut [-z0, z0]; pass CutSide::plus or minus for the
// one-sided boundary values on the open cut, where Plemelj shifts the Cauchy
// tail by +-g/2 and the cut power takes arg(z - z0) = +-pi.
inline Cplx delta(const DeltaFunction& df, Cplx z, CutSide side = CutSide::none) {
    const Real z0 = df.z0();
    if (side == CutSide::none) {
        if (z0 > 0.0 && std::abs(z.imag()) <= 1e-12 && std::abs(z.real()) <= z0 + 1e-12)
            throw input_error("delta: z sits on the branch cut; use delta_plus or delta_minus");
        return blaschke_product(df.blaschke_poles(), z) * cut_power(z0, df.kappa(), z) *
               std::exp(df.chi(z));
    }
    const Real s = z.real();
    if (!(z0 > 0.0) || std::abs(z.imag()) > 1e-9 || !(std::abs(s) < z0 - 1e-9 * std::max(1.0, z0)))
        throw input_error("delta: side flag expects a point strictly inside the cut");
    const Real sgn = side == CutSide::plus ? 1.0 : -1.0;
    const Cplx chi = df.chi(Cplx(s, 0.0)) + 0.5 * sgn * df.log_ratio(s);
    const Cplx pw = std::exp(iu * df.kappa() * Cplx(std::log((z0 - s) / (z0 + s)), sgn * pi));
    return blaschke_product(df.blaschke_poles(), Cplx(s, 0.0)) * pw * std::exp(chi);
}

inline Cplx delta_plus(const DeltaFunction& df, Real s) {
    return delta(df, Cplx(s, 0.0), CutSide::plus);
}

inline Cplx delta_minus(const DeltaFunction& df, Real s) {
    return delta(df, Cplx(s, 0.0), CutSide::minus);
}

// Which long-time decomposition the faster-mode sets feed: the dispersive
// window keeps solitons inside delta and singles out fast breathers, the
// soliton-resolution window collects every mode overtaking the frame.
enum class PartitionVariant { region1, region3 };

struct FramePartition {
    std::vector<DiscreteEigenpair> B_set;  // breathers strictly faster than the frame
    std::vector<DiscreteEigenpair> S_set;  // region3: all modes strictly faster than the frame
    Real frame_velocity = 0.0;
};

// Split the discrete spectrum against a frame velocity. A mode numerically
// at the frame is the frame's own mode and stays out by strict comparison;
// anything else within 1e-6 of the frame is a genericity tie.
inline FramePartition partition_sets(const ScatteringData& data, Real frame_velocity,
                                     PartitionVariant variant) {
    if (!std::isfinite(frame_velocity)) throw input_error("partition: frame velocity must be finite");
    FramePartition part;
    part.frame_velocity = frame_velocity;
    const Real exact = 1e-12 * std::max(1.0, std::abs(frame_velocity));
    const auto faster = [&](const DiscreteEigenpair& e) {
        const Real d = eigen_velocity(e) - frame_velocity;
        if (std::abs(d) > exact && std::abs(d) < 1e-6)
            throw input_error("partition: a mode velocity ties the frame velocity");
        return d >= 1e-6;
    };
    for (const auto& e : data.solitons)
        if (faster(e) && variant == PartitionVariant::region3) part.S_set.push_back(e);
    for (const auto& e : data.breathers) {
        if (!faster(e)) continue;
        if (variant == PartitionVariant::region1)
            part.B_set.push_back(e);
        else
            part.S_set.push_back(e);
    }
    return part;
}

// Unimodular Blaschke phase of the delta product at the stationary points.
inline Cplx eta0(const ScatteringData& data, Real z0,
                 const std::vector<DiscreteEigenpair>& B_set, int sign) {
    if (sign != 1 && sign != -1) throw input_error("eta0: sign must be +1 or -1");
    return blaschke_product(delta_poles(data, B_set), Cplx(Real(sign) * z0, 0.0));
}

// (1/pi) int_{-z0}^{z0} log((1+|r(s)|^2)/(1+|r(z0)|^2)) ds/(s - z0); the log
// ratio vanishes at z0, so the endpoint is regular and plain quadrature works.
inline Real phi_log_integral(const ReflectionInterp& r, Real z0) {
    if (!(z0 > 0.0)) throw input_error("phi: need z0 > 0");
    if (!r.covers(-z0, z0))
        throw input_error("phi: reflection samples do not cover [-z0, z0]");
    const Real base = std::log1p(std::norm(r(z0)));
    const auto f = [&](Real s) { return (std::log1p(std::norm(r(s))) - base) / (s - z0); };
    return integrate(f, -z0, z0, 128) / pi;
}

// Slow-phase offset of the dispersive cosine at z0, reduced to (-pi, pi].
// chi_pv is the value of phi_log_integral for the same data.
inline Real phi_at_z0(const ScatteringData& data, Real z0, Real kappa, Real chi_pv,
                      const std::vector<DiscreteEigenpair>& B_set) {
    if (!(z0 > 0.0)) throw input_error("phi: need z0 > 0");
    const ReflectionInterp r(data.z_grid, data.r);
    const Cplx r0 = r(z0);
    if (std::abs(r0) <= 1e-12) throw input_error("phi: r(z0) vanishes, phase undefined");
    Real phi = log_gamma(iu * kappa).imag() - 0.25 * pi - std::arg(r0) + chi_pv;
    Real shift = 0.0;
    for (const auto& e : data.solitons) shift += std::arg(z0 - e.z);
    for (const auto& e : B_set) shift += std::arg(z0 - e.z) + std::arg(z0 + std::conj(e.z));
    return principal_angle(phi - 4.0 * shift);
}

}  // namespace mkdv
