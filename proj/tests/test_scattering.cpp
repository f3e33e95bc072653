#include <catch2/catch_amalgamated.hpp>

#include <mkdv/reflectionless.hpp>
#include <mkdv/scattering.hpp>

#include <random>

using namespace mkdv;

namespace {

template <class F>
PotentialSample sample(F&& f, Real xl, Real xr, std::size_t n) {
    PotentialSample s;
    s.x = linspace(xl, xr, n);
    s.u.reserve(n);
    for (Real x : s.x) s.u.push_back(f(x));
    return s;
}

Real sech(Real x) { return 1.0 / std::cosh(x); }

// Hermite-Simpson residual of the frame ODE between collocated samples; a
// correct frame solution on an adequate grid drives this to integrator level.
Real jost_defect(const PotentialSample& u0, const std::vector<Mat2>& m, Cplx z) {
    const CubicSpline sp = make_spline(u0);
    const Cplx two_iz = 2.0 * iu * z;
    auto rhs = [&](Real x, const Mat2& y) {
        const Cplx q = iu * sp(x);
        return Mat2{q * y.m21, -two_iz * y.m12 + q * y.m22, two_iz * y.m21 + q * y.m11,
                    q * y.m12};
    };
    const Real h = u0.h();
    Real worst = 0.0;
    for (std::size_t i = 0; i + 1 < u0.x.size(); ++i) {
        const Mat2 f0 = rhs(u0.x[i], m[i]), f1 = rhs(u0.x[i + 1], m[i + 1]);
        const Mat2 ymid = 0.5 * (m[i] + m[i + 1]) + (h / 8.0) * (f0 - f1);
        const Mat2 fm = rhs(u0.x[i] + 0.5 * h, ymid);
        const Mat2 d = m[i + 1] - m[i] - (h / 6.0) * (f0 + 4.0 * fm + f1);
        worst = std::max(worst, d.max_abs() / h);
    }
    return worst;
}

}  // namespace

TEST_CASE("cubic spline reproduces smooth decaying samples") {
    const auto u0 = sample([](Real x) { return sq(sech(x)); }, -12.0, 12.0, 601);
    const CubicSpline sp = make_spline(u0);
    Real worst = 0.0;
    for (int k = 0; k < 599; ++k) {
        const Real x = u0.x[k] + 0.5 * u0.h();
        worst = std::max(worst, std::abs(sp(x) - sq(sech(x))));
    }
    REQUIRE(worst < 1e-6);
    REQUIRE(sp(-13.0) == 0.0);
    REQUIRE(sp(100.0) == 0.0);

    PotentialSample bad;
    bad.x = linspace(-1.0, 1.0, 5);
    bad.u.assign(5, 0.0);
    REQUIRE_THROWS_AS(make_spline(bad), input_error);

    // potential that has not decayed at the grid ends
    const auto wide = sample([](Real x) { return sech(x); }, -3.0, 3.0, 101);
    REQUIRE_THROWS_AS(make_spline(wide), input_error);

    PotentialSample skew = u0;
    skew.x[300] += 1e-6;  // breaks grid uniformity
    REQUIRE_THROWS_AS(make_spline(skew), input_error);
}

TEST_CASE("jost frames: free field, anchors, symmetries, residual") {
    const auto zero = sample([](Real) { return 0.0; }, -10.0, 10.0, 201);
    for (Cplx z : {Cplx{0.7, 0.0}, Cplx{0.3, 0.4}}) {
        const JostPair jp = jost_solve(zero, z);
        Real worst = 0.0;
        for (std::size_t i = 0; i < zero.x.size(); ++i) {
            worst = std::max(worst, (jp.m_minus[i] - Mat2::identity()).max_abs());
            worst = std::max(worst, (jp.m_plus[i] - Mat2::identity()).max_abs());
        }
        REQUIRE(worst < 1e-14);
    }

    const auto u0 = sample([](Real x) { return sech(x); }, -25.0, 25.0, 2501);
    const Cplx z{0.5, 0.0};
    const JostPair jp = jost_solve(u0, z);
    const std::size_t n = u0.x.size();

    REQUIRE((jp.m_minus.front() - Mat2::identity()).max_abs() < 1e-14);
    REQUIRE((jp.m_plus.back() - Mat2::identity()).max_abs() < 1e-14);

    // real z: second column is the sigma-conjugate of the first
    for (std::size_t i = 0; i < n; i += 100) {
        for (const Mat2& m : {jp.m_minus[i], jp.m_plus[i]}) {
            REQUIRE(std::abs(m.m11 - std::conj(m.m22)) < 1e-8);
            REQUIRE(std::abs(m.m12 + std::conj(m.m21)) < 1e-8);
        }
    }

    REQUIRE(jost_defect(u0, jp.m_minus, z) < 1e-8 * (1.0 + std::abs(z)));
    REQUIRE(jost_defect(u0, jp.m_plus, z) < 1e-8 * (1.0 + std::abs(z)));

    // det[m^- col1, m^+ col2] is independent of the meeting point
    Cplx det_ref = 0.0;
    for (std::size_t i : {n / 5, n / 2, 4 * n / 5}) {
        const Cplx det = jp.m_minus[i].m11 * jp.m_plus[i].m22 -
                         jp.m_minus[i].m21 * jp.m_plus[i].m12;
        if (i == n / 5) det_ref = det;
        REQUIRE(std::abs(det - det_ref) < 1e-9);
    }
    REQUIRE(std::abs(det_ref - Cplx{0.0, -1.0}) < 1e-8);

    REQUIRE_THROWS_AS(jost_solve(sample([](Real x) { return sech(x); }, -3.0, 3.0, 101), z),
                      input_error);
}

TEST_CASE("transition coefficients match independently computed values") {
    const auto u_sech = sample([](Real x) { return sech(x); }, -25.0, 25.0, 2501);
    const auto ts = transition_coefficients(u_sech, {-0.7, -0.5, 0.5, 0.7});

    // reflectionless amplitude: a comes from a pure Blaschke factor, b ~ 0
    REQUIRE(std::abs(ts[2].a - Cplx{0.0, 1.0}) < 1e-8);                  // z = 0.5
    REQUIRE(std::abs(ts[0].a - Cplx{12.0 / 37.0, -35.0 / 37.0}) < 1e-8);  // z = -0.7
    for (const auto& s : ts) {
        REQUIRE(std::abs(s.b) < 1e-6);
        REQUIRE(std::abs(sq(std::abs(s.a)) + sq(std::abs(s.b)) - 1.0) < 1e-8);
    }

    const auto u_08 = sample([](Real x) { return 0.8 * sech(x); }, -25.0, 25.0, 2501);
    const auto t8 = transition_coefficients(u_08, {-0.5, 0.5});
    REQUIRE(std::abs(t8[1].a - std::conj(Cplx{0.37491727315399731, -0.89697384157448157})) <
            1e-8);
    REQUIRE(std::abs(t8[1].b - Cplx{0.0, -0.23425406255152309}) < 1e-8);
    REQUIRE(std::abs(sq(std::abs(t8[1].a)) + sq(std::abs(t8[1].b)) - 1.0) < 1e-8);

    const auto u_2s2 = sample([](Real x) { return 2.0 * sech(2.0 * x); }, -15.0, 15.0, 1501);
    const auto t2 = transition_coefficients(u_2s2, {-0.7, 0.7});
    REQUIRE(std::abs(t2[1].a - std::conj(Cplx{-0.51 / 1.49, -1.4 / 1.49})) < 1e-8);
    REQUIRE(std::abs(t2[1].b) < 1e-6);

    const auto zero = sample([](Real) { return 0.0; }, -10.0, 10.0, 201);
    for (const auto& s : transition_coefficients(zero, {-1.0, -0.3, 0.3, 1.0})) {
        REQUIRE(std::abs(s.a - 1.0) < 1e-12);
        REQUIRE(std::abs(s.b) < 1e-12);
    }

    REQUIRE_THROWS_AS(transition_coefficients(u_sech, {0.5, 0.7}), input_error);
}

TEST_CASE("abrev evaluator continues a into the upper half plane") {
    AbrevEvaluator ab_sech(sample([](Real x) { return sech(x); }, -25.0, 25.0, 2501));
    REQUIRE(std::abs(ab_sech({0.3, 0.2}) - Cplx{-6.0 / 29.0, -15.0 / 29.0}) < 1e-8);
    REQUIRE(std::abs(ab_sech({1.1, 0.4}) - Cplx{1.12 / 2.02, -1.1 / 2.02}) < 1e-8);

    AbrevEvaluator ab_08(sample([](Real x) { return 0.8 * sech(x); }, -25.0, 25.0, 2501));
    REQUIRE(std::abs(ab_08({0.2, 0.3}) - Cplx{0.08287374169213857, -0.27933511863551280}) <
            1e-8);
}

TEST_CASE("reflection coefficient arithmetic and symmetry") {
    const TransitionSample s{0.4, {0.6, 0.0}, {0.0, 0.8}};
    REQUIRE(std::abs(reflection(s) - Cplx{0.0, -4.0 / 3.0}) < 1e-15);

    const TransitionSample dead{0.4, {0.0, 0.0}, {1.0, 0.0}};
    REQUIRE_THROWS_AS(reflection(dead), input_error);

    // r(-z) = -conj r(z) even for an asymmetric potential
    const auto u0 = sample([](Real x) { return sech(x) + 0.2 * sech(x - 1.0); }, -25.0, 25.0,
                           2001);
    const auto ts = transition_coefficients(u0, {-1.1, -0.6, 0.6, 1.1});
    const Cplx rp6 = reflection(ts[2]), rm6 = reflection(ts[1]);
    const Cplx rp11 = reflection(ts[3]), rm11 = reflection(ts[0]);
    REQUIRE(std::abs(rm6 + std::conj(rp6)) < 1e-8);
    REQUIRE(std::abs(rm11 + std::conj(rp11)) < 1e-8);
    for (const auto& t : ts)
        REQUIRE(std::abs(sq(std::abs(t.a)) + sq(std::abs(t.b)) - 1.0) < 1e-8);
}

TEST_CASE("discrete spectrum of known potentials") {
    const auto weak = sample([](Real x) { return 0.1 * sech(x); }, -20.0, 20.0, 801);
    REQUIRE(find_discrete_spectrum(weak, default_spectrum_box(weak)).empty());

    const auto u_2s2 = sample([](Real x) { return 2.0 * sech(2.0 * x); }, -15.0, 15.0, 1501);
    std::vector<std::string> warn;
    const auto zs = find_discrete_spectrum(u_2s2, default_spectrum_box(u_2s2), &warn);
    REQUIRE(zs.size() == 1);
    REQUIRE(zs[0].kind == EigenKind::soliton);
    REQUIRE(zs[0].z.real() == 0.0);
    REQUIRE(std::abs(zs[0].z - Cplx{0.0, 1.0}) < 1e-7);
    REQUIRE(warn.empty());

    const auto u_2s = sample([](Real x) { return 2.0 * sech(x); }, -25.0, 25.0, 2501);
    const auto z2 = find_discrete_spectrum(u_2s, default_spectrum_box(u_2s));
    REQUIRE(z2.size() == 2);
    REQUIRE(std::abs(z2[0].z - Cplx{0.0, 0.5}) < 1e-6);
    REQUIRE(std::abs(z2[1].z - Cplx{0.0, 1.5}) < 1e-6);
    REQUIRE(z2[0].kind == EigenKind::soliton);
    REQUIRE(z2[1].kind == EigenKind::soliton);

    const auto u_br =
        sample([](Real x) { return one_breather(0.8, 1.3, {0.5, -0.2}, x, 0.0); }, -16.0,
               16.0, 1601);
    const auto zb = find_discrete_spectrum(u_br, default_spectrum_box(u_br));
    REQUIRE(zb.size() == 1);
    REQUIRE(zb[0].kind == EigenKind::breather_rep);
    REQUIRE(std::abs(zb[0].z - Cplx{0.8, 1.3}) < 1e-6);

    REQUIRE_THROWS_AS(find_discrete_spectrum(u_2s2, {0.0, 2.0, 1e-4, 2.0}), input_error);
    REQUIRE_THROWS_AS(find_discrete_spectrum(u_2s2, {2.0, 1.0, 1e-3, 2.0}), input_error);

    // an eigenvalue within 5% of a user-chosen edge draws a warning
    warn.clear();
    const auto tight = find_discrete_spectrum(u_2s2, {0.0, 1.05, 1e-3, 1.05}, &warn);
    REQUIRE(tight.size() == 1);
    REQUIRE(!warn.empty());
}

TEST_CASE("norming constants: scale, translation and axis snap") {
    const auto u_2s2 = sample([](Real x) { return 2.0 * sech(2.0 * x); }, -15.0, 15.0, 1501);
    const auto zs = find_discrete_spectrum(u_2s2, default_spectrum_box(u_2s2));
    const auto cs = norming_constants(u_2s2, zs);
    REQUIRE(cs.size() == 1);
    REQUIRE(std::abs(cs[0].c - Cplx{0.0, 2.0}) < 1e-5);
    REQUIRE(cs[0].c.real() == 0.0);

    // translating the potential right by x0 scales |c| by exp(2 zeta x0)
    const auto shifted =
        sample([](Real x) { return 2.0 * sech(2.0 * (x - 1.0)); }, -14.0, 16.0, 1501);
    const auto zs2 = find_discrete_spectrum(shifted, default_spectrum_box(shifted));
    REQUIRE(zs2.size() == 1);
    const auto cs2 = norming_constants(shifted, zs2);
    REQUIRE(std::abs(cs2[0].c - Cplx{0.0, 2.0 * std::exp(2.0)}) <
            1e-4 * std::abs(cs2[0].c));

    DiscreteEigenpair below;
    below.z = {0.0, -1.0};
    REQUIRE_THROWS_AS(norming_constants(u_2s2, {below}), input_error);
}

TEST_CASE("round trip through an assembled two-soliton plus breather state") {
    const std::vector<DiscreteEigenpair> sols = {
        {Cplx{0.0, 0.9}, Cplx{0.0, 1.1}, EigenKind::soliton},
        {Cplx{0.0, 1.3}, Cplx{0.0, -0.8}, EigenKind::soliton},
    };
    const std::vector<DiscreteEigenpair> brs = {
        {Cplx{0.7, 1.2}, Cplx{0.5, -0.2}, EigenKind::breather_rep},
    };
    PotentialSample u0;
    u0.x = linspace(-28.0, 28.0, 2801);
    u0.u.reserve(u0.x.size());
    for (Real x : u0.x)
        u0.u.push_back(discrete_rhp_solve(assemble_pole_system(sols, brs, x, 0.0)).u);

    std::vector<std::string> warn;
    const auto zs = find_discrete_spectrum(u0, default_spectrum_box(u0), &warn);
    REQUIRE(zs.size() == 3);
    REQUIRE(warn.empty());
    const auto cs = norming_constants(u0, zs);

    // sorted by (Im, Re): 0.9i, 0.7+1.2i, 1.3i
    const Cplx want_z[3] = {{0.0, 0.9}, {0.7, 1.2}, {0.0, 1.3}};
    const Cplx want_c[3] = {{0.0, 1.1}, {0.5, -0.2}, {0.0, -0.8}};
    const EigenKind want_k[3] = {EigenKind::soliton, EigenKind::breather_rep,
                                 EigenKind::soliton};
    for (int i = 0; i < 3; ++i) {
        REQUIRE(cs[i].kind == want_k[i]);
        REQUIRE(std::abs(cs[i].z - want_z[i]) < 1e-6);
        REQUIRE(std::abs(cs[i].c - want_c[i]) < 1e-4 * std::abs(want_c[i]));
    }
}

TEST_CASE("spectrum and reflection respond stably to small perturbations") {
    const Real eps = 1e-3;
    const auto base = sample([](Real x) { return 2.0 * sech(2.0 * x); }, -15.0, 15.0, 1501);
    const auto bump =
        sample([&](Real x) { return 2.0 * sech(2.0 * x) + eps * sech(x); }, -15.0, 15.0, 1501);

    const auto z0 = norming_constants(base, find_discrete_spectrum(base, default_spectrum_box(base)));
    const auto z1 = norming_constants(bump, find_discrete_spectrum(bump, default_spectrum_box(bump)));
    REQUIRE(z0.size() == z1.size());
    REQUIRE(std::abs(z1[0].z - z0[0].z) <= 50.0 * eps);
    REQUIRE(std::abs(z1[0].c - z0[0].c) <= 50.0 * eps * std::max(1.0, std::abs(z0[0].c)));

    const std::vector<Real> grid = {-1.5, -0.5, 0.5, 1.5};
    const auto r0 = transition_coefficients(base, grid);
    const auto r1 = transition_coefficients(bump, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        REQUIRE(std::abs(reflection(r1[k]) - reflection(r0[k])) <= 50.0 * eps);
}

TEST_CASE("small random potentials carry no bound states and stay unitary") {
    std::mt19937 rng(20260816u);
    std::uniform_real_distribution<Real> uni(0.0, 1.0);
    const std::vector<Real> grid = {-1.6, -1.0, -0.4, 0.4, 1.0, 1.6};

    for (int trial = 0; trial < 20; ++trial) {
        const Real amp = 0.05 + 0.15 * uni(rng);
        struct Bump {
            Real a, mu, sig, om, ph;
        };
        std::vector<Bump> bumps(3);
        for (auto& b : bumps)
            b = {2.0 * uni(rng) - 1.0, 6.0 * uni(rng) - 3.0, 0.6 + 1.2 * uni(rng),
                 2.0 * uni(rng), 2.0 * pi * uni(rng)};
        auto f = [&](Real x) {
            Real u = 0.0;
            for (const auto& b : bumps)
                u += b.a * std::cos(b.om * x + b.ph) * std::exp(-sq(x - b.mu) / (2.0 * sq(b.sig)));
            return u;
        };
        auto u0 = sample(f, -20.0, 20.0, 401);
        const Real m = max_abs_potential(u0);
        REQUIRE(m > 0.0);
        for (auto& v : u0.u) v *= amp / m;

        REQUIRE(find_discrete_spectrum(u0, default_spectrum_box(u0)).empty());
        for (const auto& s : transition_coefficients(u0, grid))
            REQUIRE(std::abs(sq(std::abs(s.a)) + sq(std::abs(s.b)) - 1.0) < 1e-8);
    }
}

TEST_CASE("scattering data evolves by explicit phase factors") {
    ScatteringData d0;
    d0.z_grid = {-0.5, 0.5};
    d0.r = {Cplx{0.1, -0.2}, Cplx{0.2, 0.1}};
    d0.solitons = {{Cplx{0.0, 1.0}, Cplx{0.0, 2.0}, EigenKind::soliton}};
    d0.breathers = {{Cplx{1.0, 1.0}, Cplx{0.3, 0.4}, EigenKind::breather_rep}};

    const auto same = evolve_scattering(d0, 0.0);
    REQUIRE(same.r[0] == d0.r[0]);
    REQUIRE(same.solitons[0].c == d0.solitons[0].c);

    const Real t = 0.1;
    const auto dt = evolve_scattering(d0, t);
    REQUIRE(dt.t == t);
    // real z: pure phase
    for (int k : {0, 1}) {
        REQUIRE(std::abs(std::abs(dt.r[k]) - std::abs(d0.r[k])) < 1e-15);
        const Real zz = d0.z_grid[k];
        REQUIRE(std::abs(dt.r[k] - d0.r[k] * std::exp(iu * 8.0 * t * zz * zz * zz)) < 1e-15);
    }
    // z = i: factor exp(8 t)
    REQUIRE(std::abs(dt.solitons[0].c - Cplx{0.0, 2.0 * std::exp(0.8)}) < 1e-12);
    // z = 1 + i: z^3 = -2 + 2i, so |c| shrinks by exp(-16 t)
    REQUIRE(std::abs(std::abs(dt.breathers[0].c) - 0.5 * std::exp(-1.6)) < 1e-12);

    REQUIRE_THROWS_AS(evolve_scattering(dt, 0.2), input_error);

    ScatteringData fast;
    fast.solitons = {{Cplx{0.0, 1.0}, Cplx{0.0, 2.0}, EigenKind::soliton}};
    REQUIRE_THROWS_AS(evolve_scattering(fast, 80.0), numerical_error);
}

TEST_CASE("genericity checks flag structured collisions") {
    ScatteringData empty;
    REQUIRE(validate_genericity(empty).pass());

    ScatteringData collide;
    collide.solitons = {{Cplx{0.0, 0.5}, Cplx{0.0, 1.0}, EigenKind::soliton},
                        {Cplx{0.0, 1.0}, Cplx{0.0, 1.0}, EigenKind::soliton}};
    collide.breathers = {{Cplx{1.0, 2.0}, Cplx{1.0, 0.0}, EigenKind::breather_rep}};
    const auto rep = validate_genericity(collide);  // 4 zeta^2 = 4 = 4 eta^2 - 12 xi^2
    REQUIRE(!rep.pass());
    bool saw_velocity = false;
    for (const auto& v : rep.violations) saw_velocity |= v.find("velocit") != std::string::npos;
    REQUIRE(saw_velocity);

    ScatteringData dup;
    dup.solitons = {{Cplx{0.0, 0.7}, Cplx{0.0, 1.0}, EigenKind::soliton},
                    {Cplx{0.0, 0.7}, Cplx{0.0, 2.0}, EigenKind::soliton}};
    const auto rep2 = validate_genericity(dup);
    REQUIRE(!rep2.pass());
    bool saw_simple = false;
    for (const auto& v : rep2.violations) saw_simple |= v.find("simpl") != std::string::npos;
    REQUIRE(saw_simple);

    ScatteringData off_axis;
    off_axis.solitons = {{Cplx{0.2, 0.7}, Cplx{0.0, 1.0}, EigenKind::soliton}};
    REQUIRE(!validate_genericity(off_axis).pass());

    ScatteringData huge_r;
    huge_r.z_grid = {0.5};
    huge_r.r = {Cplx{2e6, 0.0}};
    REQUIRE(!validate_genericity(huge_r).pass());
}

TEST_CASE("analyze_potential assembles ordered scattering data") {
    const auto u0 = sample([](Real x) { return 2.0 * sech(x); }, -25.0, 25.0, 2501);
    std::vector<std::string> warn;
    const auto data = analyze_potential(u0, {-1.0, -0.5, 0.5, 1.0}, &warn);
    REQUIRE(data.t == 0.0);
    REQUIRE(data.r.size() == 4);
    REQUIRE(data.breathers.empty());
    REQUIRE(data.solitons.size() == 2);
    REQUIRE(data.solitons[0].z.imag() < data.solitons[1].z.imag());
    REQUIRE(std::abs(data.solitons[0].z - Cplx{0.0, 0.5}) < 1e-6);
    REQUIRE(std::abs(data.solitons[1].z - Cplx{0.0, 1.5}) < 1e-6);
    // reconstructing from {(0.5i, 2i), (1.5i, 6i)} reproduces this potential
    // to machine precision, which pins both constants
    REQUIRE(std::abs(data.solitons[0].c - Cplx{0.0, 2.0}) < 1e-5);
    REQUIRE(std::abs(data.solitons[1].c - Cplx{0.0, 6.0}) < 3e-5);
    REQUIRE(validate_genericity(data).pass());
}
