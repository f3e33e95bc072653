#pragma once

#include <map>
#include <type_traits>

#include "mkdv/errors.hpp"
#include "mkdv/prelude.hpp"

namespace mkdv {

struct QuadRule {
    std::vector<Real> x;  // nodes on [-1, 1]
    std::vector<Real> w;
};

namespace detail {

inline QuadRule make_gauss_legendre(int n) {
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    // Newton on P_n, symmetric pair fill. Converges in a handful of steps
    // from the Chebyshev-like initial guess.
    for (int k = 0; k < (n + 1) / 2; ++k) {
        Real x = std::cos(pi * (k + 0.75) / (n + 0.5));
        Real pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            Real p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const Real p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const Real dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[k] = -x;
        r.x[n - 1 - k] = x;
        const Real w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[k] = w;
        r.w[n - 1 - k] = w;
    }
    return r;
}

}  // namespace detail

inline const QuadRule& gauss_legendre(int n) {
    if (n < 1) throw input_error("gauss_legendre: need at least one node");
    static std::map<int, QuadRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::make_gauss_legendre(n)).first;
    return it->second;
}

// Gauss-Legendre integral of f over [a, b] with n nodes.
template <class F>
auto integrate(F&& f, Real a, Real b, int n) {
    using T = std::invoke_result_t<F&, Real>;
    const QuadRule& q = gauss_legendre(n);
    const Real mid = 0.5 * (a + b), half = 0.5 * (b - a);
    T acc{};
    for (int k = 0; k < n; ++k) acc += q.w[k] * f(mid + half * q.x[k]);
    return half * acc;
}

}  // namespace mkdv
