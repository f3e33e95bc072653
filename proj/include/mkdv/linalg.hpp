#pragma once

#include <algorithm>
#include <cstddef>

#include "mkdv/errors.hpp"
#include "mkdv/prelude.hpp"

namespace mkdv {

struct DenseSolveResult {
    std::vector<std::vector<Cplx>> x;  // one solution per right-hand side
    Real cond1;                        // 1-norm condition of the equilibrated matrix
};

// Row-major dense complex solve with partial pivoting. Rows and columns are
// equilibrated first so wildly scaled residue weights stay tractable; the
// condition number is computed exactly from inverse columns, affordable
// because pole systems stay tiny (quartet-expanded counts, not grids).
inline DenseSolveResult solve_dense(std::vector<Cplx> a, int n,
                                    std::vector<std::vector<Cplx>> rhs) {
    if (n <= 0 || a.size() != static_cast<std::size_t>(n) * n)
        throw input_error("solve_dense: bad dimensions");
    auto at = [&](int i, int j) -> Cplx& { return a[static_cast<std::size_t>(i) * n + j]; };

    std::vector<Real> rs(n, 1.0), cs(n, 1.0);
    for (int i = 0; i < n; ++i) {
        Real m = 0.0;
        for (int j = 0; j < n; ++j) m = std::max(m, std::abs(at(i, j)));
        if (m == 0.0) throw numerical_error("solve_dense: zero row");
        rs[i] = 1.0 / m;
        for (int j = 0; j < n; ++j) at(i, j) *= rs[i];
    }
    for (int j = 0; j < n; ++j) {
        Real m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(at(i, j)));
        if (m == 0.0) throw numerical_error("solve_dense: zero column");
        cs[j] = 1.0 / m;
        for (int i = 0; i < n; ++i) at(i, j) *= cs[j];
    }

    const std::vector<Cplx> eq = a;  // equilibrated copy for the norm

    std::vector<int> piv(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
        piv[k] = p;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
        const Cplx pivot = at(k, k);
        if (pivot == Cplx{}) throw numerical_error("solve_dense: singular system");
        for (int i = k + 1; i < n; ++i) {
            const Cplx f = at(i, k) / pivot;
            at(i, k) = f;
            for (int j = k + 1; j < n; ++j) at(i, j) -= f * at(k, j);
        }
    }

    auto solve_eq = [&](std::vector<Cplx> b) {
        // apply every interchange before eliminating: multiplier rows were
        // swapped along with the rest, so the permutation must come first
        for (int k = 0; k < n; ++k)
            if (piv[k] != k) std::swap(b[k], b[piv[k]]);
        for (int k = 0; k < n; ++k)
            for (int i = k + 1; i < n; ++i) b[i] -= at(i, k) * b[k];
        for (int k = n - 1; k >= 0; --k) {
            for (int j = k + 1; j < n; ++j) b[k] -= at(k, j) * b[j];
            b[k] /= at(k, k);
        }
        return b;
    };

    Real norm_a = 0.0, norm_inv = 0.0;
    for (int j = 0; j < n; ++j) {
        Real colsum = 0.0;
        for (int i = 0; i < n; ++i) colsum += std::abs(eq[static_cast<std::size_t>(i) * n + j]);
        norm_a = std::max(norm_a, colsum);
        std::vector<Cplx> e(n, Cplx{});
        e[j] = 1.0;
        const auto invcol = solve_eq(std::move(e));
        colsum = 0.0;
        for (int i = 0; i < n; ++i) colsum += std::abs(invcol[i]);
        norm_inv = std::max(norm_inv, colsum);
    }

    DenseSolveResult out;
    out.cond1 = norm_a * norm_inv;
    out.x.reserve(rhs.size());
    for (auto& b : rhs) {
        if (b.size() != static_cast<std::size_t>(n))
            throw input_error("solve_dense: rhs dimension mismatch");
        for (int i = 0; i < n; ++i) b[i] *= rs[i];
        auto y = solve_eq(std::move(b));
        for (int j = 0; j < n; ++j) y[j] *= cs[j];
        out.x.push_back(std::move(y));
    }
    return out;
}

}  // namespace mkdv
