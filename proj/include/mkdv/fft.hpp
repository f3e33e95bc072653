#pragma once

#include <cstddef>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mkdv/errors.hpp"
#include "mkdv/prelude.hpp"

namespace mkdv {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

// e^{-2 pi i k / n} for k < n/2, cached per size: incremental twiddle updates
// would drift by O(n) ulps, which the 1e-12 spectral invariants cannot spare.
inline const std::vector<Cplx>& fft_twiddles(std::size_t n) {
    static std::unordered_map<std::size_t, std::vector<Cplx>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<Cplx> t(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const Real ang = -2.0 * pi * static_cast<Real>(k) / static_cast<Real>(n);
            t[k] = Cplx{std::cos(ang), std::sin(ang)};
        }
        it = cache.emplace(n, std::move(t)).first;
    }
    return it->second;
}

inline void fft_transform(std::vector<Cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw input_error("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& tw = fft_twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t blk = 0; blk < n; blk += len) {
            for (std::size_t k = 0; k < half; ++k) {
                Cplx w = tw[k * stride];
                if (inverse) w = std::conj(w);
                const Cplx u = a[blk + k];
                const Cplx v = a[blk + k + half] * w;
                a[blk + k] = u + v;
                a[blk + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const Real scale = 1.0 / static_cast<Real>(n);
        for (auto& z : a) z *= scale;
    }
}

}  // namespace detail

// Forward DFT, X_k = sum_j x_j e^{-2 pi i j k / n}.
inline void fft_forward(std::vector<Cplx>& a) { detail::fft_transform(a, false); }

// Inverse DFT including the 1/n factor.
inline void fft_inverse(std::vector<Cplx>& a) { detail::fft_transform(a, true); }

}  // namespace mkdv
