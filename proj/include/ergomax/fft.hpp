#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ergomax/errors.hpp"

namespace ergomax {

using Cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t pow2_at_least(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place iterative radix-2 transform.
//   forward: X[j] = sum_m x[m] e^{-2 pi i j m / n}
//   inverse: x[m] = (1/n) sum_j X[j] e^{+2 pi i j m / n}
// Twiddles come from a single table filled with std::polar per entry, so the
// result is deterministic and accurate to ~1e-13 at n = 2^23.
inline void fft_pow2(std::vector<Cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!is_pow2(n)) throw ParameterError("fft_pow2: length must be a power of two");

    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    std::vector<Cplx> tw(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        tw[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Cplx w = tw[k * stride];
                const Cplx u = a[i + k];
                const Cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }

    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv;
    }
}

// Pairwise (cascade) summation; deterministic and accurate for long sums.
template <class It>
Cplx pairwise_sum(It begin, It end) {
    const std::size_t n = static_cast<std::size_t>(end - begin);
    if (n <= 8) {
        Cplx s{0.0, 0.0};
        for (It it = begin; it != end; ++it) s += *it;
        return s;
    }
    return pairwise_sum(begin, begin + n / 2) + pairwise_sum(begin + n / 2, end);
}

inline double pairwise_sum_abs(const std::vector<Cplx>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::abs(v[i]);
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum_abs(v, lo, mid) + pairwise_sum_abs(v, mid, hi);
}

}  // namespace ergomax
