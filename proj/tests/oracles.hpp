#pragma once

// Test-side oracles, kept independent of the library paths they check.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "ergomax/opseq.hpp"

namespace oracles {

using ergomax::CMat;
using ergomax::Cplx;

// primes by trial division
inline std::vector<std::uint64_t> primes_trial_division(std::size_t count) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 2; out.size() < count; ++n) {
        bool prime = true;
        for (std::uint64_t d = 2; d * d <= n; ++d) {
            if (n % d == 0) {
                prime = false;
                break;
            }
        }
        if (prime) out.push_back(n);
    }
    return out;
}

// adaptive Simpson quadrature for complex integrands; min_depth forces a few
// unconditional splits so periodic integrands cannot alias the error estimate
inline Cplx simpson_step(const std::function<Cplx(double)>& f, double a, double b, Cplx fa, Cplx fb,
                         Cplx fm, double tol, int depth, int min_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const Cplx flm = f(lm), frm = f(rm);
    const Cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const Cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || (min_depth <= 0 && std::abs(left + right - whole) < 15.0 * tol)) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson_step(f, a, m, fa, fm, flm, tol / 2, depth - 1, min_depth - 1) +
           simpson_step(f, m, b, fm, fb, frm, tol / 2, depth - 1, min_depth - 1);
}

inline Cplx adaptive_simpson(const std::function<Cplx(double)>& f, double a, double b,
                             double tol = 1e-12, int depth = 40, int min_depth = 4) {
    const double m = 0.5 * (a + b);
    return simpson_step(f, a, b, f(a), f(b), f(m), tol, depth, min_depth);
}

// k^(beta) through the substituted integrand, split into unit panels so the
// adaptive rule sees at most a few oscillations at a time
inline Cplx khat_oracle(double beta, int t) {
    auto f = [&](double u) {
        double ut = 1.0;
        for (int i = 0; i < t; ++i) ut *= u;
        return std::polar(1.0, -2.0 * std::numbers::pi * beta * ut);
    };
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(beta) * t / 4.0)));
    Cplx acc{0.0, 0.0};
    for (int i = 0; i < pieces; ++i) {
        acc += adaptive_simpson(f, static_cast<double>(i) / pieces, static_cast<double>(i + 1) / pieces, 1e-13);
    }
    return acc;
}

// direct O(n^2) DFT matching the library convention
inline std::vector<Cplx> dft_direct(const std::vector<Cplx>& x, bool inverse) {
    const std::size_t n = x.size();
    std::vector<Cplx> out(n, Cplx{0.0, 0.0});
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t m = 0; m < n; ++m) {
            out[j] += x[m] * std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                                 static_cast<double>((j * m) % n) / static_cast<double>(n));
        }
        if (inverse) out[j] /= static_cast<double>(n);
    }
    return out;
}

// direct double-loop convolution (f * K)(n) = sum_m f(n-m) K(m)
inline ergomax::OpSequence convolve_oracle(const ergomax::OpSequence& f, const ergomax::GridKernel& ker) {
    const long long lo = f.base() + ker.base;
    const long long hi = f.last() + ker.base + static_cast<long long>(ker.weights.size()) - 1;
    std::vector<CMat> vals;
    for (long long n = lo; n <= hi; ++n) {
        CMat acc = CMat::Zero(f.dim(), f.dim());
        for (std::size_t j = 0; j < ker.weights.size(); ++j) {
            const long long m = ker.base + static_cast<long long>(j);
            acc += ker.weights[j] * f.at(n - m);
        }
        vals.push_back(acc);
    }
    return ergomax::OpSequence(f.dim(), lo, std::move(vals));
}

// pointwise-sup maximal norm for real scalar families
inline double pointwise_sup_oracle(const std::vector<ergomax::OpSequence>& members, double p) {
    long long lo = 0, hi = -1;
    bool any = false;
    for (const auto& m : members) {
        if (m.empty()) continue;
        lo = any ? std::min(lo, m.base()) : m.base();
        hi = any ? std::max(hi, m.last()) : m.last();
        any = true;
    }
    if (!any) return 0.0;
    double acc = 0.0, mx = 0.0;
    for (long long n = lo; n <= hi; ++n) {
        double s = 0.0;
        for (const auto& m : members) s = std::max(s, std::abs(m.at(n)(0, 0)));
        if (std::isinf(p)) {
            mx = std::max(mx, s);
        } else {
            acc += std::pow(s, p);
        }
    }
    return std::isinf(p) ? mx : std::pow(acc, 1.0 / p);
}

}  // namespace oracles
