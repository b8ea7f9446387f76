#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ergomax/opseq.hpp"

namespace ergomax {

// Seeded generator with self-contained uniform/normal draws (Box-Muller over
// raw 53-bit uniforms), so the stream never depends on the standard library's
// distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t integer(std::uint64_t bound) { return eng_() % bound; }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Self-adjoint Gaussian matrix, symmetrized, normalized to unit Schatten-2 norm.
inline CMat random_selfadjoint(Rng& rng, int d, bool unit_s2 = true) {
    CMat a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a(i, j) = Cplx{rng.normal(), rng.normal()};
    }
    CMat h = 0.5 * (a + a.adjoint());
    if (unit_s2) {
        const double n2 = std::sqrt(h.squaredNorm());
        if (n2 > 0) h /= n2;
    }
    return h;
}

inline CMat random_general(Rng& rng, int d) {
    CMat a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a(i, j) = Cplx{rng.normal(), rng.normal()};
    }
    const double n2 = std::sqrt(a.squaredNorm());
    if (n2 > 0) a /= n2;
    return a;
}

inline CMat random_unitary(Rng& rng, int d) {
    CMat a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a(i, j) = Cplx{rng.normal(), rng.normal()};
    }
    Eigen::HouseholderQR<CMat> qr(a);
    CMat Q = qr.householderQ();
    // fix the phase so the factorization is unique-ish
    CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        const Cplx r = R(i, i);
        if (std::abs(r) > 0) Q.col(i) *= r / std::abs(r);
    }
    return Q;
}

// Rotation angles for the diagonal unitary model U = diag(e^{2 pi i alpha_j}).
inline std::vector<double> random_unitary_angles(Rng& rng, int d) {
    std::vector<double> alpha(d);
    for (int j = 0; j < d; ++j) alpha[j] = rng.uniform();
    return alpha;
}

// Deterministic fallback: alpha_j = frac(j * golden ratio).
inline std::vector<double> golden_unitary_angles(int d) {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<double> alpha(d);
    for (int j = 0; j < d; ++j) {
        const double v = (j + 1) * phi;
        alpha[j] = v - std::floor(v);
    }
    return alpha;
}

// gamma^m(x) = U^m x U^{-m} for U = diag(e^{2 pi i alpha_j}); entrywise phases.
inline CMat conjugate_by_diag_power(const CMat& x, const std::vector<double>& alpha, long long m) {
    const int d = static_cast<int>(x.rows());
    CMat out(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double phase = 2.0 * std::numbers::pi *
                                 frac_of_product(static_cast<double>(m), alpha[i] - alpha[j]);
            out(i, j) = x(i, j) * std::polar(1.0, phase);
        }
    }
    return out;
}

inline OpSequence random_opseq(Rng& rng, int d, int len, long long base, bool selfadjoint) {
    std::vector<CMat> vals;
    vals.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
        vals.push_back(selfadjoint ? random_selfadjoint(rng, d) : random_general(rng, d));
    }
    return OpSequence(d, base, std::move(vals));
}

}  // namespace ergomax
