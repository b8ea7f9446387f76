#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "ergomax/errors.hpp"
#include "ergomax/fft.hpp"
#include "ergomax/kernels.hpp"
#include "ergomax/opseq.hpp"
#include "ergomax/threads.hpp"

namespace ergomax {

// ---------------------------------------------------------------------------
// Band-limited extension along Phi(x) = (sin(pi x)/(pi x))^2 and its inverse
// via a fixed reconstruction window Psi with Psi^ = 1 on [-1,1].
// ---------------------------------------------------------------------------

inline double sinc_sq(double x) {
    if (x == 0.0) return 1.0;
    const double s = std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    return s * s;
}

// f_ext(x) = sum_n f(n) Phi(x - n); exact finite sum over the support.
inline CMat extend(const OpSequence& f, double x) {
    CMat out = CMat::Zero(f.dim(), f.dim());
    for (long long n = f.base(); n <= f.last(); ++n) {
        const double w = sinc_sq(x - static_cast<double>(n));
        if (w != 0.0) out += w * f.at(n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Psi: inverse transform of the psi-style bump with plateau [-1,1] and
// support [-2,2], cached on the step-1/64 grid |x| <= 64. The inversion is a
// rectangle-rule transform at spacing 1/128, evaluated by one 8192-point FFT;
// for this spectrum the rule is exact up to the alias sum at |x| >= 128,
// which is far below the recorded tail bound.
// ---------------------------------------------------------------------------

class PsiCache {
public:
    static constexpr int kStepsPerUnit = 64;
    static constexpr int kHalfWidth = 64;
    static constexpr std::size_t kFftLen = 8192;  // = 2 * kStepsPerUnit * kHalfWidth
    static constexpr double kTailBound = 1e-8;    // documented; measured ~2e-13

    PsiCache() {
        const double delta = 1.0 / 128.0;
        // psi dilated to plateau [-1,1], support [-2,2], so Psi^ = 1 on [-1,1]
        const BumpSpec spec{1.0, 2.0, BumpSpec::Kind::Psi};
        std::vector<Cplx> buf(kFftLen, Cplx{0.0, 0.0});
        for (std::size_t m = 0; m < kFftLen; ++m) {
            const long long mm = (m <= kFftLen / 2) ? static_cast<long long>(m)
                                                    : static_cast<long long>(m) - static_cast<long long>(kFftLen);
            buf[m] = bump_eval(spec, static_cast<double>(mm) * delta);
        }
        fft_pow2(buf, /*inverse=*/true);
        // ifft includes 1/len; the rectangle rule wants spacing delta
        values_.resize(kFftLen + 1);
        const double scale = delta * static_cast<double>(kFftLen);
        for (std::size_t j = 0; j <= kFftLen; ++j) {
            values_[j] = scale * buf[j % kFftLen].real();
        }
    }

    // Psi(j / 64) for |j| <= 4096; zero beyond the cached window.
    double at_grid(long long j) const {
        const long long half = static_cast<long long>(kFftLen) / 2;
        if (j < -half || j > half) return 0.0;
        const std::size_t idx = static_cast<std::size_t>((j + static_cast<long long>(kFftLen)) %
                                                         static_cast<long long>(kFftLen));
        return values_[idx];
    }

    double integral_abs() const {
        double acc = 0.0;
        for (std::size_t j = 0; j < kFftLen; ++j) acc += std::abs(values_[j]);
        return acc / kStepsPerUnit;
    }

private:
    std::vector<double> values_;
};

inline const PsiCache& psi_cache() {
    static const PsiCache cache;
    return cache;
}

// f(n) = int f_ext(x) Psi(n - x) dx by the aligned rectangle rule. Any step
// 2^-m with 3 <= m <= 6 lands every node on the Psi grid; the integrand's
// spectrum lives in [-3,3], so steps <= 1/8 incur no alias error at all and
// only the Psi tail (< 1e-8) remains.
inline CMat reconstruct(const OpSequence& f, long long n, double quad_step) {
    int m_exp = -1;
    for (int m = 3; m <= 6; ++m) {
        if (quad_step == std::ldexp(1.0, -m)) m_exp = m;
    }
    if (m_exp < 0) {
        throw ParameterError("reconstruct: quad_step must be 2^-m with 3 <= m <= 6");
    }
    const auto& psi = psi_cache();
    const long long per_unit = 1ll << m_exp;
    const long long grid_ratio = PsiCache::kStepsPerUnit / per_unit;
    const long long half = PsiCache::kHalfWidth * per_unit;
    CMat acc = CMat::Zero(f.dim(), f.dim());
    for (long long j = -half; j <= half; ++j) {
        // x = n - j * step; Psi(n - x) = Psi(j * step)
        const double psi_w = psi.at_grid(j * grid_ratio);
        if (psi_w == 0.0) continue;
        const double x = static_cast<double>(n) - static_cast<double>(j) * quad_step;
        acc += psi_w * extend(f, x);
    }
    return quad_step * acc;
}

// The four nonnegative pieces of Psi on the cache grid:
// (Re Psi)_+, (Re Psi)_-, (Im Psi)_+, (Im Psi)_- (Psi is real, so the last two
// vanish). Reassembly Psi = P1 - P2 + i (P3 - P4) is exact at every grid point.
inline std::array<std::vector<double>, 4> psi_positive_parts() {
    const auto& psi = psi_cache();
    const long long half = static_cast<long long>(PsiCache::kFftLen) / 2;
    std::array<std::vector<double>, 4> parts;
    for (auto& p : parts) p.reserve(static_cast<std::size_t>(2 * half + 1));
    for (long long j = -half; j <= half; ++j) {
        const double v = psi.at_grid(j);
        parts[0].push_back(v > 0.0 ? v : 0.0);
        parts[1].push_back(v < 0.0 ? -v : 0.0);
        parts[2].push_back(0.0);
        parts[3].push_back(0.0);
    }
    return parts;
}

// ---------------------------------------------------------------------------
// The alpha and sigma rearrangements.
//
// alpha folds residues mod q into an inner l_inf(Z/qZ) factor realized as a
// block-diagonal qd x qd algebra: alpha(f)(n1) = blockdiag f(n1 q + n2),
// 0 <= n2 < q. (The index n1 counts lattice cells, so this is the residue
// fold composed with the qZ -> Z reindexing; counting measure makes every
// L_p norm invariant, exactly.) sigma dilates the support onto qZ:
// sigma(f)(n q) = f(n).
// ---------------------------------------------------------------------------

inline long long floor_div(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline OpSequence alpha_map(const OpSequence& f, int q) {
    if (q < 1) throw ParameterError("alpha_map: q must be >= 1");
    if (f.empty()) return OpSequence(f.dim() * q, 0, {});
    const int d = f.dim();
    const long long lo = floor_div(f.base(), q);
    const long long hi = floor_div(f.last(), q);
    std::vector<CMat> vals;
    vals.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long long n1 = lo; n1 <= hi; ++n1) {
        CMat block = CMat::Zero(d * q, d * q);
        for (int n2 = 0; n2 < q; ++n2) {
            block.block(n2 * d, n2 * d, d, d) = f.at(n1 * q + n2);
        }
        vals.push_back(std::move(block));
    }
    return OpSequence(d * q, lo, std::move(vals));
}

inline OpSequence alpha_inverse(const OpSequence& g, int q) {
    if (q < 1) throw ParameterError("alpha_inverse: q must be >= 1");
    if (g.dim() % q != 0) throw ParameterError("alpha_inverse: dimension not divisible by q");
    const int d = g.dim() / q;
    if (g.empty()) return OpSequence(d, 0, {});
    // verify the block-diagonal shape before unfolding
    for (const auto& m : g.values()) {
        for (int r = 0; r < q; ++r) {
            for (int c = 0; c < q; ++c) {
                if (r == c) continue;
                if (m.block(r * d, c * d, d, d).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
                    throw ParameterError("alpha_inverse: input is not block-diagonal");
                }
            }
        }
    }
    std::vector<CMat> vals(static_cast<std::size_t>(g.size()) * q, CMat::Zero(d, d));
    for (long long i = 0; i < static_cast<long long>(g.size()); ++i) {
        for (int n2 = 0; n2 < q; ++n2) {
            vals[static_cast<std::size_t>(i * q + n2)] = g.values()[static_cast<std::size_t>(i)].block(n2 * d, n2 * d, d, d);
        }
    }
    return OpSequence(d, (g.base()) * q, std::move(vals));
}

inline OpSequence sigma_map(const OpSequence& f, int q) {
    if (q < 1) throw ParameterError("sigma_map: q must be >= 1");
    if (f.empty() || q == 1) return f;
    std::vector<CMat> vals(static_cast<std::size_t>((f.size() - 1)) * q + 1, CMat::Zero(f.dim(), f.dim()));
    for (std::size_t i = 0; i < f.size(); ++i) vals[i * q] = f.values()[i];
    return OpSequence(f.dim(), f.base() * q, std::move(vals));
}

inline OpSequence sigma_inverse(const OpSequence& f, int q) {
    if (q < 1) throw ParameterError("sigma_inverse: q must be >= 1");
    if (f.empty() || q == 1) return f;
    for (long long n = f.base(); n <= f.last(); ++n) {
        if (n % q != 0 && f.at(n).cwiseAbs().maxCoeff() != 0.0) {
            throw ParameterError("sigma_inverse: support not contained in " + std::to_string(q) + "Z");
        }
    }
    const long long lo = floor_div(f.base() + q - 1, q);  // ceil(base / q)
    const long long hi = floor_div(f.last(), q);
    std::vector<CMat> vals;
    for (long long n = lo; n <= hi; ++n) vals.push_back(f.at(n * q));
    return OpSequence(f.dim(), lo, std::move(vals));
}

// ---------------------------------------------------------------------------
// Discrete Fourier multipliers.
// ---------------------------------------------------------------------------

using Symbol = std::function<Cplx(double)>;

// (T_phi)_dis f (n) = sum_m f(n-m) phi-check(m), computed in the frequency
// domain: forward DFT on a grid zero-padded to 4x the working support,
// multiply by symbol samples on [-1/2,1/2), inverse DFT.
inline OpSequence discrete_multiplier(const OpSequence& f, const Symbol& symbol,
                                      std::size_t pad_margin = 1024) {
    if (f.empty()) return f;
    const std::size_t G = pow2_at_least(4 * (f.size() + pad_margin));
    const std::size_t off = G / 4;
    const int d = f.dim();

    std::vector<Cplx> sym(G);
    for (std::size_t j = 0; j < G; ++j) {
        sym[j] = symbol(wrap_half(static_cast<double>(j) / static_cast<double>(G)));
    }

    std::vector<CMat> out(G, CMat::Zero(d, d));
    std::vector<Cplx> buf(G);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            std::fill(buf.begin(), buf.end(), Cplx{0.0, 0.0});
            for (std::size_t i = 0; i < f.size(); ++i) buf[off + i] = f.values()[i](r, c);
            fft_pow2(buf, false);
            for (std::size_t j = 0; j < G; ++j) buf[j] *= sym[j];
            fft_pow2(buf, true);
            for (std::size_t i = 0; i < G; ++i) out[i](r, c) = buf[i];
        }
    }
    return OpSequence(d, f.base() - static_cast<long long>(off), std::move(out));
}

namespace detail {

// phi-check(y) = int symbol(xi) e^{2 pi i xi y} dxi over |xi| < half_support.
// The panel floor resolves the mollifier's transition bands; the growth term
// keeps at most ~1.3 oscillation periods per panel.
inline Cplx symbol_inverse_ft(const Symbol& symbol, double half_support, double y) {
    const auto& gl = gl16();
    const int panels = std::max(16, static_cast<int>(std::ceil(1.0 + 0.75 * std::abs(y) * 2.0 * half_support)));
    Cplx acc{0.0, 0.0};
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = -half_support + 2.0 * half_support * pnl / panels;
        const double b = -half_support + 2.0 * half_support * (pnl + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        Cplx s{0.0, 0.0};
        for (int i = 0; i < 16; ++i) {
            const double xi = mid + half * gl.x[i];
            s += gl.w[i] * symbol(xi) * std::polar(1.0, 2.0 * std::numbers::pi * xi * y);
        }
        acc += half * s;
    }
    return acc;
}

}  // namespace detail

// ((T_phi^q)_dis f)(n) = q sum_m f(n - m q) phi-check(m q): the kernel of the
// q-periodized symbol lives on the lattice qZ only. The kernel values come
// from panel quadrature over the symbol's support; the reach is extended until
// the kernel has decayed below 1e-13 of its peak.
inline OpSequence periodized_multiplier(const OpSequence& f, const Symbol& symbol, int q) {
    if (q < 1) throw ParameterError("periodized_multiplier: q must be >= 1");
    const double half_support = 1.0 / (2.0 * q);
    // support probe: the symbol must vanish on [1/(2q), 1/2]
    for (int i = 0; i <= 2048; ++i) {
        const double xi = half_support + (0.5 - half_support) * i / 2048.0;
        if (std::abs(symbol(xi)) > 0.0 || std::abs(symbol(-xi)) > 0.0) {
            throw ParameterError("periodized_multiplier: symbol not supported in (-1/(2q), 1/(2q))");
        }
    }
    if (f.empty()) return f;
    if (q == 1) return discrete_multiplier(f, symbol);  // no periodization

    std::vector<Cplx> kernel;  // kernel[m] = q * phi-check(m q), m >= 0
    double peak = 0.0;
    int plateau_run = 0;
    for (int m = 0; m <= 4096; ++m) {
        const Cplx v = static_cast<double>(q) *
                       detail::symbol_inverse_ft(symbol, half_support, static_cast<double>(m) * q);
        kernel.push_back(v);
        peak = std::max(peak, std::abs(v));
        if (std::abs(v) < 1e-13 * std::max(peak, 1e-300)) {
            if (++plateau_run >= 8) break;
        } else {
            plateau_run = 0;
        }
    }
    const long long radius = static_cast<long long>(kernel.size()) - 1;
    const int d = f.dim();
    const long long lo = f.base() - radius * q;
    const long long hi = f.last() + radius * q;
    std::vector<CMat> out(static_cast<std::size_t>(hi - lo + 1), CMat::Zero(d, d));
    for (long long m = -radius; m <= radius; ++m) {
        const Cplx w = (m >= 0) ? kernel[static_cast<std::size_t>(m)]
                                : detail::symbol_inverse_ft(symbol, half_support, static_cast<double>(m) * q) *
                                      static_cast<double>(q);
        if (std::abs(w) == 0.0) continue;
        for (long long n = f.base(); n <= f.last(); ++n) {
            out[static_cast<std::size_t>(n + m * q - lo)] += w * f.at(n);
        }
    }
    return OpSequence(d, lo, std::move(out));
}

// ---------------------------------------------------------------------------
// Transference identities.
//   lattice:   alpha((T^q_{phi_q})_dis f) = (T_phi)_dis (alpha f)
//   extension: T_{phi~}(f_ext) = ((T_phi)_dis f)_ext at integer points,
//              phi~(xi) = sum_{|l|<=1} phi(xi + l)
// ---------------------------------------------------------------------------

struct TransferenceReport {
    double lattice_residual = 0.0;
    double extension_residual = 0.0;
    double quad_tol = 1e-8;
};

inline TransferenceReport transference_check(const OpSequence& f, const Symbol& phi_lambda, int q) {
    TransferenceReport rep;
    rep.quad_tol = std::max(quad_tol(), 1e-10) * 100.0;

    const Symbol phi_q = [&](double xi) { return phi_lambda(q * xi); };
    const OpSequence lhs = alpha_map(periodized_multiplier(f, phi_q, q), q);
    const OpSequence rhs = discrete_multiplier(alpha_map(f, q), phi_lambda);
    rep.lattice_residual = max_entry_diff(lhs, rhs);

    // extension identity at integer points, via direct quadrature of
    // int phi~(xi) Phi^(xi) f^(xi) e^{2 pi i n xi} dxi with Phi^ the unit tent.
    // The tent has kinks at 0 and +-1, so each kink-free interval is paneled
    // separately.
    const OpSequence dis = discrete_multiplier(f, phi_lambda);
    const auto& gl = detail::gl16();
    double worst = 0.0;
    const long long w_lo = f.base() - 4;
    const long long w_hi = f.last() + 4;
    double max_osc = 1.0;
    for (long long n = w_lo; n <= w_hi; ++n) {
        for (long long m = f.base(); m <= f.last(); ++m) {
            max_osc = std::max(max_osc, static_cast<double>(std::abs(n - m)));
        }
    }
    const double pieces[5] = {-1.5, -1.0, 0.0, 1.0, 1.5};
    for (long long n = w_lo; n <= w_hi; ++n) {
        CMat acc = CMat::Zero(f.dim(), f.dim());
        for (int seg = 0; seg < 4; ++seg) {
            const double seg_lo = pieces[seg], seg_hi = pieces[seg + 1];
            const int panels = std::max(16, static_cast<int>(std::ceil((seg_hi - seg_lo) * (1.0 + 0.75 * max_osc))));
            for (int pnl = 0; pnl < panels; ++pnl) {
                const double a = seg_lo + (seg_hi - seg_lo) * pnl / panels;
                const double b = seg_lo + (seg_hi - seg_lo) * (pnl + 1) / panels;
                const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                for (int i = 0; i < 16; ++i) {
                    const double xi = mid + half * gl.x[i];
                    const double tent = std::max(0.0, 1.0 - std::abs(xi));
                    if (tent == 0.0) continue;
                    Cplx phit{0.0, 0.0};
                    for (int l = -1; l <= 1; ++l) phit += phi_lambda(xi + l);
                    if (phit == Cplx{0.0, 0.0}) continue;
                    CMat fhat = CMat::Zero(f.dim(), f.dim());
                    for (long long m = f.base(); m <= f.last(); ++m) {
                        fhat += std::polar(1.0, -2.0 * std::numbers::pi * xi * static_cast<double>(m)) * f.at(m);
                    }
                    acc += (half * gl.w[i] * tent) *
                           (phit * std::polar(1.0, 2.0 * std::numbers::pi * xi * static_cast<double>(n))) * fhat;
                }
            }
        }
        worst = std::max(worst, (acc - dis.at(n)).cwiseAbs().maxCoeff());
    }
    rep.extension_residual = worst;
    return rep;
}

}  // namespace ergomax
