#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "ergomax/errors.hpp"
#include "ergomax/fft.hpp"
#include "ergomax/kernels.hpp"

namespace ergomax {

using CMat = Eigen::MatrixXcd;

inline constexpr double kHermitianTol = 1e-12;

// ---------------------------------------------------------------------------
// Finitely supported functions Z -> M_d(C), the working model of
// L_p(l_inf(Z) (x) M_d). Normalization trims exactly-zero matrices at both
// ends; values outside the stored window are zero.
// ---------------------------------------------------------------------------

class OpSequence {
public:
    OpSequence() : d_(1), base_(0) {}

    OpSequence(int d, long long base, std::vector<CMat> values) : d_(d), base_(base), values_(std::move(values)) {
        if (d_ < 1) throw ParameterError("OpSequence: dimension must be >= 1");
        for (const auto& m : values_) {
            if (m.rows() != d_ || m.cols() != d_) {
                throw ParameterError("OpSequence: value dimensions disagree with d");
            }
        }
        normalize();
    }

    static OpSequence delta(long long n, const CMat& x) {
        return OpSequence(static_cast<int>(x.rows()), n, {x});
    }

    static OpSequence scalar(long long base, const std::vector<Cplx>& vals) {
        std::vector<CMat> mats;
        mats.reserve(vals.size());
        for (Cplx v : vals) {
            CMat m(1, 1);
            m(0, 0) = v;
            mats.push_back(m);
        }
        return OpSequence(1, base, std::move(mats));
    }

    int dim() const noexcept { return d_; }
    long long base() const noexcept { return base_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    long long last() const noexcept { return base_ + static_cast<long long>(values_.size()) - 1; }
    const std::vector<CMat>& values() const noexcept { return values_; }

    CMat at(long long n) const {
        const long long idx = n - base_;
        if (idx < 0 || idx >= static_cast<long long>(values_.size())) return CMat::Zero(d_, d_);
        return values_[static_cast<std::size_t>(idx)];
    }

    double hermitian_defect() const {
        double worst = 0.0;
        for (const auto& m : values_) {
            worst = std::max(worst, (m - m.adjoint()).cwiseAbs().maxCoeff());
        }
        return worst;
    }
    bool is_hermitian(double tol = kHermitianTol) const { return hermitian_defect() <= tol; }

    double max_abs() const {
        double worst = 0.0;
        for (const auto& m : values_) worst = std::max(worst, m.cwiseAbs().maxCoeff());
        return worst;
    }

private:
    void normalize() {
        auto is_zero = [](const CMat& m) { return (m.array() == Cplx{0.0, 0.0}).all(); };
        std::size_t lead = 0;
        while (lead < values_.size() && is_zero(values_[lead])) ++lead;
        if (lead == values_.size()) {
            values_.clear();
            base_ = 0;
            return;
        }
        std::size_t tail = values_.size();
        while (tail > lead && is_zero(values_[tail - 1])) --tail;
        if (lead > 0 || tail < values_.size()) {
            values_ = std::vector<CMat>(values_.begin() + static_cast<long>(lead),
                                        values_.begin() + static_cast<long>(tail));
            base_ += static_cast<long long>(lead);
        }
    }

    int d_;
    long long base_;
    std::vector<CMat> values_;
};

// pointwise linear combinations over the union support
inline OpSequence op_add(const OpSequence& a, const OpSequence& b, Cplx ca = 1.0, Cplx cb = 1.0) {
    if (a.empty()) {
        std::vector<CMat> vals;
        for (const auto& m : b.values()) vals.push_back(cb * m);
        return OpSequence(b.dim(), b.base(), std::move(vals));
    }
    if (b.empty()) {
        std::vector<CMat> vals;
        for (const auto& m : a.values()) vals.push_back(ca * m);
        return OpSequence(a.dim(), a.base(), std::move(vals));
    }
    if (a.dim() != b.dim()) throw ParameterError("op_add: dimension mismatch");
    const long long lo = std::min(a.base(), b.base());
    const long long hi = std::max(a.last(), b.last());
    std::vector<CMat> vals;
    vals.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long long n = lo; n <= hi; ++n) vals.push_back(ca * a.at(n) + cb * b.at(n));
    return OpSequence(a.dim(), lo, std::move(vals));
}

inline OpSequence op_scale(const OpSequence& a, Cplx c) {
    std::vector<CMat> vals;
    vals.reserve(a.size());
    for (const auto& m : a.values()) vals.push_back(c * m);
    return OpSequence(a.dim(), a.base(), std::move(vals));
}

inline OpSequence op_adjoint(const OpSequence& a) {
    std::vector<CMat> vals;
    vals.reserve(a.size());
    for (const auto& m : a.values()) vals.push_back(m.adjoint());
    return OpSequence(a.dim(), a.base(), std::move(vals));
}

inline double max_entry_diff(const OpSequence& a, const OpSequence& b) {
    if (a.empty() && b.empty()) return 0.0;
    const long long lo = std::min(a.empty() ? b.base() : a.base(), b.empty() ? a.base() : b.base());
    const long long hi = std::max(a.empty() ? b.last() : a.last(), b.empty() ? a.last() : b.last());
    double worst = 0.0;
    for (long long n = lo; n <= hi; ++n) {
        worst = std::max(worst, (a.at(n) - b.at(n)).cwiseAbs().maxCoeff());
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Schatten and L_p(l_inf (x) M_d) norms. The trace is counting measure on Z
// tensor the matrix trace.
// ---------------------------------------------------------------------------

inline void check_p(double p) {
    if (std::isinf(p) && p > 0) return;
    if (!(p >= 1.0) || std::isnan(p)) throw ParameterError("p must lie in [1, inf]");
}

inline Eigen::VectorXd singular_values(const CMat& m) {
    return Eigen::JacobiSVD<CMat>(m).singularValues();
}

inline double schatten_norm(const CMat& m, double p) {
    check_p(p);
    const Eigen::VectorXd sv = singular_values(m);
    if (std::isinf(p)) return sv.size() ? sv.maxCoeff() : 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv[i], p);
    return std::pow(acc, 1.0 / p);
}

inline double lp_norm(const OpSequence& f, double p) {
    check_p(p);
    if (f.empty()) return 0.0;
    if (std::isinf(p)) {
        double worst = 0.0;
        for (const auto& m : f.values()) {
            const Eigen::VectorXd sv = singular_values(m);
            if (sv.size()) worst = std::max(worst, sv.maxCoeff());
        }
        return worst;
    }
    std::vector<double> site_powers;
    site_powers.reserve(f.size());
    for (const auto& m : f.values()) {
        const Eigen::VectorXd sv = singular_values(m);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv[i], p);
        site_powers.push_back(acc);
    }
    // pairwise over sites
    std::vector<Cplx> tmp(site_powers.begin(), site_powers.end());
    return std::pow(pairwise_sum(tmp.begin(), tmp.end()).real(), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Convolution with a scalar grid kernel: (f*K)(n) = sum_m f(n-m) K(m).
// Small instances take the direct double loop, large ones the zero-padded
// cyclic FFT; the two paths agree to 1e-10 and tests pin that.
// ---------------------------------------------------------------------------

enum class ConvPath { Auto, Direct, Fft };

namespace detail {

inline OpSequence convolve_direct(const OpSequence& f, const GridKernel& ker) {
    const long long out_base = f.base() + ker.base;
    const std::size_t out_len = f.size() + ker.weights.size() - 1;
    std::vector<CMat> out(out_len, CMat::Zero(f.dim(), f.dim()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = 0; j < ker.weights.size(); ++j) {
            const Cplx w = ker.weights[j];
            if (w == Cplx{0.0, 0.0}) continue;
            out[i + j] += w * f.values()[i];
        }
    }
    return OpSequence(f.dim(), out_base, std::move(out));
}

inline OpSequence convolve_fft(const OpSequence& f, const GridKernel& ker) {
    const long long out_base = f.base() + ker.base;
    const std::size_t out_len = f.size() + ker.weights.size() - 1;
    const std::size_t G = pow2_at_least(out_len);
    std::vector<Cplx> kbuf(G, Cplx{0.0, 0.0});
    std::copy(ker.weights.begin(), ker.weights.end(), kbuf.begin());
    fft_pow2(kbuf, false);

    const int d = f.dim();
    std::vector<CMat> out(out_len, CMat::Zero(d, d));
    std::vector<Cplx> buf(G);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            std::fill(buf.begin(), buf.end(), Cplx{0.0, 0.0});
            for (std::size_t i = 0; i < f.size(); ++i) buf[i] = f.values()[i](r, c);
            fft_pow2(buf, false);
            for (std::size_t j = 0; j < G; ++j) buf[j] *= kbuf[j];
            fft_pow2(buf, true);
            for (std::size_t i = 0; i < out_len; ++i) out[i](r, c) = buf[i];
        }
    }
    return OpSequence(d, out_base, std::move(out));
}

}  // namespace detail

inline OpSequence convolve(const OpSequence& f, const GridKernel& ker, ConvPath path = ConvPath::Auto) {
    if (f.empty() || ker.weights.empty()) return OpSequence(f.dim(), 0, {});
    if (path == ConvPath::Auto) {
        path = (f.size() * ker.weights.size() > 4096) ? ConvPath::Fft : ConvPath::Direct;
    }
    return path == ConvPath::Fft ? detail::convolve_fft(f, ker) : detail::convolve_direct(f, ker);
}

// A_N f = f * K_N along the arithmetic set {k^t}.
inline OpSequence ergodic_average(const OpSequence& f, std::uint64_t N, int t, bool reflected = false) {
    return convolve(f, kn_atoms(N, t, reflected));
}

// Pointwise real/imaginary parts: Re f = (f + f*)/2, Im f = (f - f*)/(2i).
inline std::pair<OpSequence, OpSequence> parts(const OpSequence& f) {
    OpSequence re = op_add(f, op_adjoint(f), 0.5, 0.5);
    OpSequence im = op_add(f, op_adjoint(f), Cplx{0.0, -0.5}, Cplx{0.0, 0.5});
    return {std::move(re), std::move(im)};
}

// ---------------------------------------------------------------------------
// Operator-valued Hoelder gap: smallest eigenvalue of
//   ||g||_{p'} (sum f^p)^{1/p} - sum g f     (f PSD, g >= 0 scalar).
// Nonnegative up to roundoff by the operator Hoelder inequality.
// ---------------------------------------------------------------------------

namespace detail {

inline CMat psd_power(const CMat& m, double expo) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()));
    Eigen::VectorXd w = es.eigenvalues();
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::pow(std::max(w[i], 0.0), expo);
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

inline double holder_gap(const std::vector<CMat>& f, const std::vector<double>& g, double p) {
    if (f.size() != g.size() || f.empty()) throw ParameterError("holder_gap: length mismatch");
    if (!(p > 1.0) || std::isinf(p)) throw ParameterError("holder_gap: need finite p > 1");
    const Eigen::Index d = f.front().rows();
    CMat sum_fp = CMat::Zero(d, d);
    CMat sum_fg = CMat::Zero(d, d);
    double sum_gq = 0.0;
    const double q = p / (p - 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (g[i] < 0) throw ParameterError("holder_gap: g must be nonnegative");
        const CMat h = 0.5 * (f[i] + f[i].adjoint());
        Eigen::SelfAdjointEigenSolver<CMat> es(h);
        const double lead = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-9 * lead) {
            throw ParameterError("holder_gap: f entries must be PSD");
        }
        sum_fp += detail::psd_power(h, p);
        sum_fg += g[i] * h;
        sum_gq += std::pow(g[i], q);
    }
    const CMat lhs = std::pow(sum_gq, 1.0 / q) * detail::psd_power(sum_fp, 1.0 / p);
    Eigen::SelfAdjointEigenSolver<CMat> es(CMat(lhs - sum_fg));
    return es.eigenvalues().minCoeff();
}

}  // namespace ergomax
