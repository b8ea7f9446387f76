#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ergomax/errors.hpp"
#include "ergomax/opseq.hpp"

namespace ergomax {

// ---------------------------------------------------------------------------
// Noncommutative maximal norms for finite families:
//   || sup+_lambda x_lambda ||_p = inf { ||a||_p : a >= 0, -a <= x_lambda <= a }.
//
// The trace on l_inf(Z) (x) M_d is a sum over sites, and the constraints act
// sitewise, so the minimization decouples exactly into one d x d problem per
// lattice site. Each site runs a projected subgradient descent on ||a||_p with
// feasibility restored by cyclic Dykstra projections onto the shifted PSD
// cones {a : a >= +-x_lambda}. Every iterate is turned into a certified
// feasible candidate (a + violation * I), so the returned certificate is never
// infeasible, budget exhausted or not.
// ---------------------------------------------------------------------------

struct MaximalFamily {
    std::vector<OpSequence> members;

    int dim() const {
        if (members.empty()) return 1;
        return members.front().dim();
    }
    void validate() const {
        for (const auto& m : members) {
            if (m.dim() != dim()) throw ParameterError("MaximalFamily: member dimensions differ");
        }
    }
    bool selfadjoint_certified(double tol = kHermitianTol) const {
        for (const auto& m : members) {
            if (!m.is_hermitian(tol)) return false;
        }
        return true;
    }
};

enum class SolveMode { Oracle, Subgradient, UpperBound };
enum class SolveStatus { Converged, BudgetExceeded };

struct SolveOptions {
    std::uint64_t max_iterations = 50'000;
    std::uint64_t patience = 250;
    int dykstra_cycles = 6;
};

struct MaxNormResult {
    double value = 0.0;
    OpSequence certificate;
    double residual = 0.0;  // max over lambda of the clamped most negative eigenvalue of a +- x
    std::uint64_t iterations = 0;
    SolveMode mode = SolveMode::Subgradient;
    SolveStatus status = SolveStatus::Converged;
};

namespace detail {

struct HermEig {
    Eigen::VectorXd w;
    CMat V;
};

inline HermEig herm_eig(const CMat& h) {
    const Eigen::Index d = h.rows();
    HermEig out;
    if (d == 1) {
        out.w = Eigen::VectorXd::Constant(1, h(0, 0).real());
        out.V = CMat::Identity(1, 1);
        return out;
    }
    if (d == 2) {
        // closed form for hermitian 2x2
        const double a = h(0, 0).real();
        const double b = h(1, 1).real();
        const Cplx c = h(0, 1);
        const double m = 0.5 * (a + b);
        const double half = 0.5 * (a - b);
        const double r = std::hypot(half, std::abs(c));
        out.w = Eigen::VectorXd(2);
        out.w[0] = m - r;
        out.w[1] = m + r;
        out.V = CMat(2, 2);
        if (std::abs(c) < 1e-300) {
            if (a <= b) {
                out.V << 1, 0, 0, 1;
            } else {
                out.V << 0, 1, 1, 0;
            }
            return out;
        }
        // eigenvector for w[1] (the larger): (c, w1 - a)
        Cplx v0 = c;
        Cplx v1 = Cplx(out.w[1] - a, 0.0);
        double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
        out.V(0, 1) = v0 / nrm;
        out.V(1, 1) = v1 / nrm;
        // orthogonal partner for w[0]
        out.V(0, 0) = -std::conj(out.V(1, 1));
        out.V(1, 0) = std::conj(out.V(0, 1));
        return out;
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    out.w = es.eigenvalues();
    out.V = es.eigenvectors();
    return out;
}

inline CMat psd_clip(const CMat& h) {
    const HermEig e = herm_eig(0.5 * (h + h.adjoint()));
    Eigen::VectorXd w = e.w;
    bool clipped = false;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0) {
            w[i] = 0.0;
            clipped = true;
        }
    }
    if (!clipped) return 0.5 * (h + h.adjoint());
    return e.V * w.asDiagonal() * e.V.adjoint();
}

inline double spectral_norm_herm(const CMat& h) {
    const HermEig e = herm_eig(h);
    double m = 0.0;
    for (Eigen::Index i = 0; i < e.w.size(); ++i) m = std::max(m, std::abs(e.w[i]));
    return m;
}

inline double schatten_norm_herm(const Eigen::VectorXd& w, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) m = std::max(m, std::abs(w[i]));
        return m;
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) acc += std::pow(std::abs(w[i]), p);
    return std::pow(acc, 1.0 / p);
}

// subgradient of the Schatten p-norm at a hermitian point
inline CMat schatten_subgradient(const CMat& a, double p) {
    const HermEig e = herm_eig(a);
    const Eigen::Index d = e.w.size();
    if (std::isinf(p)) {
        Eigen::Index top = 0;
        for (Eigen::Index i = 1; i < d; ++i) {
            if (std::abs(e.w[i]) > std::abs(e.w[top])) top = i;
        }
        const double sgn = e.w[top] >= 0.0 ? 1.0 : -1.0;
        return sgn * e.V.col(top) * e.V.col(top).adjoint();
    }
    const double nrm = schatten_norm_herm(e.w, p);
    if (nrm == 0.0) return CMat::Zero(d, d);
    Eigen::VectorXd g(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double sgn = (e.w[i] > 0.0) ? 1.0 : (e.w[i] < 0.0 ? -1.0 : 0.0);
        g[i] = (p == 1.0) ? sgn : sgn * std::pow(std::abs(e.w[i]) / nrm, p - 1.0);
    }
    return e.V * g.asDiagonal() * e.V.adjoint();
}

// one pass of cyclic Dykstra corrections over the constraint sets {a >= y}
inline void dykstra_cycles(CMat& a, const std::vector<CMat>& targets, std::vector<CMat>& incs, int cycles) {
    for (int cyc = 0; cyc < cycles; ++cyc) {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const CMat w = a + incs[i];
            const CMat proj = targets[i] + psd_clip(w - targets[i]);
            incs[i] = w - proj;
            a = proj;
        }
    }
}

struct SiteSolve {
    double value = 0.0;
    CMat certificate;
    double residual = 0.0;
    std::uint64_t iterations = 0;
    SolveStatus status = SolveStatus::Converged;
};

inline double site_violation(const CMat& a, const std::vector<CMat>& targets) {
    double v = 0.0;
    for (const auto& y : targets) {
        const HermEig e = herm_eig(a - y);
        v = std::max(v, std::max(0.0, -e.w.minCoeff()));
    }
    return v;
}

inline SiteSolve solve_site_selfadjoint(const std::vector<CMat>& members, double p, double tol,
                                        const SolveOptions& opt) {
    const Eigen::Index d = members.front().rows();
    SiteSolve out;
    double c0 = 0.0;
    for (const auto& x : members) c0 = std::max(c0, spectral_norm_herm(x));
    if (c0 == 0.0) {
        out.certificate = CMat::Zero(d, d);
        return out;
    }
    std::vector<CMat> targets;
    targets.reserve(2 * members.size());
    for (const auto& x : members) targets.push_back(x);
    for (const auto& x : members) targets.push_back(CMat(-x));

    CMat a = c0 * CMat::Identity(d, d);
    CMat best = a;  // feasible by construction of c0
    double best_value = schatten_norm_herm(herm_eig(a).w, p);
    std::vector<CMat> incs(targets.size(), CMat::Zero(d, d));
    std::uint64_t last_improve = 0;
    std::uint64_t k = 0;
    for (k = 1; k <= opt.max_iterations; ++k) {
        const double step = c0 / std::sqrt(static_cast<double>(k));
        a -= step * schatten_subgradient(a, p);
        for (auto& inc : incs) inc.setZero();
        dykstra_cycles(a, targets, incs, opt.dykstra_cycles);
        const double viol = site_violation(a, targets);
        const CMat cand = a + viol * CMat::Identity(d, d);
        const double v = schatten_norm_herm(herm_eig(cand).w, p);
        if (v < best_value) {
            if (v < best_value * (1.0 - tol)) last_improve = k;
            best_value = v;
            best = cand;
        }
        if (k - last_improve > opt.patience) break;
    }
    out.value = best_value;
    out.certificate = best;
    out.residual = site_violation(best, targets);
    out.iterations = std::min(k, opt.max_iterations);
    out.status = (k > opt.max_iterations) ? SolveStatus::BudgetExceeded : SolveStatus::Converged;
    return out;
}

}  // namespace detail

inline MaxNormResult maxnorm_selfadjoint(const MaximalFamily& family, double p, double tol,
                                         const SolveOptions& opt = {}) {
    check_p(p);
    if (!(tol > 0.0)) throw ParameterError("maxnorm: tol must be positive");
    family.validate();
    MaxNormResult res;
    res.mode = SolveMode::Subgradient;
    if (family.members.empty()) {
        res.certificate = OpSequence();
        return res;
    }
    if (!family.selfadjoint_certified()) {
        throw ParameterError("maxnorm_selfadjoint: family is not certified self-adjoint");
    }
    const int d = family.dim();
    long long lo = 0, hi = -1;
    bool any = false;
    for (const auto& m : family.members) {
        if (m.empty()) continue;
        lo = any ? std::min(lo, m.base()) : m.base();
        hi = any ? std::max(hi, m.last()) : m.last();
        any = true;
    }
    if (!any) {
        res.certificate = OpSequence();
        return res;
    }

    std::vector<CMat> cert(static_cast<std::size_t>(hi - lo + 1), CMat::Zero(d, d));
    double accum = 0.0;  // sum of site value^p (or running max at p = inf)
    for (long long n = lo; n <= hi; ++n) {
        std::vector<CMat> site;
        site.reserve(family.members.size());
        bool nonzero = false;
        for (const auto& m : family.members) {
            CMat v = m.at(n);
            nonzero = nonzero || (v.cwiseAbs().maxCoeff() > 0.0);
            site.push_back(0.5 * (v + v.adjoint()));
        }
        if (!nonzero) continue;
        const detail::SiteSolve s = detail::solve_site_selfadjoint(site, p, tol, opt);
        cert[static_cast<std::size_t>(n - lo)] = s.certificate;
        res.iterations += s.iterations;
        res.residual = std::max(res.residual, s.residual);
        if (s.status == SolveStatus::BudgetExceeded) res.status = SolveStatus::BudgetExceeded;
        if (std::isinf(p)) {
            accum = std::max(accum, s.value);
        } else {
            accum += std::pow(s.value, p);
        }
    }
    res.value = std::isinf(p) ? accum : std::pow(accum, 1.0 / p);
    res.certificate = OpSequence(d, lo, std::move(cert));
    return res;
}

// Upper bound for general families via the self-adjoint real/imaginary split;
// the certificate is the sum of the two split certificates.
inline MaxNormResult maxnorm_general(const MaximalFamily& family, double p, double tol,
                                     const SolveOptions& opt = {}) {
    check_p(p);
    family.validate();
    MaximalFamily re, im;
    bool has_imag = false;
    for (const auto& m : family.members) {
        auto [r, i] = parts(m);
        if (!i.empty() && i.max_abs() > kHermitianTol) has_imag = true;
        re.members.push_back(std::move(r));
        im.members.push_back(std::move(i));
    }
    MaxNormResult rr = maxnorm_selfadjoint(re, p, tol, opt);
    if (!has_imag) return rr;
    MaxNormResult ri = maxnorm_selfadjoint(im, p, tol, opt);
    MaxNormResult out;
    out.value = rr.value + ri.value;
    out.certificate = op_add(rr.certificate, ri.certificate);
    out.residual = std::max(rr.residual, ri.residual);
    out.iterations = rr.iterations + ri.iterations;
    out.mode = SolveMode::UpperBound;
    out.status = (rr.status == SolveStatus::BudgetExceeded || ri.status == SolveStatus::BudgetExceeded)
                     ? SolveStatus::BudgetExceeded
                     : SolveStatus::Converged;
    return out;
}

// Commutative case: the infimum is attained by the pointwise supremum of |x|.
inline double commutative_oracle(const MaximalFamily& family, double p) {
    check_p(p);
    family.validate();
    if (family.dim() != 1) throw ParameterError("commutative_oracle: requires d = 1");
    if (family.members.empty()) return 0.0;
    long long lo = 0, hi = -1;
    bool any = false;
    for (const auto& m : family.members) {
        if (m.empty()) continue;
        if (m.hermitian_defect() > kHermitianTol) {
            throw ParameterError("commutative_oracle: members must be real-valued");
        }
        lo = any ? std::min(lo, m.base()) : m.base();
        hi = any ? std::max(hi, m.last()) : m.last();
        any = true;
    }
    if (!any) return 0.0;
    std::vector<Cplx> sup;
    sup.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long long n = lo; n <= hi; ++n) {
        double s = 0.0;
        for (const auto& m : family.members) s = std::max(s, std::abs(m.at(n)(0, 0)));
        sup.push_back(Cplx{s, 0.0});
    }
    return lp_norm(OpSequence::scalar(lo, sup), p);
}

}  // namespace ergomax
