#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "ergomax/errors.hpp"
#include "ergomax/fft.hpp"
#include "ergomax/frequency.hpp"
#include "ergomax/threads.hpp"

namespace ergomax {

// ---------------------------------------------------------------------------
// The continuous kernel k(x) = t^{-1} x^{1/t-1} 1_{[0,1]}(x) and its Fourier
// transform k^(beta) = int_0^1 e^{-2 pi i beta u^t} du (after u = x^{1/t},
// which removes the endpoint singularity).
//
// k^ is evaluated by two cross-validated branches:
//   |beta| <= 8   composite Gauss-Legendre panels, panel count ~ 1 + |beta| t/2
//   |beta| >  8   endpoint expansion  k^ = G(t) (2 pi beta)^{-1/t} e^{-i pi/(2t)}
//                 minus the integration-by-parts series of int_1^inf,
//                 accurate to ~1e-15 well past |beta| = 1e4.
// ---------------------------------------------------------------------------

inline double kernel_k_density(double x, int t) {
    if (t < 1) throw ParameterError("kernel_k_density: t must be >= 1");
    if (x < 0.0 || x > 1.0) return 0.0;
    if (x == 0.0) {
        return t == 1 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return std::pow(x, 1.0 / t - 1.0) / t;
}

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct Gl16 {
    std::vector<double> x, w;
    Gl16() { gauss_legendre(16, x, w); }
};

inline const Gl16& gl16() {
    static const Gl16 table;
    return table;
}

inline Cplx khat_panels(double beta, int t, int extra_panels = 0) {
    const auto& gl = gl16();
    const int panels = std::max(1, static_cast<int>(std::ceil(1.0 + std::abs(beta) * t / 2.0))) + extra_panels;
    Cplx sum{0.0, 0.0};
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = static_cast<double>(pnl) / panels;
        const double b = static_cast<double>(pnl + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        Cplx acc{0.0, 0.0};
        for (int i = 0; i < 16; ++i) {
            const double u = mid + half * gl.x[i];
            double ut = u;
            for (int j = 1; j < t; ++j) ut *= u;
            acc += gl.w[i] * std::polar(1.0, -2.0 * std::numbers::pi * beta * ut);
        }
        sum += half * acc;
    }
    return sum;
}

// e^{-2 pi i beta} through the exact fractional part, immune to large beta.
inline Cplx unit_phase(double beta) {
    const double f = beta - std::floor(beta);
    return std::polar(1.0, -2.0 * std::numbers::pi * f);
}

inline Cplx khat_asymptotic(double beta, int t) {
    const double g = std::tgamma(1.0 + 1.0 / t);
    const Cplx main = g * std::pow(2.0 * std::numbers::pi * beta, -1.0 / t) *
                      std::polar(1.0, -std::numbers::pi / (2.0 * t));
    // tail = int_1^inf e^{-2 pi i beta u^t} du by repeated integration by parts
    const Cplx z = Cplx(0.0, -1.0 / (2.0 * std::numbers::pi * beta * t));
    const Cplx e = unit_phase(beta);
    Cplx tail{0.0, 0.0};
    Cplx cur = e * z;
    for (int k = 0; k < 60; ++k) {
        tail += cur;
        const Cplx nxt = cur * (-z) * static_cast<double>((k + 1) * t - 1);
        if (std::abs(nxt) < 1e-17 || std::abs(nxt) > std::abs(cur)) break;
        cur = nxt;
    }
    return main - tail;
}

}  // namespace detail

inline Cplx khat(double beta, int t) {
    if (t < 1) throw ParameterError("khat: t must be >= 1");
    if (beta == 0.0) return Cplx{1.0, 0.0};
    if (beta < 0.0) return std::conj(khat(-beta, t));
    if (beta <= 8.0) return detail::khat_panels(beta, t);
    return detail::khat_asymptotic(beta, t);
}

// Variant with a refinement-based error estimate; throws NumericError when the
// achieved tolerance misses the requested one.
inline Cplx khat_checked(double beta, int t, double tol) {
    const Cplx v = khat(beta, t);
    double achieved;
    if (beta != 0.0 && std::abs(beta) <= 8.0) {
        achieved = std::abs(v - detail::khat_panels(std::abs(beta), t, 3));
    } else {
        achieved = 1e-14;  // asymptotic branch, validated against the quadrature seam
    }
    if (achieved > tol) {
        throw NumericError("khat: achieved tolerance " + std::to_string(achieved) +
                           " misses requested " + std::to_string(tol));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Smooth plateau bumps phi (plateau 1/10, support 1/2) and psi (plateau 1/2,
// support 1), realized by the exp-mollifier h(u) = g(u)/(g(u)+g(1-u)),
// g(u) = e^{-1/u}. Exactly 1 on the plateau, exactly 0 outside the support.
// ---------------------------------------------------------------------------

struct BumpSpec {
    double plateau_radius;
    double support_radius;
    enum class Kind { Phi, Psi } kind = Kind::Phi;
};

inline constexpr BumpSpec phi_bump() { return {0.1, 0.5, BumpSpec::Kind::Phi}; }
inline constexpr BumpSpec psi_bump() { return {0.5, 1.0, BumpSpec::Kind::Psi}; }

// In double arithmetic the transition value saturates to an exact 1 within
// ~3% of the plateau edge (the ratio g(1-u)/g(u) drops below machine epsilon)
// and to an exact 0 very close to the support edge; in between it is strictly
// inside (0,1).
inline double bump_eval(const BumpSpec& spec, double xi) {
    if (!(spec.support_radius > spec.plateau_radius) || !(spec.plateau_radius > 0)) {
        throw ParameterError("bump_eval: need 0 < plateau < support");
    }
    const double ax = std::abs(xi);
    if (ax <= spec.plateau_radius) return 1.0;
    if (ax >= spec.support_radius) return 0.0;
    const double u = (spec.support_radius - ax) / (spec.support_radius - spec.plateau_radius);
    const double gu = std::exp(-1.0 / u);
    const double gv = std::exp(-1.0 / (1.0 - u));
    return gu / (gu + gv);
}

// ---------------------------------------------------------------------------
// Bump dilation scales D_s.
//
// The separation property D_s |xi - eta| > 2 is all any computed estimate
// uses, so D_s is the smallest power of two strictly greater than
// 2 / min_gap; a scale satisfying log Q_{s,m} < (1/100) log D_s would sit far
// beyond any representable grid.
// ---------------------------------------------------------------------------

enum class DsPolicy { PreferExact, BoundOnly };

inline BigInt smallest_pow2_greater(const BigRat& v) {
    BigInt d = 2;
    const BigInt num = boost::multiprecision::numerator(v);
    const BigInt den = boost::multiprecision::denominator(v);
    // start near the answer, then settle by exact comparison
    const std::size_t bn = boost::multiprecision::msb(num < 1 ? BigInt(1) : num);
    const std::size_t bd = boost::multiprecision::msb(den);
    if (bn > bd + 2) d = BigInt(1) << (bn - bd - 2);
    while (d * den <= num) d <<= 1;
    return d;
}

inline BigInt choose_Ds(const FrequencyLevelSet& level_s, const FrequencyLevelSet* level_prev,
                        DsPolicy policy = DsPolicy::PreferExact,
                        std::uint64_t enum_cap = kDefaultEnumCap) {
    GapResult g;
    if (policy == DsPolicy::BoundOnly) {
        BigInt denom = level_s.Q1() * level_s.max_modulus();
        g.is_bound = true;
        g.gap = BigRat(1, denom * denom);
    } else {
        g = min_gap(level_s, level_prev, enum_cap);
    }
    if (g.infinite) return 2;  // minimum admissible scale, no separation needed
    return smallest_pow2_greater(BigRat(2) / g.gap);
}

// ---------------------------------------------------------------------------
// The approximate multiplier
//   L^_N(theta) = k^(N^t theta) phi(theta)
//               + sum_s sum_{xi in R_s \ R_{s-1}} S(xi) k^(N^t (theta-xi)) phi(D_s (theta-xi))
// with theta and theta - xi taken as circle representatives in [-1/2, 1/2).
// ---------------------------------------------------------------------------

struct LevelAtoms {
    int s = 0;
    BigInt D = 2;
    double D_dbl = 2.0;
    std::vector<double> centers;               // sorted ascending in [0,1)
    std::vector<Cplx> weights;                 // S(xi), nonvanishing entries only
    std::vector<ReducedFraction> fractions;    // exact centers, same order
    std::size_t enumerated = 0;                // atom count before the zero-weight drop
};

namespace detail {

inline std::shared_ptr<const LevelAtoms> build_level_atoms(int t, double rho, int s,
                                                           std::uint64_t atom_cap) {
    auto atoms = std::make_shared<LevelAtoms>();
    atoms->s = s;
    const FrequencyLevelSet level = level_set(s, rho, t);
    const FrequencyLevelSet prev = level_set(s - 1, rho, t);

    if (t == 1) {
        // S(a/q) is a full geometric sum: exactly 0 for every q > 1, so all
        // correction levels are empty and no enumeration is needed.
        return atoms;
    }

    auto fractions = enumerate_new(level, &prev, atom_cap);
    atoms->enumerated = fractions.size();
    atoms->D = choose_Ds(level, &prev, DsPolicy::PreferExact, atom_cap);
    atoms->D_dbl = atoms->D.convert_to<double>();

    // batch the Gauss sums per denominator
    std::map<std::uint64_t, std::vector<std::size_t>> by_den;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        by_den[fractions[i].den().convert_to<std::uint64_t>()].push_back(i);
    }
    std::vector<Cplx> weights(fractions.size());
    for (const auto& [q, idxs] : by_den) {
        GaussSummer summer(q, t);
        for (std::size_t i : idxs) {
            weights[i] = summer.at(fractions[i].num().convert_to<std::uint64_t>());
        }
    }
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (std::abs(weights[i]) <= 1e-15) continue;  // vanishing Gauss weight
        atoms->centers.push_back(fractions[i].value());
        atoms->weights.push_back(weights[i]);
        atoms->fractions.push_back(fractions[i]);
    }
    return atoms;
}

inline std::shared_ptr<const LevelAtoms> level_atoms_cached(int t, double rho, int s,
                                                            std::uint64_t atom_cap) {
    struct Key {
        int t;
        long long rho_bits;
        int s;
        std::uint64_t cap;
        auto operator<=>(const Key&) const = default;
    };
    static std::map<Key, std::shared_ptr<const LevelAtoms>> cache;
    static std::mutex mtx;
    long long rho_bits;
    static_assert(sizeof(rho_bits) == sizeof(rho));
    std::memcpy(&rho_bits, &rho, sizeof(rho));
    const Key key{t, rho_bits, s, atom_cap};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto atoms = build_level_atoms(t, rho, s, atom_cap);
    cache.emplace(key, atoms);
    return atoms;
}

}  // namespace detail

struct MultiplierModel {
    int t = 1;
    std::uint64_t N = 1;
    double rho = 1.0;
    int s_max = 0;
    std::uint64_t atom_cap = kDefaultEnumCap;
    BumpSpec main_bump = phi_bump();
    std::vector<std::shared_ptr<const LevelAtoms>> levels;  // index 0 <-> s=1

    double n_pow_t() const {
        double v = 1.0;
        for (int i = 0; i < t; ++i) v *= static_cast<double>(N);
        return v;
    }
    double max_D() const {
        double d = 1.0;
        for (const auto& lv : levels) {
            if (!lv->centers.empty()) d = std::max(d, lv->D_dbl);
        }
        return d;
    }
    std::size_t atom_count() const {
        std::size_t n = 0;
        for (const auto& lv : levels) n += lv->centers.size();
        return n;
    }
};

inline MultiplierModel build_multiplier(std::uint64_t N, int t, double rho, int s_max,
                                        std::uint64_t atom_cap = kDefaultEnumCap) {
    if (N == 0) throw ParameterError("build_multiplier: N must be >= 1");
    if (s_max < 0) throw ParameterError("build_multiplier: s_max must be >= 0");
    check_level_params(0, rho, t);
    MultiplierModel model;
    model.t = t;
    model.N = N;
    model.rho = rho;
    model.s_max = s_max;
    model.atom_cap = atom_cap;
    for (int s = 1; s <= s_max; ++s) {
        model.levels.push_back(detail::level_atoms_cached(t, rho, s, atom_cap));
    }
    return model;
}

inline Cplx lhat_main_eval(const MultiplierModel& model, double theta) {
    const double tw = wrap_half(theta);
    const double b = bump_eval(model.main_bump, tw);
    if (b == 0.0) return Cplx{0.0, 0.0};
    return khat(model.n_pow_t() * tw, model.t) * b;
}

// Contribution of correction level s (1-based). Bumps of one level are
// pairwise disjoint, so at most the nearest atom (in circle metric) matters.
inline Cplx lhat_level_eval(const MultiplierModel& model, int s, double theta) {
    if (s < 1 || s > model.s_max) throw ParameterError("lhat_level_eval: level out of range");
    const LevelAtoms& lv = *model.levels[static_cast<std::size_t>(s - 1)];
    if (lv.centers.empty()) return Cplx{0.0, 0.0};
    const double pos = wrap_unit(theta);
    auto it = std::lower_bound(lv.centers.begin(), lv.centers.end(), pos);
    const std::size_t n = lv.centers.size();
    const std::size_t right = static_cast<std::size_t>(it - lv.centers.begin()) % n;
    const std::size_t left = (right + n - 1) % n;
    Cplx out{0.0, 0.0};
    for (std::size_t idx : {left, right}) {
        double d = pos - lv.centers[idx];
        d -= std::round(d);  // circle representative in [-1/2, 1/2]
        const double b = bump_eval(model.main_bump, lv.D_dbl * d);
        if (b == 0.0) continue;
        out += lv.weights[idx] * khat(model.n_pow_t() * d, model.t) * b;
        if (left == right) break;
    }
    return out;
}

inline Cplx lhat_eval(const MultiplierModel& model, double theta) {
    Cplx v = lhat_main_eval(model, theta);
    for (int s = 1; s <= model.s_max; ++s) v += lhat_level_eval(model, s, theta);
    return v;
}

// ---------------------------------------------------------------------------
// Grid kernels on Z.
// ---------------------------------------------------------------------------

struct GridKernel {
    enum class Origin { ExactAtoms, FftInversion };

    long long base = 0;
    std::vector<Cplx> weights;
    Origin origin = Origin::ExactAtoms;
    std::size_t grid_size = 0;     // inversion grid, 0 for exact atom kernels
    double tail_bound = 0.0;       // l1 mass discarded by truncation

    double l1() const {
        if (weights.empty()) return 0.0;
        return pairwise_sum_abs(weights, 0, weights.size());
    }
    Cplx at(long long n) const {
        const long long idx = n - base;
        if (idx < 0 || idx >= static_cast<long long>(weights.size())) return Cplx{0.0, 0.0};
        return weights[static_cast<std::size_t>(idx)];
    }
};

// K_N = (1/N) sum_{k<=N} delta_{k^t}; `reflected` places the atoms at -k^t,
// realizing the correlation-style average (A_N f)(j) = (1/N) sum f(j + k^t).
inline GridKernel kn_atoms(std::uint64_t N, int t, bool reflected = false) {
    if (N == 0) throw ParameterError("kn_atoms: N must be >= 1");
    if (t < 1) throw ParameterError("kn_atoms: t must be >= 1");
    const double nt_d = std::pow(static_cast<double>(N), t);
    if (nt_d > 1e9) throw ParameterError("kn_atoms: N^t too large for a dense grid kernel");
    std::uint64_t top = 1;
    for (int i = 0; i < t; ++i) top *= N;
    GridKernel ker;
    ker.origin = GridKernel::Origin::ExactAtoms;
    ker.weights.assign(top, Cplx{0.0, 0.0});
    ker.base = reflected ? -static_cast<long long>(top) : 1;
    for (std::uint64_t k = 1; k <= N; ++k) {
        std::uint64_t kt = 1;
        for (int i = 0; i < t; ++i) kt *= k;
        const long long offset = reflected ? -static_cast<long long>(kt) : static_cast<long long>(kt);
        ker.weights[static_cast<std::size_t>(offset - ker.base)] += 1.0 / static_cast<double>(N);
    }
    return ker;
}

namespace detail {

// Symbol of the level-s piece (s = 0 is the main term) sampled on the M-grid.
inline void sample_level_symbol(const MultiplierModel& model, int s, std::vector<Cplx>& out) {
    const std::size_t M = out.size();
    parallel_chunks(M, 1 << 14, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            const double theta = static_cast<double>(j) / static_cast<double>(M);
            out[j] = (s == 0) ? lhat_main_eval(model, theta) : lhat_level_eval(model, s, theta);
        }
    });
}

}  // namespace detail

// Fourier inversion of the level-s symbol on an M-point grid, truncated to
// |m| <= trunc_radius. The discarded l1 mass is recorded; the grid itself
// introduces the usual alias sum over m + M Z, which the precondition keeps
// below the kernel's own tail.
inline GridKernel level_piece_kernel(const MultiplierModel& model, int s, std::size_t M,
                                     std::size_t trunc_radius) {
    if (s < 0 || s > model.s_max) throw ParameterError("level_piece_kernel: level out of range");
    if (!is_pow2(M)) throw ParameterError("level_piece_kernel: grid must be a power of two");
    const double D = (s == 0) ? 1.0 : model.levels[static_cast<std::size_t>(s - 1)]->D_dbl;
    const double required = 32.0 * std::max(D, model.n_pow_t());
    if (static_cast<double>(M) < required) {
        throw AliasingRisk("level_piece_kernel: grid " + std::to_string(M) +
                           " below 32*max(D_s, N^t) = " + std::to_string(required));
    }
    if (trunc_radius > M / 2) throw ParameterError("level_piece_kernel: trunc_radius > M/2");

    GridKernel ker;
    ker.origin = GridKernel::Origin::FftInversion;
    ker.grid_size = M;
    if (s > 0 && model.levels[static_cast<std::size_t>(s - 1)]->centers.empty()) {
        ker.base = 0;
        return ker;  // zero kernel
    }

    std::vector<Cplx> buf(M);
    detail::sample_level_symbol(model, s, buf);
    fft_pow2(buf, /*inverse=*/true);  // buf[m] = int_T symbol(theta) e^{2 pi i theta m}, m mod M

    const long long R = static_cast<long long>(trunc_radius);
    ker.base = -R;
    ker.weights.resize(static_cast<std::size_t>(2 * R + 1));
    for (long long m = -R; m <= R; ++m) {
        const std::size_t idx = static_cast<std::size_t>((m + static_cast<long long>(M)) % static_cast<long long>(M));
        ker.weights[static_cast<std::size_t>(m + R)] = buf[idx];
    }
    double discarded = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const long long m = (j <= M / 2) ? static_cast<long long>(j) : static_cast<long long>(j) - static_cast<long long>(M);
        if (m < -R || m > R) discarded += std::abs(buf[j]);
    }
    ker.tail_bound = discarded;
    return ker;
}

inline std::size_t default_symbol_grid(const MultiplierModel& model, std::size_t samples_per_feature) {
    const double need = static_cast<double>(samples_per_feature) * std::max(model.n_pow_t(), model.max_D());
    if (need > static_cast<double>(1ull << 26)) {
        throw ParameterError("symbol grid beyond desk scale (> 2^26 points)");
    }
    return pow2_at_least(static_cast<std::size_t>(need));
}

// sup over the grid of |K^_N - L^_N|. K^_N comes from one FFT of the atom
// measure; L^_N is evaluated pointwise. Deterministic under any thread count.
inline double sup_diff(const MultiplierModel& model, std::uint64_t N, std::size_t grid_size) {
    if (N != model.N) throw ParameterError("sup_diff: N disagrees with the model");
    if (!is_pow2(grid_size)) throw ParameterError("sup_diff: grid must be a power of two");
    const double required = 64.0 * std::max(model.n_pow_t(), model.max_D());
    if (static_cast<double>(grid_size) < required) {
        throw AliasingRisk("sup_diff: grid " + std::to_string(grid_size) +
                           " below 64*max(N^t, D_s) = " + std::to_string(required));
    }
    const std::size_t M = grid_size;
    std::vector<Cplx> khat_grid(M, Cplx{0.0, 0.0});
    for (std::uint64_t k = 1; k <= N; ++k) {
        std::uint64_t kt = 1;
        for (int i = 0; i < model.t; ++i) kt *= k;
        khat_grid[kt % M] += 1.0 / static_cast<double>(N);
    }
    fft_pow2(khat_grid, /*inverse=*/false);

    const std::size_t chunk = 1 << 14;
    const std::size_t nchunks = (M + chunk - 1) / chunk;
    std::vector<double> chunk_max(nchunks, 0.0);
    parallel_chunks(M, chunk, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        double mx = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            const double theta = static_cast<double>(j) / static_cast<double>(M);
            mx = std::max(mx, std::abs(khat_grid[j] - lhat_eval(model, theta)));
        }
        chunk_max[c] = mx;
    });
    double result = 0.0;
    for (double v : chunk_max) result = std::max(result, v);
    return result;
}

}  // namespace ergomax
