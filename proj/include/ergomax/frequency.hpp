#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

#include "ergomax/errors.hpp"
#include "ergomax/fft.hpp"
#include "ergomax/primes.hpp"
#include "ergomax/rational.hpp"

namespace ergomax {

// ---------------------------------------------------------------------------
// The rational frequency hierarchy.
//
// Level s >= 1 is built from M = floor(2^{rho s}) blocks of 2^s consecutive
// primes; block m carries the modulus Q_{s,m} = prod p_j^{st} over
// (m-1) 2^s < j <= m 2^s. Level 0 has the single empty-product modulus 1, so
// the level-0 set is {0/1}. Membership of a/q is a pure divisibility test:
// q | Q_{s,1} or q | Q_{s,1} Q_{s,m} for some 2 <= m <= M.
// ---------------------------------------------------------------------------

struct FrequencyLevelSet {
    int s = 0;
    double rho = 1.0;
    int t = 1;
    std::vector<BigInt> moduli;  // Q_{s,1} .. Q_{s,M}

    std::size_t blocks() const { return moduli.size(); }
    const BigInt& Q1() const { return moduli.front(); }
    BigInt max_modulus() const { return *std::max_element(moduli.begin(), moduli.end()); }
};

inline void check_level_params(int s, double rho, int t) {
    if (s < 0) throw ParameterError("level index s must be >= 0");
    if (!(rho > 0.0 && rho < 2.0)) throw ParameterError("rho must lie in (0,2)");
    if (t < 1) throw ParameterError("power t must be >= 1");
}

// Q_{s,m}: exact product of p_j^{st} over the m-th block of 2^s primes.
inline BigInt modulus_Q(int s, int m, int t) {
    if (s < 0 || m < 1 || t < 1) throw ParameterError("modulus_Q: need s >= 0, m >= 1, t >= 1");
    const std::uint64_t block = 1ull << s;
    const std::uint64_t hi = static_cast<std::uint64_t>(m) * block;
    const unsigned exp = static_cast<unsigned>(s) * static_cast<unsigned>(t);
    if (exp == 0) return 1;
    auto primes = nth_primes(hi);
    BigInt q = 1;
    for (std::uint64_t j = hi - block; j < hi; ++j) {
        q *= boost::multiprecision::pow(BigInt(primes[j]), exp);
    }
    return q;
}

inline FrequencyLevelSet level_set(int s, double rho, int t) {
    check_level_params(s, rho, t);
    FrequencyLevelSet set;
    set.s = s;
    set.rho = rho;
    set.t = t;
    std::size_t m_count = 1;
    if (s > 0) m_count = static_cast<std::size_t>(std::floor(std::pow(2.0, rho * s)));
    if (m_count < 1) m_count = 1;
    for (std::size_t m = 1; m <= m_count; ++m) {
        set.moduli.push_back(modulus_Q(s, static_cast<int>(m), t));
    }
    return set;
}

// Divisibility-based membership; never enumerates.
inline bool contains(const FrequencyLevelSet& set, const ReducedFraction& xi) {
    const BigInt& q = xi.den();
    if (set.Q1() % q == 0) return true;
    for (std::size_t m = 1; m < set.moduli.size(); ++m) {
        if ((set.Q1() * set.moduli[m]) % q == 0) return true;
    }
    return false;
}

// Enumeration size before reduction/dedup: |Z_{Q1}| + sum_{m>=2} |Z_{Q1 Qm}|.
inline BigInt candidate_count(const FrequencyLevelSet& set) {
    BigInt total = set.Q1();
    for (std::size_t m = 1; m < set.moduli.size(); ++m) total += set.Q1() * set.moduli[m];
    return total;
}

// All canonical fractions of level s that are not in the previous level,
// sorted ascending. level_prev == nullptr stands for the empty predecessor of
// level 0. Throws CapExceeded before allocating anything oversized.
inline std::vector<ReducedFraction> enumerate_new(const FrequencyLevelSet& level_s,
                                                  const FrequencyLevelSet* level_prev,
                                                  std::uint64_t cap) {
    if (level_prev && level_prev->s != level_s.s - 1) {
        throw ParameterError("enumerate_new: level_prev must have index s-1");
    }
    if (candidate_count(level_s) > cap) {
        throw CapExceeded("enumerate_new: level " + std::to_string(level_s.s) +
                              " has " + candidate_count(level_s).str() +
                              " candidates, cap " + std::to_string(cap),
                          level_s.s);
    }
    std::set<ReducedFraction> out;
    auto sweep = [&](const BigInt& q) {
        const std::uint64_t qq = q.convert_to<std::uint64_t>();
        for (std::uint64_t a = 0; a < qq; ++a) {
            ReducedFraction xi(BigInt(a), q);
            if (level_prev && contains(*level_prev, xi)) continue;
            if (!level_prev && level_s.s > 0) {
                // implicit predecessor {0/1}
                if (xi.is_zero()) continue;
            }
            out.insert(xi);
        }
    };
    sweep(level_s.Q1());
    for (std::size_t m = 1; m < level_s.moduli.size(); ++m) sweep(level_s.Q1() * level_s.moduli[m]);
    return std::vector<ReducedFraction>(out.begin(), out.end());
}

// ---------------------------------------------------------------------------
// Gauss sums S(a/q) = (1/q) sum_{0<=r<q} e^{-2 pi i r^t a / q}.
//
// Exact modular arithmetic first (r^t mod q), trigonometry last: the phase
// index a r^t mod q is exact, so no phase accumulates even for large q. A
// per-modulus summer shares the residue-count and root tables across all
// numerators of the same denominator.
// ---------------------------------------------------------------------------

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % q);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
    if (q == 1) return 0;
    std::uint64_t result = 1 % q;
    base %= q;
    while (exp) {
        if (exp & 1) result = mulmod_u64(result, base, q);
        base = mulmod_u64(base, base, q);
        exp >>= 1;
    }
    return result;
}

class GaussSummer {
public:
    GaussSummer(std::uint64_t q, int t) : q_(q) {
        if (q == 0) throw ParameterError("GaussSummer: q must be positive");
        if (t < 1) throw ParameterError("GaussSummer: t must be >= 1");
        std::vector<std::uint32_t> counts(q, 0);
        for (std::uint64_t r = 0; r < q; ++r) ++counts[powmod_u64(r, static_cast<std::uint64_t>(t), q)];
        for (std::uint64_t k = 0; k < q; ++k) {
            if (counts[k]) nonzero_.emplace_back(k, counts[k]);
        }
        roots_.resize(q);
        for (std::uint64_t j = 0; j < q; ++j) {
            roots_[j] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q));
        }
    }

    // S(a/q) with the fraction a/q not necessarily reduced; the value only
    // depends on the reduced form.
    Cplx at(std::uint64_t a) const {
        // Kahan-compensated accumulation over the nonzero residue counts.
        Cplx sum{0.0, 0.0}, comp{0.0, 0.0};
        for (const auto& [k, c] : nonzero_) {
            const Cplx term = static_cast<double>(c) * roots_[mulmod_u64(a % q_, k, q_)];
            const Cplx y = term - comp;
            const Cplx t2 = sum + y;
            comp = (t2 - sum) - y;
            sum = t2;
        }
        return sum / static_cast<double>(q_);
    }

private:
    std::uint64_t q_;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> nonzero_;
    std::vector<Cplx> roots_;
};

inline constexpr std::uint64_t kGaussDirectLimit = 100'000'000ull;

inline Cplx gauss_sum(const ReducedFraction& xi, int t) {
    if (t < 1) throw ParameterError("gauss_sum: t must be >= 1");
    if (xi.den() > kGaussDirectLimit) {
        throw ParameterError("gauss_sum: denominator exceeds direct-summation limit");
    }
    const std::uint64_t q = xi.den().convert_to<std::uint64_t>();
    const std::uint64_t a = xi.num().convert_to<std::uint64_t>();
    return GaussSummer(q, t).at(a);
}

// ---------------------------------------------------------------------------
// Weyl sums K^_N(theta) = (1/N) sum_{k=1..N} e^{-2 pi i k^t theta}.
// ---------------------------------------------------------------------------

// k^t * theta mod 1 without losing the low bits of the product: a two-product
// split keeps the fractional part accurate even when k^t ~ 2^50.
inline double frac_of_product(double k_pow, double theta) {
    const double p = k_pow * theta;
    const double err = std::fma(k_pow, theta, -p);
    double f = std::fmod(p, 1.0) + err;
    f -= std::floor(f);
    if (f >= 1.0) f -= 1.0;
    return f;
}

namespace detail {
inline Cplx weyl_partial(std::uint64_t lo, std::uint64_t hi, int t, double theta) {
    if (hi - lo <= 8) {
        Cplx s{0.0, 0.0};
        for (std::uint64_t k = lo; k < hi; ++k) {
            double kp = 1.0;
            for (int i = 0; i < t; ++i) kp *= static_cast<double>(k);
            s += std::polar(1.0, -2.0 * std::numbers::pi * frac_of_product(kp, theta));
        }
        return s;
    }
    const std::uint64_t mid = lo + (hi - lo) / 2;
    return weyl_partial(lo, mid, t, theta) + weyl_partial(mid, hi, t, theta);
}
}  // namespace detail

inline Cplx weyl_sum(std::uint64_t N, int t, double theta) {
    if (N == 0) throw ParameterError("weyl_sum: N must be >= 1");
    if (t < 1) throw ParameterError("weyl_sum: t must be >= 1");
    if (t * std::log2(static_cast<double>(N)) > 53.0) {
        throw ParameterError("weyl_sum: N^t exceeds exact double range");
    }
    if (theta == 0.0) return Cplx{1.0, 0.0};
    return detail::weyl_partial(1, N + 1, t, theta) / static_cast<double>(N);
}

// ---------------------------------------------------------------------------
// Minimal circle distance between distinct elements of level_s \ level_{s-1}.
// ---------------------------------------------------------------------------

struct GapResult {
    bool infinite = false;  // fewer than two elements
    bool is_bound = false;  // analytic lower bound, not the exact minimum
    BigRat gap = 0;
};

inline constexpr std::uint64_t kDefaultEnumCap = 1'000'000ull;

inline GapResult min_gap(const FrequencyLevelSet& level_s, const FrequencyLevelSet* level_prev,
                         std::uint64_t enum_cap = kDefaultEnumCap) {
    GapResult res;
    if (candidate_count(level_s) <= enum_cap) {
        auto elems = enumerate_new(level_s, level_prev, enum_cap);
        if (elems.size() < 2) {
            res.infinite = true;
            return res;
        }
        // sorted ascending: minimal pairwise circle distance is attained on
        // consecutive elements or on the wrap-around pair
        BigRat best = circle_distance(elems.front(), elems.back());
        for (std::size_t i = 0; i + 1 < elems.size(); ++i) {
            BigRat d = circle_distance(elems[i], elems[i + 1]);
            if (d < best) best = d;
        }
        res.gap = best;
        return res;
    }
    // common-denominator bound: all elements lie in (1/(Q1 max_m Qm)) Z
    BigInt denom = level_s.Q1() * level_s.max_modulus();
    res.is_bound = true;
    res.gap = BigRat(1, denom * denom);
    return res;
}

}  // namespace ergomax
