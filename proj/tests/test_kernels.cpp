#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ergomax/kernels.hpp"
#include "ergomax/fft.hpp"
#include "oracles.hpp"

using namespace ergomax;

TEST_CASE("kernel density k") {
    CHECK(kernel_k_density(0.25, 1) == 1.0);
    CHECK(kernel_k_density(0.25, 2) == Catch::Approx(1.0).margin(1e-15));  // (1/2) 0.25^{-1/2}
    CHECK(kernel_k_density(1.5, 2) == 0.0);
    CHECK(kernel_k_density(-0.1, 1) == 0.0);
    CHECK(kernel_k_density(0.0, 1) == 1.0);
    CHECK(std::isinf(kernel_k_density(0.0, 2)));

    // unit mass, via the test-side quadrature on the substituted integrand
    const Cplx mass = oracles::khat_oracle(0.0, 3);
    CHECK(std::abs(mass - Cplx{1.0, 0.0}) < 1e-12);
}

TEST_CASE("khat trivial and closed-form values") {
    CHECK(khat(0.0, 1) == Cplx{1.0, 0.0});
    CHECK(khat(0.0, 5) == Cplx{1.0, 0.0});
    const Cplx v = khat(0.5, 1);
    CHECK(std::abs(v - Cplx{0.0, -2.0 / std::numbers::pi}) < 1e-12);
}

TEST_CASE("khat against the adaptive-quadrature oracle") {
    for (int t : {1, 2, 3}) {
        for (double beta : {0.3, 1.0, 5.0, 7.9, 8.1, 20.0, 100.0, 2048.5, 9999.25}) {
            const Cplx got = khat(beta, t);
            const Cplx ref = oracles::khat_oracle(beta, t);
            INFO("t=" << t << " beta=" << beta);
            CHECK(std::abs(got - ref) < 1e-9);
            CHECK(std::abs(got) <= 1.0 + 1e-12);
            CHECK(std::abs(khat(-beta, t) - std::conj(got)) == 0.0);
        }
    }
}

TEST_CASE("khat branch seam and t=1 closed form at scale") {
    for (int t : {1, 2, 3}) {
        for (double beta = 4.0; beta <= 16.0; beta += 0.5) {
            CHECK(std::abs(detail::khat_panels(beta, t) - detail::khat_asymptotic(beta, t)) < 1e-12);
        }
    }
    for (double beta : {50.0, 777.25, 123456.125}) {
        const Cplx closed = (1.0 - std::polar(1.0, -2.0 * std::numbers::pi * (beta - std::floor(beta)))) /
                            (Cplx{0.0, 2.0 * std::numbers::pi * beta});
        CHECK(std::abs(khat(beta, 1) - closed) < 1e-14);
    }
}

TEST_CASE("khat_checked reports achieved tolerance") {
    CHECK_NOTHROW(khat_checked(3.0, 2, 1e-10));
    CHECK_THROWS_AS(khat_checked(3.0, 2, 1e-18), NumericError);
}

TEST_CASE("bump evaluation") {
    const BumpSpec phi = phi_bump();
    CHECK(bump_eval(phi, 0.05) == 1.0);
    CHECK(bump_eval(phi, -0.1) == 1.0);
    CHECK(bump_eval(phi, 0.6) == 0.0);
    CHECK(bump_eval(phi, 0.5) == 0.0);
    // midpoint of the transition band: h(1/2) = 1/2 exactly
    CHECK(bump_eval(phi, 0.3) == Catch::Approx(0.5).margin(1e-15));
    // independent evaluation of the mollifier formula inside the band
    for (double xi : {0.15, 0.22, 0.37, 0.45}) {
        const double u = (0.5 - xi) / 0.4;
        const double ref = std::exp(-1.0 / u) / (std::exp(-1.0 / u) + std::exp(-1.0 / (1.0 - u)));
        CHECK(bump_eval(phi, xi) == Catch::Approx(ref).epsilon(1e-14));
        CHECK(bump_eval(phi, -xi) == bump_eval(phi, xi));
        CHECK(bump_eval(phi, xi) > 0.0);
        CHECK(bump_eval(phi, xi) < 1.0);
    }
    // plateau/support exactness on dense samples; the open-band samples stay
    // clear of the edge margins where h(u) saturates to an exact 0 or 1 in
    // double arithmetic (ratio g(1-u)/g(u) below machine epsilon once
    // 1/(1-u) - 1/u > -ln(eps/2) ~ 36.7, i.e. within ~2.7% of the plateau)
    const double margin = 0.03 * (0.5 - 0.1);
    for (int i = 0; i < 1000; ++i) {
        const double inside = -0.1 + 0.2 * i / 999.0;
        CHECK(bump_eval(phi, inside) == 1.0);
        const double outside = 0.5 + 2.0 * i / 999.0;
        CHECK(bump_eval(phi, outside) == 0.0);
        const double band = 0.1 + margin + (0.4 - 2 * margin) * i / 999.0;
        const double v = bump_eval(phi, band);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    // monotone on the transition band
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = bump_eval(phi, 0.1 + 0.4 * i / 100.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("choose_Ds") {
    const auto r0 = level_set(0, 1.0, 1);
    const auto r1 = level_set(1, 1.0, 1);
    CHECK(choose_Ds(r1, &r0) == 512);  // gap 1/210, need > 420
    CHECK(choose_Ds(r0, nullptr) == 2);

    // bound branch for t = 2: smallest power of two above 2*(36*1225)^2
    const auto r1q = level_set(1, 1.0, 2);
    const auto r0q = level_set(0, 1.0, 2);
    const BigInt d_bound = choose_Ds(r1q, &r0q, DsPolicy::BoundOnly);
    CHECK(d_bound == (BigInt(1) << 32));
    // exact branch is smaller: gap 1/44100 gives 2^17
    CHECK(choose_Ds(r1q, &r0q) == 131072);
}

TEST_CASE("build_multiplier: t=1 collapses to the main term") {
    const MultiplierModel model = build_multiplier(16, 1, 1.0, 2);
    CHECK(model.atom_count() == 0);
    for (double theta : {0.0, 0.01, 0.3, 0.49, 0.6, 0.97}) {
        const Cplx lhs = lhat_eval(model, theta);
        const double tw = wrap_half(theta);
        const Cplx rhs = khat(16.0 * tw, 1) * bump_eval(phi_bump(), tw);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("build_multiplier: t=2 level-1 atoms") {
    const MultiplierModel model = build_multiplier(16, 2, 1.0, 1);
    REQUIRE(model.levels.size() == 1);
    const LevelAtoms& lv = *model.levels[0];
    CHECK(lv.enumerated == 44099);
    CHECK(lv.centers.size() > 0);
    CHECK(lv.centers.size() < lv.enumerated);  // q = 2 mod 4 weights vanish
    CHECK(lv.D == 131072);

    // atom weights equal the directly summed Gauss sums
    for (std::size_t i : {std::size_t{0}, lv.centers.size() / 3, lv.centers.size() - 1}) {
        const Cplx direct = gauss_sum(lv.fractions[i], 2);
        CHECK(std::abs(lv.weights[i] - direct) < 1e-12);
    }
    // every atom is new at its level
    const auto r1 = level_set(1, 1.0, 2);
    const auto r0 = level_set(0, 1.0, 2);
    for (std::size_t i = 0; i < lv.fractions.size(); i += 997) {
        CHECK(contains(r1, lv.fractions[i]));
        CHECK_FALSE(contains(r0, lv.fractions[i]));
    }
    // separation D |xi - eta| > 2, exact arithmetic on adjacent pairs
    for (std::size_t i = 0; i + 1 < lv.fractions.size(); i += 1009) {
        const BigRat dist = circle_distance(lv.fractions[i], lv.fractions[i + 1]);
        CHECK(BigRat(lv.D) * dist > 2);
    }

    CHECK_THROWS_AS(build_multiplier(16, 2, 1.0, 2, 100'000), CapExceeded);
}

TEST_CASE("lhat evaluation") {
    const MultiplierModel m2 = build_multiplier(4, 2, 1.0, 1);
    CHECK(std::abs(lhat_eval(m2, 0.0) - Cplx{1.0, 0.0}) < 1e-12);

    // at the atom 1/3 the level-1 piece contributes exactly S(1/3)
    const Cplx s13 = gauss_sum(ReducedFraction(1, 3), 2);
    CHECK(std::abs(lhat_level_eval(m2, 1, 1.0 / 3.0) - s13) < 1e-12);
    CHECK(std::abs(lhat_eval(m2, 1.0 / 3.0) - lhat_main_eval(m2, 1.0 / 3.0) - s13) < 1e-12);

    // t=1 at theta=0.6: the bump itself vanishes at the literal argument, and
    // the wrapped symbol is the small main term at -0.4
    const MultiplierModel m1 = build_multiplier(16, 1, 1.0, 1);
    CHECK(bump_eval(phi_bump(), 0.6) == 0.0);
    const Cplx expect = khat(16.0 * (-0.4), 1) * bump_eval(phi_bump(), -0.4);
    CHECK(std::abs(lhat_eval(m1, 0.6) - expect) < 1e-13);
    CHECK(std::abs(lhat_eval(m1, 0.6)) < 0.02);
}

TEST_CASE("disjoint bumps: at most one atom contributes per level") {
    const MultiplierModel model = build_multiplier(4, 2, 1.0, 1);
    const LevelAtoms& lv = *model.levels[0];
    const double halfw = 0.5 / lv.D_dbl;
    for (int i = 0; i < 4096; ++i) {
        const double theta = static_cast<double>(i) / 4096.0;
        int active = 0;
        // count atoms whose bump covers theta, scanning a window around it
        auto it = std::lower_bound(lv.centers.begin(), lv.centers.end(), theta - 2.0 * halfw);
        for (; it != lv.centers.end() && *it < theta + 2.0 * halfw; ++it) {
            double d = theta - *it;
            d -= std::round(d);
            if (bump_eval(phi_bump(), lv.D_dbl * d) != 0.0) ++active;
        }
        CHECK(active <= 1);
    }
}

TEST_CASE("kn_atoms") {
    const GridKernel k32 = kn_atoms(3, 2);
    CHECK(k32.base == 1);
    CHECK(std::abs(k32.at(1) - Cplx{1.0 / 3.0, 0.0}) < 1e-16);
    CHECK(std::abs(k32.at(4) - Cplx{1.0 / 3.0, 0.0}) < 1e-16);
    CHECK(std::abs(k32.at(9) - Cplx{1.0 / 3.0, 0.0}) < 1e-16);
    CHECK(std::abs(k32.at(2)) == 0.0);
    CHECK(std::abs(k32.l1() - 1.0) < 1e-13);

    const GridKernel k1 = kn_atoms(1, 5);
    CHECK(k1.weights.size() == 1);
    CHECK(std::abs(k1.at(1) - Cplx{1.0, 0.0}) == 0.0);

    const GridKernel k41 = kn_atoms(4, 1);
    for (long long n = 1; n <= 4; ++n) CHECK(std::abs(k41.at(n) - Cplx{0.25, 0.0}) < 1e-16);

    const GridKernel kr = kn_atoms(3, 2, /*reflected=*/true);
    CHECK(std::abs(kr.at(-9) - Cplx{1.0 / 3.0, 0.0}) < 1e-16);
    CHECK(std::abs(kr.at(9)) == 0.0);
    CHECK(std::abs(kr.l1() - 1.0) < 1e-13);
}

TEST_CASE("level_piece_kernel: FFT round trip against the symbol") {
    // main term, t=1, N=4: the inverted kernel's forward transform re-matches
    // the symbol at grid points
    const MultiplierModel model = build_multiplier(4, 1, 1.0, 0);
    const std::size_t M = 4096;
    const GridKernel ker = level_piece_kernel(model, 0, M, M / 2 - 1);
    CHECK(ker.origin == GridKernel::Origin::FftInversion);

    for (std::size_t j = 0; j < M; j += 97) {
        const double theta = static_cast<double>(j) / M;
        Cplx acc{0.0, 0.0};
        for (long long m = ker.base; m <= -ker.base; ++m) {
            acc += ker.at(m) * std::polar(1.0, -2.0 * std::numbers::pi * theta * static_cast<double>(m));
        }
        CHECK(std::abs(acc - lhat_main_eval(model, theta)) < 1e-9);
    }

    // zero-atom level inverts to the zero kernel
    const MultiplierModel m1 = build_multiplier(4, 1, 1.0, 1);
    const GridKernel zero = level_piece_kernel(m1, 1, 4096, 1024);
    CHECK(zero.weights.empty());
    CHECK(zero.l1() == 0.0);

    CHECK_THROWS_AS(level_piece_kernel(model, 0, 4095, 100), ParameterError);  // not a power of two
    CHECK_THROWS_AS(level_piece_kernel(model, 0, 64, 16), AliasingRisk);
    CHECK_THROWS_AS(level_piece_kernel(model, 0, 4096, 4096), ParameterError);  // trunc > M/2
}

TEST_CASE("level_piece_kernel records the discarded tail") {
    const MultiplierModel model = build_multiplier(4, 1, 1.0, 0);
    const std::size_t M = 4096;
    const GridKernel full = level_piece_kernel(model, 0, M, M / 2 - 1);
    const GridKernel trunc = level_piece_kernel(model, 0, M, 64);
    CHECK(trunc.tail_bound > 0.0);
    CHECK(std::abs((trunc.l1() + trunc.tail_bound) - (full.l1() + full.tail_bound)) < 1e-12);
}

TEST_CASE("sup_diff: direct scan agreement and self-consistency") {
    const MultiplierModel model = build_multiplier(1, 1, 1.0, 0);
    const std::size_t M = 4096;
    const double got = sup_diff(model, 1, M);

    double ref = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const double theta = static_cast<double>(j) / M;
        const Cplx khat_n = weyl_sum(1, 1, theta);
        ref = std::max(ref, std::abs(khat_n - lhat_eval(model, theta)));
    }
    CHECK(got == Catch::Approx(ref).margin(1e-12));
    CHECK(got > 0.0);
    CHECK(sup_diff(model, 1, M) == got);  // reproducible between runs

    CHECK_THROWS_AS(sup_diff(model, 1, 32), AliasingRisk);
}

TEST_CASE("sup_diff decays for t=1") {
    const MultiplierModel m16 = build_multiplier(16, 1, 1.0, 0);
    const MultiplierModel m256 = build_multiplier(256, 1, 1.0, 0);
    const double s16 = sup_diff(m16, 16, 1024);
    const double s256 = sup_diff(m256, 256, 16384);
    CHECK(s256 < s16);
}

TEST_CASE("dyadic shell domination of the scaled kernel") {
    // k_eta(y) <= 4 t^{-1} 2^{-k/t} / (2^{-k} eta) on [2^{-(k+1)} eta, 2^{-k} eta]
    for (int t : {1, 2, 3}) {
        for (double eta : {1.0, 10.0}) {
            for (int k = 0; k <= 40; ++k) {
                const double lo = std::ldexp(eta, -(k + 1));
                const double hi = std::ldexp(eta, -k);
                const double bound = 4.0 / t * std::pow(2.0, -static_cast<double>(k) / t) / (std::ldexp(1.0, -k) * eta);
                for (int i = 0; i < 100; ++i) {
                    const double y = lo + (hi - lo) * (i + 0.5) / 100.0;
                    const double val = kernel_k_density(y / eta, t) / eta;
                    CHECK(val <= bound * (1.0 + 1e-12));
                }
            }
        }
    }
}

TEST_CASE("fft matches the direct DFT oracle") {
    std::vector<Cplx> x;
    for (int i = 0; i < 64; ++i) {
        x.emplace_back(std::cos(0.7 * i) + 0.1 * i, std::sin(1.3 * i));
    }
    auto fwd = x;
    fft_pow2(fwd, false);
    const auto ref = oracles::dft_direct(x, false);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(fwd[i] - ref[i]) < 1e-10);

    auto back = fwd;
    fft_pow2(back, true);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);

    CHECK_THROWS_AS([] {
        std::vector<Cplx> bad(10);
        fft_pow2(bad, false);
    }(), ParameterError);
}
