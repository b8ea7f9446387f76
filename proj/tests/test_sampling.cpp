#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ergomax/maxnorm.hpp"
#include "ergomax/random.hpp"
#include "ergomax/sampling.hpp"
#include "oracles.hpp"

using namespace ergomax;

TEST_CASE("extension interpolates at integers") {
    Rng rng(1);
    const OpSequence f = random_opseq(rng, 2, 6, -2, false);
    for (long long n = f.base() - 2; n <= f.last() + 2; ++n) {
        CHECK((extend(f, static_cast<double>(n)) - f.at(n)).cwiseAbs().maxCoeff() < 1e-14);
    }
    // Phi(1/2) = (2/pi)^2
    const OpSequence d0 = OpSequence::scalar(0, {Cplx{1.0, 0.0}});
    CHECK(std::abs(extend(d0, 0.5)(0, 0) - Cplx{0.4052847345693511, 0.0}) < 1e-12);

    const CMat x = random_general(rng, 3);
    const OpSequence dx = OpSequence::delta(0, x);
    CHECK((extend(dx, 0.5) - 0.4052847345693511 * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partition of unity from the squared-sinc kernel") {
    // The full lattice sum is exactly 1; truncation at K leaves a tail of
    // size sin^2(pi x) * ~2/(pi^2 K), which crosses 1e-4 only around K ~ 2e3.
    auto max_dev = [](long long K) {
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = static_cast<double>(i) / 400.0;
            double s = 0.0;
            for (long long n = -K; n <= K; ++n) s += sinc_sq(x - static_cast<double>(n));
            worst = std::max(worst, std::abs(s - 1.0));
        }
        return worst;
    };
    const double dev_1000 = max_dev(1000);
    const double dev_2048 = max_dev(2048);
    CHECK(dev_1000 < 2.5e-4);
    CHECK(dev_1000 > 5e-5);  // the tail is real
    CHECK(dev_2048 < 1.0e-4);
    CHECK(dev_2048 < dev_1000);
}

TEST_CASE("Psi cache against direct quadrature") {
    const auto& psi = psi_cache();
    // Psi(0) = int Psi^ = plateau mass 2 plus two half-unit transition bands
    CHECK(psi.at_grid(0) == Catch::Approx(3.0).margin(1e-12));
    // Psi vanishes at nonzero integers (exact cancellation of the mollifier)
    for (long long n : {1ll, 2ll, 5ll, 17ll, 40ll}) {
        CHECK(std::abs(psi.at_grid(n * 64)) < 1e-12);
    }
    // direct panel quadrature of int Psi^(xi) cos(2 pi xi x) dxi
    for (double x : {0.5, 1.25, 3.25, 7.75}) {
        auto f = [&](double xi) {
            return Cplx{bump_eval({1.0, 2.0, BumpSpec::Kind::Psi}, xi) * std::cos(2.0 * std::numbers::pi * xi * x), 0.0};
        };
        const Cplx ref = oracles::adaptive_simpson(f, -2.0, 2.0, 1e-13);
        CHECK(psi.at_grid(static_cast<long long>(std::llround(x * 64))) ==
              Catch::Approx(ref.real()).margin(1e-10));
    }
    // recorded tail bound dominates the actual edge values
    double edge = 0.0;
    for (long long j = 60 * 64; j <= 64 * 64; ++j) edge = std::max(edge, std::abs(psi.at_grid(j)));
    CHECK(edge < PsiCache::kTailBound);
}

TEST_CASE("reconstruction inverts the extension") {
    const OpSequence d0 = OpSequence::scalar(0, {Cplx{1.0, 0.0}});
    const CMat r0 = reconstruct(d0, 0, 1.0 / 64.0);
    CHECK(std::abs(r0(0, 0) - Cplx{1.0, 0.0}) < 1e-6);
    const CMat r5 = reconstruct(d0, 5, 1.0 / 64.0);
    CHECK(std::abs(r5(0, 0)) < 1e-6);

    // all admissible steps agree (the integrand is band-limited below 1/step)
    const CMat r8 = reconstruct(d0, 0, 1.0 / 8.0);
    CHECK(std::abs(r8(0, 0) - r0(0, 0)) < 1e-10);

    Rng rng(2);
    const OpSequence f = random_opseq(rng, 2, 5, -2, false);
    const OpSequence g = random_opseq(rng, 2, 4, -1, false);
    for (long long n = -3; n <= 4; ++n) {
        const CMat lhs = reconstruct(op_add(f, g), n, 1.0 / 32.0);
        const CMat rhs = reconstruct(f, n, 1.0 / 32.0) + reconstruct(g, n, 1.0 / 32.0);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((reconstruct(f, n, 1.0 / 32.0) - f.at(n)).cwiseAbs().maxCoeff() < 1e-6);
    }

    CHECK_THROWS_AS(reconstruct(d0, 0, 0.2), ParameterError);
    CHECK_THROWS_AS(reconstruct(d0, 0, 1.0 / 128.0), ParameterError);
}

TEST_CASE("positive parts of Psi") {
    const auto parts4 = psi_positive_parts();
    const auto& psi = psi_cache();
    const long long half = static_cast<long long>(PsiCache::kFftLen) / 2;
    double integral_abs = 0.0;
    for (long long j = -half; j <= half; ++j) {
        const std::size_t i = static_cast<std::size_t>(j + half);
        CHECK(parts4[0][i] >= 0.0);
        CHECK(parts4[1][i] >= 0.0);
        CHECK(parts4[2][i] == 0.0);
        CHECK(parts4[3][i] == 0.0);
        CHECK(parts4[0][i] - parts4[1][i] == psi.at_grid(j));  // exact reassembly
        integral_abs += (parts4[0][i] + parts4[1][i]) / PsiCache::kStepsPerUnit;
    }
    CHECK(integral_abs == Catch::Approx(psi.integral_abs()).epsilon(1e-2));
    CHECK(psi.integral_abs() < 2.0);  // int |Psi| stays O(1); observed ~1.61
}

TEST_CASE("alpha map: blocks, norms, inverse") {
    Rng rng(3);
    const OpSequence f = random_opseq(rng, 2, 4, 0, false);  // support {0..3}

    CHECK(max_entry_diff(alpha_map(f, 1), f) == 0.0);

    const OpSequence g = alpha_map(f, 2);
    CHECK(g.dim() == 4);
    CHECK(g.base() == 0);
    CHECK(g.size() == 2);
    CHECK((g.at(0).block(0, 0, 2, 2) - f.at(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g.at(0).block(2, 2, 2, 2) - f.at(1)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g.at(1).block(0, 0, 2, 2) - f.at(2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.at(0).block(0, 2, 2, 2).cwiseAbs().maxCoeff() == 0.0);

    CHECK(max_entry_diff(alpha_inverse(g, 2), f) == 0.0);

    for (int q : {2, 3, 4}) {
        for (double p : {1.0, 1.7, 2.0, std::numeric_limits<double>::infinity()}) {
            CHECK(std::abs(lp_norm(alpha_map(f, q), p) - lp_norm(f, p)) < 1e-13 * std::max(1.0, lp_norm(f, p)));
        }
    }
}

TEST_CASE("sigma map: dilation, norms, inverse") {
    Rng rng(4);
    const OpSequence f = random_opseq(rng, 2, 4, -1, false);
    CHECK(max_entry_diff(sigma_map(f, 1), f) == 0.0);

    const OpSequence d3 = OpSequence::scalar(3, {Cplx{1.0, 0.0}});
    const OpSequence s = sigma_map(d3, 2);
    CHECK(s.base() == 6);
    CHECK(s.size() == 1);

    for (int q : {2, 3}) {
        const OpSequence sf = sigma_map(f, q);
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            CHECK(std::abs(lp_norm(sf, p) - lp_norm(f, p)) < 1e-14 * std::max(1.0, lp_norm(f, p)));
        }
        CHECK(max_entry_diff(sigma_inverse(sf, q), f) == 0.0);
    }

    const OpSequence d5 = OpSequence::scalar(5, {Cplx{1.0, 0.0}});
    CHECK_THROWS_AS(sigma_inverse(d5, 2), ParameterError);
}

TEST_CASE("alpha map preserves maximal norms") {
    Rng rng(5);
    MaximalFamily fam;
    for (int m = 0; m < 2; ++m) fam.members.push_back(random_opseq(rng, 2, 4, 0, true));
    MaximalFamily famA;
    for (const auto& m : fam.members) famA.members.push_back(alpha_map(m, 2));
    const double v0 = maxnorm_selfadjoint(fam, 2.0, 1e-6).value;
    const double v1 = maxnorm_selfadjoint(famA, 2.0, 1e-6).value;
    CHECK(v1 == Catch::Approx(v0).epsilon(1e-4));
}

namespace {

// smooth band-limited test signal: inverse transform of a narrow bump symbol,
// sampled on Z and truncated where the tail is far below the tolerances
OpSequence bandlimited_signal(double plateau, double support, long long radius) {
    std::vector<Cplx> vals;
    for (long long m = -radius; m <= radius; ++m) {
        auto f = [&](double xi) {
            return Cplx{bump_eval({plateau, support, BumpSpec::Kind::Phi}, xi), 0.0} *
                   std::polar(1.0, 2.0 * std::numbers::pi * xi * static_cast<double>(m));
        };
        // presplit so the adaptive rule never sees more than ~half a period
        const int pieces = std::max(8, static_cast<int>(std::ceil(4.0 * std::abs(m) * support)));
        Cplx acc{0.0, 0.0};
        for (int i = 0; i < pieces; ++i) {
            const double a = -support + 2.0 * support * i / pieces;
            const double b = -support + 2.0 * support * (i + 1) / pieces;
            acc += oracles::adaptive_simpson(f, a, b, 1e-16);
        }
        vals.push_back(acc);
    }
    return OpSequence::scalar(-radius, vals);
}

}  // namespace

TEST_CASE("discrete multiplier: plateau pass-through and zero symbol") {
    const OpSequence f = bandlimited_signal(0.02, 1.0 / 16.0, 768);
    const Symbol phi = [](double xi) { return Cplx{bump_eval(phi_bump(), xi), 0.0}; };
    const OpSequence out = discrete_multiplier(f, phi);
    CHECK(max_entry_diff(out, f) < 1e-9);

    const Symbol zero = [](double) { return Cplx{0.0, 0.0}; };
    const OpSequence z = discrete_multiplier(f, zero);
    CHECK(lp_norm(z, std::numeric_limits<double>::infinity()) < 1e-15);
}

TEST_CASE("discrete multiplier against the direct kernel sum") {
    Rng rng(6);
    const OpSequence f = random_opseq(rng, 2, 5, -2, false);
    const Symbol sym = [](double xi) {
        return Cplx{bump_eval(phi_bump(), xi), 0.0} * std::polar(1.0, 3.0 * xi);
    };
    const OpSequence got = discrete_multiplier(f, sym);

    // oracle: kernel values by adaptive quadrature (tabulated once), then the
    // direct sum
    const long long reach = 344;
    std::vector<Cplx> kernel(static_cast<std::size_t>(2 * reach + 1));
    for (long long m = -reach; m <= reach; ++m) {
        auto g = [&](double xi) { return sym(xi) * std::polar(1.0, 2.0 * std::numbers::pi * xi * static_cast<double>(m)); };
        kernel[static_cast<std::size_t>(m + reach)] = oracles::adaptive_simpson(g, -0.5, 0.5, 1e-13);
    }
    for (long long n = -40; n <= 40; ++n) {
        CMat ref = CMat::Zero(2, 2);
        for (long long m = f.base(); m <= f.last(); ++m) {
            if (std::llabs(n - m) > reach) continue;
            ref += kernel[static_cast<std::size_t>(n - m + reach)] * f.at(m);
        }
        CHECK((got.at(n) - ref).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("periodized multiplier") {
    Rng rng(7);
    const OpSequence f = random_opseq(rng, 2, 5, -2, false);
    const Symbol phi = [](double xi) { return Cplx{bump_eval(phi_bump(), xi), 0.0}; };

    // q=1 coincides with the plain discrete multiplier
    const OpSequence p1 = periodized_multiplier(f, phi, 1);
    const OpSequence d1 = discrete_multiplier(f, phi);
    CHECK(max_entry_diff(p1, d1) < 1e-10);

    // the kernel is supported on qZ exactly: apply to a delta and look off-lattice
    const int q = 3;
    const Symbol phi_q = [&](double xi) { return phi(q * xi); };
    const OpSequence kernel_seq = periodized_multiplier(OpSequence::scalar(0, {Cplx{1.0, 0.0}}), phi_q, q);
    for (long long n = kernel_seq.base(); n <= kernel_seq.last(); ++n) {
        if (n % q != 0) CHECK(std::abs(kernel_seq.at(n)(0, 0)) == 0.0);
    }

    // frequency-domain oracle with the explicitly periodized symbol
    const Symbol phi_per = [&](double xi) {
        const double folded = xi - std::round(xi * q) / q;
        return phi_q(folded);
    };
    const OpSequence got = periodized_multiplier(f, phi_q, q);
    const OpSequence ref = discrete_multiplier(f, phi_per);
    CHECK(max_entry_diff(got, ref) < 1e-9);

    // support violation: phi itself is too wide for q >= 2
    CHECK_THROWS_AS(periodized_multiplier(f, phi, 2), ParameterError);
}

TEST_CASE("transference identities") {
    Rng rng(8);
    const Symbol phi = [](double xi) { return Cplx{bump_eval(phi_bump(), xi), 0.0}; };

    // q = 1: both sides are the same operator
    const OpSequence f0 = random_opseq(rng, 2, 4, -1, false);
    const TransferenceReport r1 = transference_check(f0, phi, 1);
    CHECK(r1.lattice_residual == 0.0);
    CHECK(r1.extension_residual <= r1.quad_tol);

    // delta input, q = 2
    const OpSequence d0 = OpSequence::scalar(0, {Cplx{1.0, 0.0}});
    const TransferenceReport r2 = transference_check(d0, phi, 2);
    CHECK(r2.lattice_residual <= 1e-8);
    CHECK(r2.extension_residual <= r2.quad_tol);

    // random trials at q = 3
    for (int trial = 0; trial < 10; ++trial) {
        const OpSequence f = random_opseq(rng, 2, 4, static_cast<long long>(rng.integer(5)) - 2, false);
        const TransferenceReport r = transference_check(f, phi, 3);
        CHECK(r.lattice_residual <= 1e-8);
        CHECK(r.extension_residual <= r.quad_tol);
    }
}

TEST_CASE("extension maximal norm is controlled by the lattice one") {
    Rng rng(9);
    for (int trial = 0; trial < 3; ++trial) {
        MaximalFamily fam;
        for (int m = 0; m < 2; ++m) fam.members.push_back(random_opseq(rng, 2, 4, 0, true));
        const double v_lattice = maxnorm_selfadjoint(fam, 2.0, 1e-5).value;

        // sample the extensions on the half-integer grid over a padded window
        const double h = 0.5;
        MaximalFamily sampled;
        for (const auto& m : fam.members) {
            std::vector<CMat> vals;
            for (long long j = 2 * (m.base() - 8); j <= 2 * (m.last() + 8); ++j) {
                vals.push_back(extend(m, h * static_cast<double>(j)));
            }
            sampled.members.push_back(OpSequence(2, 2 * (fam.members.front().base() - 8), std::move(vals)));
        }
        // weight h^{1/p} converts the counting norm into the grid L_p norm
        const double v_ext = std::pow(h, 0.5) * maxnorm_selfadjoint(sampled, 2.0, 1e-5).value;
        CHECK(v_ext <= 3.0 * v_lattice);
    }
}
