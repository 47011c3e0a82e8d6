// Bath structure tests.  Derived expectations are recomputed inline from
// their defining expressions rather than pasted as bare constants.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "decomc/bath.hpp"
#include "decomc/thermal.hpp"

using namespace decomc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("open-closed line quantization k_n = pi (n - 1/2) / L", "[bath]") {
    const LineSpec spec{M_PI, 1.0, 3};
    const auto modes = transmission_line_modes(spec, constant_coupling(1.0));
    REQUIRE(modes.size() == 3);
    CHECK_THAT(modes.frequencies[0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(modes.frequencies[1], WithinAbs(1.5, 1e-15));
    CHECK_THAT(modes.frequencies[2], WithinAbs(2.5, 1e-15));

    // one-meter line at the speed of light: omega_1 = pi c / 2L
    constexpr double c = 2.99792458e8;
    const auto line = transmission_line_modes(LineSpec{1.0, c, 1});
    CHECK_THAT(line.frequencies[0], WithinRel(M_PI * c / 2.0, 1e-12));
    CHECK_THAT(line.frequencies[0] / 1e8, WithinAbs(4.71, 5e-3));
}

TEST_CASE("line mode spacing is pi v_s / L", "[bath]") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> len(0.3, 9.0), vel(0.2, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const LineSpec spec{len(rng), vel(rng), 12};
        const auto modes = transmission_line_modes(spec);
        const double spacing = M_PI * spec.speed / spec.length;
        for (std::size_t n = 1; n < modes.size(); ++n) {
            REQUIRE(modes.frequencies[n] > modes.frequencies[n - 1]);
            CHECK_THAT(modes.frequencies[n] - modes.frequencies[n - 1],
                       WithinRel(spacing, 1e-12));
        }
    }
}

TEST_CASE("line spec validation", "[bath]") {
    CHECK_THROWS_AS(transmission_line_modes(LineSpec{0.0, 1.0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(transmission_line_modes(LineSpec{1.0, -1.0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(transmission_line_modes(LineSpec{1.0, 1.0, 0}), std::invalid_argument);
}

TEST_CASE("commensurate ladder construction and detection", "[bath]") {
    const auto lad = ladder_modes(0.7, 4, constant_coupling(1.0));
    CHECK_THAT(lad.frequencies[0], WithinRel(0.7, 1e-15));
    CHECK_THAT(lad.frequencies[3], WithinRel(2.8, 1e-15));
    const auto ratios = commensurate_ratios(lad, 0.7);
    CHECK(ratios == std::vector<long long>{1, 2, 3, 4});

    const ModeSet bad({1.0, 2.5001}, {1.0, 1.0});
    CHECK_THROWS_AS(commensurate_ratios(bad, 1.0), std::invalid_argument);
}

TEST_CASE("current Fourier transform: limits and closed values", "[bath]") {
    CurrentProfile prof;
    prof.t = 2.0;
    // Omega -> 0 limit is A t
    CHECK_THAT(current_fourier(prof, 1.0, 0.0).real(), WithinRel(2.0, 1e-15));
    CHECK_THAT(std::abs(current_fourier(prof, 1.0, 1e-12) - Complex(2.0, 0.0)),
               WithinAbs(0.0, 1e-11));

    // rectangular pulse power: |J~|^2 = A^2 2 (1 - cos W t) / W^2
    for (double W : {0.3, 1.7, 6.0}) {
        const double lhs = std::norm(current_fourier(prof, 0.7, W));
        const double rhs = 0.49 * 2.0 * (1.0 - std::cos(W * prof.t)) / (W * W);
        CHECK_THAT(lhs, WithinRel(rhs, 1e-13));
    }

    // (A=1, t=1, omega_r=10, Omega=pi): (1/i pi)(e^{i pi} - 1) e^{-pi/20}
    CurrentProfile p2;
    p2.t = 1.0;
    p2.omega_r = 10.0;
    const Complex expected =
        1.0 / Complex(0.0, M_PI) * (std::exp(Complex(0.0, M_PI)) - 1.0) * std::exp(-M_PI / 20.0);
    const Complex got = current_fourier(p2, 1.0, M_PI);
    CHECK_THAT(std::abs(got - expected), WithinAbs(0.0, 1e-14));
    CHECK_THAT(got.imag(), WithinRel(0.5440781752380719, 1e-12));
}

TEST_CASE("current profile validation", "[bath]") {
    CurrentProfile bad_t;
    bad_t.t = -1.0;
    CHECK_THROWS_AS(bad_t.validate(), std::invalid_argument);
    CurrentProfile bad_wr;
    bad_wr.omega_r = 0.0;
    CHECK_THROWS_AS(bad_wr.validate(), std::invalid_argument);
}

TEST_CASE("current Fourier transform: reality and bound", "[bath]") {
    std::mt19937 rng(402);
    std::uniform_real_distribution<double> tdist(0.0, 8.0), wdist(-30.0, 30.0),
        rdist(0.5, 200.0), adist(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        CurrentProfile prof;
        prof.t = tdist(rng);
        prof.omega_r = (trial % 3 == 0) ? std::numeric_limits<double>::infinity() : rdist(rng);
        const double a = adist(rng), W = wdist(rng);
        const Complex plus = current_fourier(prof, a, W);
        const Complex minus = current_fourier(prof, a, -W);
        REQUIRE_THAT(std::abs(minus - std::conj(plus)), WithinAbs(0.0, 1e-13));
        REQUIRE(std::abs(plus) <= std::abs(a) * prof.t * (1.0 + 1e-12));
    }
}

TEST_CASE("spectral density from modes reproduces the discrete sum", "[bath]") {
    CurrentProfile prof;
    prof.t = 2.5;
    prof.omega_r = 40.0;
    const double beta = 1.3;

    SECTION("single mode at 1e-6") {
        const ModeSet m({1.0}, {1.0});
        const double discrete = q_discrete(m, prof, beta).q_r;
        const auto F = spectral_density_from_modes(m, 1e-4);
        const double continuum = q_r_continuum(F, prof, beta);
        CHECK_THAT(continuum, WithinRel(discrete, 1e-6));
    }

    SECTION("empty ModeSet gives F == 0") {
        const auto F = spectral_density_from_modes(ModeSet{}, 0.1);
        CHECK(q_r_continuum(F, prof, beta) == 0.0);
        CHECK(F(0.5) == 0.0);
    }

    SECTION("two modes add") {
        const ModeSet m1({1.0}, {0.8});
        const ModeSet m2({2.2}, {0.5});
        const ModeSet both({1.0, 2.2}, {0.8, 0.5});
        const double eps = 1e-4;
        const double sum =
            q_r_continuum(spectral_density_from_modes(m1, eps), prof, beta) +
            q_r_continuum(spectral_density_from_modes(m2, eps), prof, beta);
        const double joint = q_r_continuum(spectral_density_from_modes(both, eps), prof, beta);
        CHECK_THAT(joint, WithinRel(sum, 1e-9));
    }
}

TEST_CASE("discrete/continuum equivalence on random small baths", "[bath]") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> wdist(0.4, 4.0), adist(0.1, 0.8),
        tdist(0.5, 4.0), bdist(0.4, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        std::vector<double> w, a;
        double base = wdist(rng);
        for (int k = 0; k < n; ++k) {
            w.push_back(base);
            a.push_back(adist(rng));
            base += 0.3 + wdist(rng) * 0.4;
        }
        const ModeSet modes(w, a);
        CurrentProfile prof;
        prof.t = tdist(rng);
        prof.omega_r = 60.0;
        const double beta = bdist(rng);

        double min_gap = w.front();
        for (std::size_t i = 1; i < w.size(); ++i) min_gap = std::min(min_gap, w[i] - w[i - 1]);
        // the peak width enters at O(eps^2) through the kernel curvature
        const auto F = spectral_density_from_modes(modes, 2e-4 * min_gap);
        const double discrete = q_discrete(modes, prof, beta).q_r;
        const double continuum = q_r_continuum(F, prof, beta);
        REQUIRE_THAT(continuum, WithinRel(discrete, 1e-4));
    }
}

TEST_CASE("spectral density validation", "[bath]") {
    const ModeSet m({1.0, 1.1}, {1.0, 1.0});
    CHECK_THROWS_AS(spectral_density_from_modes(m, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(spectral_density_from_modes(m, 0.06), std::invalid_argument);
    CHECK_THROWS_AS(SpectralDensity::tabulated({1.0, 0.5}, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(SpectralDensity::tabulated({0.5, 1.0}, {0.1, -0.1}), std::invalid_argument);
}

TEST_CASE("populated-mode estimate in SI units", "[bath]") {
    // k_B T L / (pi hbar c) at L = 1 m, T = 0.1 K; the quoted scale is ~10
    const double v = n_eff_si(1.0, 0.1);
    CHECK_THAT(v, WithinRel(13.900696018239772, 1e-12));
    CHECK_THAT(n_eff_si(2.0, 0.1), WithinRel(2.0 * v, 1e-14));
    CHECK_THAT(n_eff_si(1.0, 0.2), WithinRel(2.0 * v, 1e-14));
    CHECK_THROWS_AS(n_eff_si(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(n_eff_si(1.0, -0.1), std::invalid_argument);
}
