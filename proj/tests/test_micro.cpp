// Microcanonical machinery tests.  The one-period contour on a commensurate
// ladder is an exact shell counter (the integrand is a Dirac comb in energy),
// which makes it the reference for the saddle-point prefactor question and
// for the Fock-oracle cross-checks.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "decomc/fock.hpp"
#include "decomc/micro.hpp"

using namespace decomc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ContourSpec one_period_spec(double omega0, std::size_t n = 1024) {
    ContourSpec spec;
    spec.mode = ContourSpec::Mode::OnePeriod;
    spec.omega0 = omega0;
    spec.n_points = n;
    return spec;
}

} // namespace

TEST_CASE("one-period normalization counts shell states", "[micro]") {
    // ladder with 5 modes, shell M = 5: partitions of 5 -> 7 states
    const auto lad = ladder_modes(1.0, 5, constant_coupling(1.0));
    CHECK_THAT(normalization(lad, 5.0, one_period_spec(1.0), NormMethod::Contour),
               WithinRel(7.0, 1e-10));

    // single mode, one quantum: exactly one state
    const auto single = ladder_modes(1.0, 1, constant_coupling(1.0));
    CHECK_THAT(normalization(single, 1.0, one_period_spec(1.0), NormMethod::Contour),
               WithinRel(1.0, 1e-10));
}

TEST_CASE("contour and steepest-descent normalization agree to O(1/N_eff)", "[micro]") {
    const auto lad = ladder_modes(1.0, 96, constant_coupling(1.0));
    double prev_err = 1.0;
    for (double M : {15.0, 61.0, 243.0}) {
        const double beta = solve_beta(lad, M);
        ContourSpec spec = one_period_spec(1.0, 4096);
        spec.beta_anchor = beta;
        const double exact = normalization(lad, M, spec, NormMethod::Contour);
        const double saddle = normalization(lad, M, spec, NormMethod::SaddleFirstPrinciples);
        const double err = std::abs(saddle / exact - 1.0);
        const double neff = M * beta;
        REQUIRE(err < 3.0 / neff);   // O(1/N_eff) accuracy
        REQUIRE(err < prev_err);     // and improving along the scan
        prev_err = err;

        // the beta (2 pi / C_V)^{1/2} prefactor convention is 2 pi larger
        const double paper = normalization(lad, M, spec, NormMethod::SaddlePaperZsp);
        REQUIRE_THAT(paper / saddle, WithinRel(2.0 * M_PI, 1e-12));
    }
}

TEST_CASE("contour coherence: trivial and vacuum cases", "[micro]") {
    const auto lad = ladder_modes(1.0, 6, constant_coupling(0.0));  // J = 0
    CurrentProfile prof;
    prof.t = 2.0;
    prof.omega_r = 30.0;
    const auto c = coherence_contour(lad, prof, 4.0, one_period_spec(1.0));
    CHECK_THAT(std::abs(c.c - Complex(1.0, 0.0)), WithinAbs(0.0, 1e-12));

    // M = 0 shell: the coherence is the vacuum overlap
    const auto lad2 = ladder_modes(1.0, 4, constant_coupling(0.3));
    const auto disp = fock::displacement_amplitudes(lad2, prof);
    double x_sum = 0.0;
    for (const auto& a : disp.alphas) x_sum += std::norm(a);
    const Complex vac = std::exp(-0.5 * x_sum) * disp.c_phase;
    // E = 0 is outside solve_beta's range; anchor the contour at a cold beta,
    // where only the vacuum survives in the shell projector
    ContourSpec spec = one_period_spec(1.0, 2048);
    spec.beta_anchor = 30.0;
    auto lnz = [&](Complex z) { return log_partition(lad2, z); };
    const DiscreteQ q(lad2, prof, true);
    const auto tp = thermo_derivatives(lad2, 30.0);
    const auto c0 = coherence_contour(lnz, q, 0.0, spec, tp);
    CHECK_THAT(std::abs(c0.c - vac), WithinAbs(0.0, 1e-9));
}

TEST_CASE("contour matches the exact Fock shell average", "[micro]") {
    const auto lad = ladder_modes(1.0, 8, constant_coupling(0.12));
    CurrentProfile prof;
    prof.t = 3.0;
    prof.omega_r = 50.0;
    for (long long M : {5LL, 12LL}) {
        const auto exact = fock::coherence_exact_microcanonical(lad, prof, M);
        const auto contour =
            coherence_contour(lad, prof, static_cast<double>(M), one_period_spec(1.0));
        REQUIRE_THAT(std::abs(contour.c - exact), WithinAbs(0.0, 1e-8 * std::abs(exact)));
        REQUIRE(std::abs(contour.c) <= 1.0 + 1e-12);
    }
}

TEST_CASE("infinite-line contour is robust under doubling", "[micro]") {
    // continuum 1D line with Ohmic switching at N_eff = 10: the smooth wide
    // window keeps the doubling change below 1e-8 (NonConvergence otherwise)
    const ContinuumLine1D line{60.0 / M_PI, 1.0};
    const double beta = 1.0;
    const auto tp = thermo_derivatives(line, beta);
    REQUIRE_THAT(tp.energy * beta, WithinRel(10.0, 1e-12));

    auto lnz = [&](Complex z) { return continuum_log_partition(line, z); };
    const OhmicQ q(0.05, 50.0, 20.0);
    ContourSpec spec;
    spec.beta_anchor = beta;
    spec.n_points = 4096;
    spec.half_width = 240.0;
    spec.rtol = 1e-8;
    const auto c = coherence_contour(lnz, q, tp.energy, spec, tp);
    CHECK(std::abs(c.c) > 0.0);
    CHECK(std::abs(c.c) < 1.0);

    // and the truncated-line normalization approaches the saddle value
    const double n_contour = normalization(lnz, tp, tp.energy, spec, NormMethod::Contour);
    const double n_saddle = normalization(lnz, tp, tp.energy, spec,
                                          NormMethod::SaddleFirstPrinciples);
    CHECK_THAT(n_contour / n_saddle, WithinAbs(1.0, 3.0 / (tp.energy * beta)));
}

TEST_CASE("insufficient contour settings fail honestly", "[micro]") {
    const ContinuumLine1D line{60.0 / M_PI, 1.0};
    const auto tp = thermo_derivatives(line, 1.0);
    auto lnz = [&](Complex z) { return continuum_log_partition(line, z); };
    ContourSpec spec;
    spec.beta_anchor = 1.0;
    spec.n_points = 64;      // far too coarse for this integrand
    spec.half_width = 6.0;   // minimal window
    spec.rtol = 1e-8;
    CHECK_THROWS_AS(normalization(lnz, tp, tp.energy, spec, NormMethod::Contour),
                    NonConvergence);
}

TEST_CASE("contour spec validation", "[micro]") {
    ContourSpec spec;
    spec.n_points = 32;  // below the minimum
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.n_points = 128;
    spec.half_width = 3.0;  // below 6 saddle widths
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.half_width = 8.0;
    CHECK_NOTHROW(spec.validate());
    spec.mode = ContourSpec::Mode::OnePeriod;  // needs omega0
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.omega0 = 1.0;
    CHECK_NOTHROW(spec.validate());

    // one-period needs E on the shell lattice
    const auto lad = ladder_modes(1.0, 4, constant_coupling(0.1));
    CurrentProfile prof;
    prof.t = 1.0;
    prof.omega_r = 30.0;
    spec.n_points = 256;
    CHECK_THROWS_AS(coherence_contour(lad, prof, 2.5, spec), std::invalid_argument);
}

TEST_CASE("saddle shift", "[micro]") {
    // Ohmic large-t: dQ/dbeta = -eta t / beta^2 shifts the saddle by -i eta t / C_V
    const double eta = 0.07, t = 12.0, beta = 1.3, cv = 18.0;
    const Complex delta = saddle_shift(Complex(-eta * t / (beta * beta), 0.0), cv, beta);
    CHECK_THAT(std::abs(delta - Complex(0.0, -eta * t / cv)), WithinAbs(0.0, 1e-15));

    CHECK(saddle_shift(Complex(0.0, 0.0), cv, beta) == Complex(0.0, 0.0));
    // delta scales as 1/C_V at fixed beta
    const Complex d2 = saddle_shift(Complex(-1.0, 0.0), 2.0 * cv, beta);
    const Complex d1 = saddle_shift(Complex(-1.0, 0.0), cv, beta);
    CHECK_THAT(std::abs(d1 / d2), WithinRel(2.0, 1e-13));
    CHECK_THROWS_AS(saddle_shift(Complex(1.0, 0.0), -1.0, beta), std::invalid_argument);
}

TEST_CASE("saddle-corrected coherence: trivial case and sign law", "[micro]") {
    ThermoPoint tp;
    tp.beta = 1.0;
    tp.energy = 10.0;
    tp.c_v = 20.0;
    tp.dcv_dT = 20.0;
    const auto c = coherence_saddle_corrected(QDerivatives{}, tp);
    CHECK(c.c == Complex(1.0, 0.0));
    CHECK(c.exponent_correction == 0.0);

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.1, 5.0), s(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        ThermoPoint t2;
        t2.beta = u(rng);
        t2.energy = u(rng) * 5.0;
        t2.c_v = u(rng) * 10.0;
        t2.dcv_dT = s(rng) * 10.0;
        QDerivatives qd{Complex(u(rng), 0.0), Complex(s(rng), 0.0), Complex(s(rng), 0.0)};
        const auto mc = coherence_saddle_corrected(qd, t2);
        REQUIRE(mc.exponent_correction <= 0.0);
    }
    CHECK_THROWS_AS(coherence_saddle_corrected(QDerivatives{}, ThermoPoint{1.0, 1.0, 0.0, -1.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("saddle-corrected equals the Ohmic closed expansion exactly", "[micro]") {
    // Insert the large-t exponent Q = eta t / beta.  First derivative at
    // frozen eta, eta(T) entering once through the second derivative; with
    // that convention the two expressions are the same algebra.
    const double eta = 0.05, deta = 0.003, beta = 1.3, t = 17.0;
    ThermoPoint tp;
    tp.beta = beta;
    tp.energy = 12.0 / beta;
    tp.c_v = 24.0;
    tp.dcv_dT = 11.0;

    QDerivatives qd;
    qd.value = Complex(eta * t / beta, 0.0);
    qd.d_beta = Complex(-eta * t / (beta * beta), 0.0);
    qd.d2_beta = Complex(2.0 * eta * t / (beta * beta * beta) +
                             deta * t / (beta * beta * beta * beta),
                         0.0);

    const auto a = coherence_saddle_corrected(qd, tp);
    const auto b = coherence_ohmic(eta, deta, tp, t);
    REQUIRE_THAT(std::abs(a.c - b.c), WithinAbs(0.0, 1e-12 * std::abs(b.c)));
    REQUIRE_THAT(a.preexp_correction, WithinRel(b.preexp_correction, 1e-12));
    REQUIRE_THAT(a.exponent_correction, WithinRel(b.exponent_correction, 1e-12));
}

TEST_CASE("Ohmic micro coherence: quoted numbers and sign laws", "[micro]") {
    // C_V = 2 N_eff = 20 with C_V ~ T and constant eta: the preexponent
    // correction is -eta t / (4 beta N_eff) = -2.5% at eta t / beta = 1
    ThermoPoint tp;
    tp.beta = 1.0;
    tp.energy = 10.0;
    tp.c_v = 20.0;
    tp.dcv_dT = 20.0;  // C_V / T
    const auto mc = coherence_ohmic(0.05, 0.0, tp, 20.0);
    CHECK_THAT(mc.preexp_correction, WithinAbs(-0.025, 1e-15));
    CHECK_THAT(mc.exponent_correction, WithinAbs(-0.025, 1e-15));
    CHECK_THAT(std::abs(mc.c), WithinRel(0.975 * std::exp(-1.025), 1e-13));
    CHECK_THAT(std::abs(mc.c), WithinRel(0.3498265537708028, 1e-12));

    // eta = 0: no decoherence at all
    const auto off = coherence_ohmic(0.0, 0.0, tp, 20.0);
    CHECK(off.c == Complex(1.0, 0.0));

    // dC_V/dT < 0 with constant eta suppresses decoherence (positive preexp)
    ThermoPoint critical = tp;
    critical.dcv_dT = -30.0;
    CHECK(coherence_ohmic(0.05, 0.0, critical, 20.0).preexp_correction > 0.0);
}

TEST_CASE("finite-difference Q derivatives track the analytic ones", "[micro]") {
    const double eta = 0.1, wr = 70.0, t = 6.0, beta = 1.1;
    const OhmicQ q(eta, wr, t);
    const auto fd = q_derivatives_fd([&](Complex z) { return q(z); }, beta);
    const auto an = q_ohmic_complex(eta, Complex(beta, 0.0), wr, t);
    CHECK_THAT(std::abs(fd.d_beta - an.dq), WithinAbs(0.0, 1e-9 * std::abs(an.dq)));
    CHECK_THAT(std::abs(fd.d2_beta - an.d2q), WithinAbs(0.0, 1e-6 * std::abs(an.d2q)));
}
