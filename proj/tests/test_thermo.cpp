// Thermodynamics tests.  Finite differences of ln Z are the independent
// oracle for the analytic E, C_V, dC_V/dT; step sizes follow the usual
// h ~ beta eps^{1/3} rule.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "decomc/thermo.hpp"

using namespace decomc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModeSet random_modes(std::mt19937& rng, int max_n = 8) {
    std::uniform_real_distribution<double> wdist(0.2, 5.0);
    const int n = 1 + static_cast<int>(rng() % max_n);
    std::vector<double> w, a;
    double base = wdist(rng) * 0.3;
    for (int k = 0; k < n; ++k) {
        w.push_back(base);
        a.push_back(1.0);
        base += 0.1 + 0.5 * wdist(rng);
    }
    return ModeSet(w, a);
}

} // namespace

TEST_CASE("log partition closed values", "[thermo]") {
    const ModeSet m({1.0}, {1.0});
    // geometric series: ln Z = -ln(1 - e^{-1})
    CHECK_THAT(log_partition(m, 1.0), WithinRel(-std::log(1.0 - std::exp(-1.0)), 1e-14));
    // frozen bath
    CHECK_THAT(log_partition(m, 746.0), WithinAbs(0.0, 1e-300));
    CHECK_THROWS_AS(log_partition(m, Complex(-0.1, 1.0)), std::invalid_argument);
    // the validated complex-inverse-temperature wrapper
    CHECK(log_partition(m, ComplexBeta(Complex(1.0, 0.5))) ==
          log_partition(m, Complex(1.0, 0.5)));
    CHECK_THROWS_AS(ComplexBeta(Complex(0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("commensurate-ladder log partition is periodic in Im z", "[thermo]") {
    const auto lad = ladder_modes(1.0, 7, constant_coupling(1.0));
    const Complex base = log_partition(lad, Complex(1.0, 0.3));
    const Complex shifted = log_partition(lad, Complex(1.0, 0.3 + 2.0 * M_PI));
    CHECK_THAT(std::abs(base - shifted), WithinAbs(0.0, 1e-12));
}

TEST_CASE("thermo derivatives: closed single-mode forms", "[thermo]") {
    const ModeSet m({1.0}, {1.0});
    const auto tp = thermo_derivatives(m, 1.0);
    const double e = std::exp(1.0);
    CHECK_THAT(tp.energy, WithinRel(1.0 / (e - 1.0), 1e-14));
    CHECK_THAT(tp.c_v, WithinRel(e / ((e - 1.0) * (e - 1.0)), 1e-14));

    // frozen oscillators
    const auto cold = thermo_derivatives(m, 500.0);
    CHECK(cold.energy < 1e-200);
    CHECK(cold.c_v < 1e-200);
    CHECK_THROWS_AS(thermo_derivatives(m, 0.0), std::invalid_argument);
}

TEST_CASE("analytic derivatives match finite differences of ln Z", "[thermo]") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> bdist(0.3, 3.0);
    for (int trial = 0; trial < 24; ++trial) {
        const auto modes = random_modes(rng);
        const double beta = bdist(rng);
        const auto tp = thermo_derivatives(modes, beta);

        // first derivative at h ~ eps^{1/3}, second at h ~ eps^{1/4}
        const double h = beta * std::cbrt(std::numeric_limits<double>::epsilon());
        const double h2 = beta * std::pow(std::numeric_limits<double>::epsilon(), 0.25);
        auto lz = [&](double b) { return log_partition(modes, b); };
        const double e_fd = -(lz(beta + h) - lz(beta - h)) / (2.0 * h);
        const double d2 = (lz(beta + h2) - 2.0 * lz(beta) + lz(beta - h2)) / (h2 * h2);
        const double cv_fd = beta * beta * d2;

        REQUIRE_THAT(tp.energy, WithinRel(e_fd, 1e-6));
        REQUIRE_THAT(tp.c_v, WithinRel(cv_fd, 1e-6));

        // dC_V/dT against differences of the analytic C_V (itself verified above)
        const double hb = beta * 1e-6;
        const double cv_p = thermo_derivatives(modes, beta + hb).c_v;
        const double cv_m = thermo_derivatives(modes, beta - hb).c_v;
        const double dcv_fd = -(cv_p - cv_m) / (2.0 * hb) * beta * beta;
        REQUIRE_THAT(tp.dcv_dT, WithinRel(dcv_fd, 1e-6));
    }
}

TEST_CASE("ladder energy matches -d lnZ/dbeta at 1e-8", "[thermo]") {
    const auto lad = ladder_modes(1.0, 50, constant_coupling(1.0));
    const double beta = 1.0;
    const double h = 1e-6;
    const double e_fd = -(log_partition(lad, beta + h) - log_partition(lad, beta - h)) / (2.0 * h);
    CHECK_THAT(thermo_derivatives(lad, beta).energy, WithinRel(e_fd, 1e-8));
}

TEST_CASE("E(beta) is strictly decreasing and C_V positive", "[thermo]") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> bdist(0.1, 4.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto modes = random_modes(rng);
        const double b1 = bdist(rng);
        const double b2 = b1 * (1.0 + 0.2 * (1.0 + (rng() % 5)));
        const auto t1 = thermo_derivatives(modes, b1);
        const auto t2 = thermo_derivatives(modes, b2);
        REQUIRE(t1.energy > t2.energy);
        REQUIRE(t1.c_v > 0.0);
        REQUIRE(t2.c_v > 0.0);
    }
}

TEST_CASE("solve_beta inverts E(beta)", "[thermo]") {
    const auto lad = ladder_modes(1.0, 8, constant_coupling(1.0));
    for (double beta0 : {0.3, 1.0, 2.7}) {
        const double E = thermo_derivatives(lad, beta0).energy;
        CHECK_THAT(solve_beta(lad, E), WithinRel(beta0, 1e-10));
    }

    const ModeSet single({1.0}, {1.0});
    CHECK_THAT(solve_beta(single, 1.0 / (std::exp(1.0) - 1.0)), WithinRel(1.0, 1e-10));

    CHECK_THROWS_AS(solve_beta(single, 0.0), std::invalid_argument);
    // E -> 0+ pushes beta past the guard
    CHECK_THROWS_AS(solve_beta(single, 1e-12, 1e-12, /*beta_max_scale=*/10.0), NonConvergence);
}

TEST_CASE("n_eff and the 1D continuum identities", "[thermo]") {
    CHECK(n_eff(10.0, 1.0) == 10.0);
    CHECK_THROWS_AS(n_eff(-1.0, 1.0), std::invalid_argument);

    const ContinuumLine1D line{19.0, 1.3};
    const double beta = 0.8;

    // E from a finite difference of the continuum ln Z, then N_eff = E beta
    const double h = beta * 1e-6;
    const double e_fd = -(continuum_log_partition(line, Complex(beta + h, 0.0)).real() -
                          continuum_log_partition(line, Complex(beta - h, 0.0)).real()) /
                        (2.0 * h);
    const double neff_expected = M_PI * line.length / (6.0 * line.speed * beta);
    CHECK_THAT(n_eff(e_fd, beta), WithinRel(neff_expected, 1e-8));

    // C_V = 2 N_eff for the 1D line, at 1e-12
    const auto tp = thermo_derivatives(line, beta);
    CHECK_THAT(tp.c_v, WithinRel(2.0 * tp.energy * beta, 1e-12));
}

TEST_CASE("continuum log partition values and scaling", "[thermo]") {
    // pi L / (6 v_s z) at L = 6, v_s = 1, z = pi is exactly 1
    CHECK_THAT(continuum_log_partition(ContinuumLine1D{6.0, 1.0}, Complex(M_PI, 0.0)).real(),
               WithinRel(1.0, 1e-14));

    // matches a dense mode sum to 1%
    const ContinuumLine1D line{200.0, 1.0};
    LineSpec spec{line.length, line.speed, 10000};
    const auto modes = transmission_line_modes(spec);
    const double beta = 1.0;
    CHECK_THAT(continuum_log_partition(line, Complex(beta, 0.0)).real(),
               WithinRel(log_partition(modes, beta), 1e-2));

    // 3D homogeneity: value(2z) = value(z) / 8
    const ContinuumBox3D box{40.0, 1.1};
    const Complex z(0.7, 0.2);
    CHECK_THAT(std::abs(continuum_log_partition(box, 2.0 * z) -
                        continuum_log_partition(box, z) / 8.0),
               WithinAbs(0.0, 1e-12));
}

TEST_CASE("scaling exponent fit recovers synthetic power laws", "[thermo]") {
    auto synth = [](double p, double c) {
        std::vector<std::pair<double, double>> s;
        for (double L : {8.0, 16.0, 32.0}) s.emplace_back(L, c * std::pow(L, -p));
        return s;
    };
    CHECK_THAT(scaling_exponent_fit(synth(2.0, 3.7)).exponent, WithinAbs(2.0, 1e-12));
    // 3D-Ising-like nu = 0.63: slope 1/nu
    CHECK_THAT(scaling_exponent_fit(synth(1.0 / 0.63, 0.9)).exponent,
               WithinRel(1.0 / 0.63, 1e-12));
    // away from criticality the peak scales as L^{-d}
    CHECK_THAT(scaling_exponent_fit(synth(3.0, 5.0)).exponent, WithinAbs(3.0, 1e-12));

    CHECK_THROWS_AS(scaling_exponent_fit({{4.0, 1.0}, {4.0, 2.0}, {4.0, 3.0}}), DegenerateFit);
    CHECK_THROWS_AS(scaling_exponent_fit({{4.0, 1.0}, {8.0, 2.0}}), std::invalid_argument);
}
