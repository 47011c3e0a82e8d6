// thermo.hpp - bath thermodynamics: ln Z on the complex inverse-temperature
// half-plane, energy / heat capacity / dC_V/dT, beta(E) inversion, continuum
// limits, and the finite-size scaling probe.
//
// Energies are measured from the bath ground state (zero-point energy
// dropped); any constant shift cancels between the normalization and the
// coherence contour.

#pragma once

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "decomc/bath.hpp"
#include "decomc/errors.hpp"
#include "decomc/special.hpp"

namespace decomc {

// (beta, E, ln Z, C_V, dC_V/dT) bundle at one temperature.
struct ThermoPoint {
    double beta{0.0};
    double energy{0.0};
    double log_z{0.0};
    double c_v{0.0};
    double dcv_dT{0.0};
};

// Complex inverse temperature z = beta + i s (z = -i xi on the deformed
// contour); Re z > 0 is required for Tr e^{-z H} to converge.
struct ComplexBeta {
    Complex z;

    explicit ComplexBeta(Complex value) : z(value) {
        if (!(z.real() > 0.0))
            throw std::invalid_argument("ComplexBeta: Re z must be > 0");
    }
};

// ---------------------------------------------------------------------------
// Partition function and derivatives
// ---------------------------------------------------------------------------

// ln Z(z) = -sum_n ln(1 - e^{-z omega_n}); real for real z.
inline Complex log_partition(const ModeSet& modes, Complex z) {
    if (!(z.real() > 0.0))
        throw std::invalid_argument("log_partition: Re z must be > 0");
    Complex acc(0.0, 0.0);
    for (double w : modes.frequencies) acc -= log1m_exp_neg(z * w);
    return acc;
}

inline Complex log_partition(const ModeSet& modes, const ComplexBeta& z) {
    return log_partition(modes, z.z);
}

inline double log_partition(const ModeSet& modes, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("log_partition: beta must be > 0");
    KahanSum acc;
    for (double w : modes.frequencies) acc.add(-log1m_exp_neg(beta * w));
    return acc.value();
}

// Analytic E, C_V and dC_V/dT per mode:
//   E    = sum omega n_B(omega)
//   C_V  = sum (beta omega)^2 e^{beta omega} / (e^{beta omega} - 1)^2
//   dC_V/dT = -beta^2 dC_V/dbeta, third beta-derivative of ln Z taken in
//             closed form (never by nested numerical differentiation).
inline ThermoPoint thermo_derivatives(const ModeSet& modes, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("thermo_derivatives: beta must be > 0");
    KahanSum e, cv, dcv, lz;
    for (double w : modes.frequencies) {
        const double x = beta * w;
        const double em = std::expm1(x);      // e^x - 1
        const double u = em + 1.0;            // e^x
        const double g = w * w * u / (em * em);          // d2(lnZ)/dbeta2 per mode
        const double gp = -w * w * w * u * (u + 1.0) / (em * em * em);  // third derivative
        e.add(w / em);
        cv.add(beta * beta * g);
        dcv.add(-2.0 * beta * beta * beta * g - beta * beta * beta * beta * gp);
        lz.add(-log1m_exp_neg(x));
    }
    return ThermoPoint{beta, e.value(), lz.value(), cv.value(), dcv.value()};
}

// ---------------------------------------------------------------------------
// beta(E) inversion
// ---------------------------------------------------------------------------

// Solve E(beta) = E_target; E is strictly decreasing in beta so the root is
// unique.  Throws NonConvergence when no bracket exists below beta_max.
inline double solve_beta(const ModeSet& modes, double E_target, double rtol = 1e-12,
                         double beta_max_scale = 1e6) {
    if (modes.empty()) throw std::invalid_argument("solve_beta: empty ModeSet");
    if (!(E_target > 0.0)) throw std::invalid_argument("solve_beta: E_target must be > 0");

    auto energy = [&](double b) { return thermo_derivatives(modes, b).energy; };

    const double w1 = modes.frequencies.front();
    const double beta_max = beta_max_scale / w1;
    double lo = 1.0 / w1, hi = lo;
    // E increases as beta decreases; expand until the bracket is strict.
    while (energy(lo) <= E_target) {
        lo *= 0.5;
        if (lo < 1e-300) throw NonConvergence("solve_beta: bracket underflow");
    }
    while (energy(hi) >= E_target) {
        hi *= 2.0;
        if (hi > beta_max)
            throw NonConvergence("solve_beta: E_target below the beta_max guard range");
    }

    auto f = [&](double b) { return energy(b) - E_target; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    const double beta = 0.5 * (r.first + r.second);
    if (!(std::abs(energy(beta) - E_target) <= rtol * E_target))
        throw NonConvergence("solve_beta: residual above tolerance");
    return beta;
}

// Effective number of thermally populated degrees of freedom.
inline double n_eff(double E, double beta) {
    if (!(E > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("n_eff: E and beta must be > 0");
    return E * beta;
}

// ---------------------------------------------------------------------------
// Continuum limits
// ---------------------------------------------------------------------------

// Acoustic-dispersion continuum baths.  The constants come from the standard
// Bose integrals: int_0^inf -ln(1 - e^{-x}) dx = pi^2/6 (1D) and the
// corresponding x^2 integral pi^4/45 (3D).
struct ContinuumLine1D {
    double length{1.0};
    double speed{1.0};
};

struct ContinuumBox3D {
    double volume{1.0};
    double speed{1.0};
};

inline Complex continuum_log_partition(const ContinuumLine1D& line, Complex z) {
    if (!(z.real() > 0.0))
        throw std::invalid_argument("continuum_log_partition: Re z must be > 0");
    return M_PI * line.length / (6.0 * line.speed * z);
}

inline Complex continuum_log_partition(const ContinuumBox3D& box, Complex z) {
    if (!(z.real() > 0.0))
        throw std::invalid_argument("continuum_log_partition: Re z must be > 0");
    const double vs3 = box.speed * box.speed * box.speed;
    return M_PI * M_PI * box.volume / (90.0 * vs3 * z * z * z);
}

// Analytic thermodynamics of the 1D line: E = pi L / (6 v_s beta^2),
// C_V = pi L / (3 v_s beta) = 2 E beta, dC_V/dT = C_V beta.
inline ThermoPoint thermo_derivatives(const ContinuumLine1D& line, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("thermo_derivatives: beta must be > 0");
    const double c = M_PI * line.length / (6.0 * line.speed);
    ThermoPoint tp;
    tp.beta = beta;
    tp.log_z = c / beta;
    tp.energy = c / (beta * beta);
    tp.c_v = 2.0 * c / beta;
    tp.dcv_dT = 2.0 * c;
    return tp;
}

inline double solve_beta(const ContinuumLine1D& line, double E_target) {
    if (!(E_target > 0.0)) throw std::invalid_argument("solve_beta: E_target must be > 0");
    const double c = M_PI * line.length / (6.0 * line.speed);
    return std::sqrt(c / E_target);
}

// ---------------------------------------------------------------------------
// Finite-size scaling probe
// ---------------------------------------------------------------------------

struct ScalingFit {
    double exponent{0.0};   // p in peak ~ L^{-p}
    double residual{0.0};   // RMS residual of the log-log fit
};

// Least-squares slope of log|peak| against log L; for data c L^{-p} recovers p.
inline ScalingFit scaling_exponent_fit(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 3)
        throw std::invalid_argument("scaling_exponent_fit: need at least 3 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(samples.size());
    for (const auto& [L, peak] : samples) {
        if (!(L > 0.0)) throw std::invalid_argument("scaling_exponent_fit: L must be > 0");
        if (peak == 0.0) throw std::invalid_argument("scaling_exponent_fit: zero peak value");
        const double x = std::log(L), y = std::log(std::abs(peak));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 1e-12 * n * sxx) || denom == 0.0)
        throw DegenerateFit("scaling_exponent_fit: abscissas do not span a range");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (const auto& [L, peak] : samples) {
        const double r = std::log(std::abs(peak)) - (intercept + slope * std::log(L));
        ss += r * r;
    }
    return ScalingFit{-slope, std::sqrt(ss / n)};
}

} // namespace decomc
