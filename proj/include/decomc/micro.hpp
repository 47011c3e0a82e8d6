// micro.hpp - microcanonical normalization and coherence.
//
// Three routes:
//   * contour           - direct quadrature of the complex inverse-temperature
//                         integral along xi = i beta + s.  One-period mode
//                         (commensurate spectra) is a closed periodic contour
//                         and reproduces exact shell counting; infinite-line
//                         mode truncates at S saddle widths with a C-infinity
//                         taper whose bias passes the doubling test.
//   * saddle-corrected  - the 1/C_V expansion around xi = i beta:
//                         C = {1 + (1/2) d/dbeta(Q_b / f0_bb)}
//                             exp{-Q - (1/2) Q_b^2 / f0_bb},  f0_bb = C_V/beta^2.
//   * ohmic-closed      - the same expansion with the large-t Ohmic exponent
//                         Q = eta t / beta inserted.
//
// Steepest descent from first principles gives the normalization prefactor
// beta (2 pi C_V)^{-1/2}; the frequently quoted beta (2 pi / C_V)^{1/2} is
// also exposed (SaddlePaperZsp) and differs by exactly 2 pi.  The one-period
// contour, which counts shell states exactly, arbitrates in the tests; the
// prefactor convention cancels in any coherence ratio.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "decomc/bath.hpp"
#include "decomc/errors.hpp"
#include "decomc/parallel.hpp"
#include "decomc/thermal.hpp"
#include "decomc/thermo.hpp"

namespace decomc {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct ContourSpec {
    double beta_anchor{0.0};   // contour passes through xi = i beta; <= 0 means solve from E
    double half_width{240.0};  // S, in saddle-width units sqrt(beta^2 / C_V) (infinite-line mode)
    std::size_t n_points{4096};

    enum class Mode { InfiniteLineTruncated, OnePeriod } mode{Mode::InfiniteLineTruncated};
    double omega0{0.0};        // ladder base frequency, one-period mode only
    double rtol{1e-8};         // doubling-test tolerance
    double taper_fraction{0.5};// outer fraction of the truncated line under the smooth window

    void validate() const {
        if (n_points < 64) throw std::invalid_argument("ContourSpec: n_points must be >= 64");
        if (mode == Mode::InfiniteLineTruncated && !(half_width >= 6.0))
            throw std::invalid_argument("ContourSpec: half_width must be >= 6 saddle widths");
        if (mode == Mode::OnePeriod && !(omega0 > 0.0))
            throw std::invalid_argument("ContourSpec: one-period mode needs omega0 > 0");
        if (!(taper_fraction > 0.0 && taper_fraction < 1.0))
            throw std::invalid_argument("ContourSpec: taper_fraction must be in (0, 1)");
    }
};

enum class MicroMethod { Contour, SaddleCorrected, OhmicClosed };

struct MicroCoherence {
    Complex c{1.0, 0.0};
    Complex q_thermal{0.0, 0.0};     // Q[i beta, J]
    double preexp_correction{0.0};
    double exponent_correction{0.0}; // always <= 0 for C_V > 0
    double n_eff{0.0};
    MicroMethod method{MicroMethod::Contour};
};

enum class NormMethod { Contour, SaddleFirstPrinciples, SaddlePaperZsp };

// Q value and beta-derivatives at the saddle, as supplied by the caller
// (analytic for the Ohmic closed form, finite differences otherwise).
struct QDerivatives {
    Complex value{0.0};
    Complex d_beta{0.0};
    Complex d2_beta{0.0};
};

// ---------------------------------------------------------------------------
// Contour quadrature core
// ---------------------------------------------------------------------------

namespace detail {

// C-infinity taper: 1 at u <= 0, 0 at u >= 1.
inline double bump_taper(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    const double fa = std::exp(-1.0 / (1.0 - u));
    const double fb = std::exp(-1.0 / u);
    return fa / (fa + fb);
}

// One pass of (1/2pi) int exp(E beta - i E s + lnZ(beta - i s) - Q) ds with the
// constant x0 subtracted from the exponent; returns {num, den} so numerator
// and normalization always share nodes.  smax_or_period is the period P in
// one-period mode, the half-width otherwise.
template <class LnZ, class QFn>
std::pair<Complex, Complex> contour_pass(const LnZ& lnz, const QFn* q, double E, double beta,
                                         double smax_or_period, std::size_t n, bool one_period,
                                         double taper_fraction, double x0) {
    std::vector<Complex> num(n), den(n);
    const double P = smax_or_period;
    parallel_for(n, [&](std::size_t j) {
        double s, weight;
        if (one_period) {
            s = (static_cast<double>(j) + 0.5) * P / static_cast<double>(n);
            weight = P / static_cast<double>(n);
        } else {
            const double ds = 2.0 * P / static_cast<double>(n - 1);
            s = -P + ds * static_cast<double>(j);
            weight = (j == 0 || j + 1 == n) ? 0.5 * ds : ds;
            const double s0 = (1.0 - taper_fraction) * P;
            if (std::abs(s) > s0) weight *= bump_taper((std::abs(s) - s0) / (P - s0));
        }
        if (weight == 0.0) { num[j] = den[j] = Complex(0.0); return; }
        const Complex z(beta, -s);
        const Complex base = Complex(E * beta - x0, -E * s) + lnz(z);
        const Complex d = weight * std::exp(base);
        den[j] = d;
        num[j] = q ? weight * std::exp(base - (*q)(z)) : d;
    });
    Complex ns(0.0), ds_(0.0);
    for (std::size_t j = 0; j < n; ++j) { ns += num[j]; ds_ += den[j]; }
    const double inv2pi = 1.0 / (2.0 * M_PI);
    return {ns * inv2pi, ds_ * inv2pi};
}

struct ContourResult {
    Complex num, den;   // scaled by e^{-x0}
    double x0;          // subtracted exponent E beta + lnZ(beta)
};

// Runs a base and a doubled pass and applies the tail/resolution test.
// One-period mode doubles n; infinite-line mode doubles both S and n.
template <class LnZ, class QFn>
ContourResult contour_integrate(const LnZ& lnz, const QFn* q, double E, double beta,
                                const ContourSpec& spec, double c_v, bool test_ratio) {
    spec.validate();
    const bool one_period = spec.mode == ContourSpec::Mode::OnePeriod;
    const double x0 = E * beta + lnz(Complex(beta, 0.0)).real();

    double extent;
    if (one_period) {
        extent = 2.0 * M_PI / spec.omega0;
        const double ratio = E / spec.omega0;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, std::abs(ratio)))
            throw std::invalid_argument(
                "contour: one-period mode needs E at an exact shell energy (multiple of omega0)");
    } else {
        if (!(c_v > 0.0)) throw std::invalid_argument("contour: C_V must be > 0");
        extent = spec.half_width * beta / std::sqrt(c_v);
    }

    auto run = [&](double ext, std::size_t n) {
        return contour_pass(lnz, q, E, beta, ext, n, one_period, spec.taper_fraction, x0);
    };
    const auto coarse = run(extent, spec.n_points);
    const auto fine =
        one_period ? run(extent, 2 * spec.n_points) : run(2.0 * extent, 2 * spec.n_points);

    const Complex v1 = test_ratio ? coarse.first / coarse.second : coarse.second;
    const Complex v2 = test_ratio ? fine.first / fine.second : fine.second;
    const double scale = std::max(std::abs(v2), 1e-300);
    if (!(std::abs(v2 - v1) <= spec.rtol * scale))
        throw NonConvergence("contour: doubling the contour changed the result by " +
                             std::to_string(std::abs(v2 - v1) / scale) + " (rtol " +
                             std::to_string(spec.rtol) + ")");
    return {fine.first, fine.second, x0};
}

struct NoQ {
    Complex operator()(Complex) const { return Complex(0.0); }
};

} // namespace detail

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

// N = Tr delta(H - E), up to the stated prefactor convention.
template <class LnZ>
double normalization(const LnZ& lnz, const ThermoPoint& tp, double E, const ContourSpec& spec,
                     NormMethod method) {
    if (!(E > 0.0)) throw std::invalid_argument("normalization: E must be > 0");
    const double beta = tp.beta;
    switch (method) {
        case NormMethod::SaddleFirstPrinciples:
            return beta / std::sqrt(2.0 * M_PI * tp.c_v) * std::exp(E * beta + tp.log_z);
        case NormMethod::SaddlePaperZsp:
            return beta * std::sqrt(2.0 * M_PI / tp.c_v) * std::exp(E * beta + tp.log_z);
        case NormMethod::Contour: {
            const detail::NoQ* noq = nullptr;
            auto r = detail::contour_integrate(lnz, noq, E, beta, spec, tp.c_v, false);
            return r.den.real() * std::exp(r.x0);
        }
    }
    throw std::logic_error("normalization: unknown method");
}

inline double normalization(const ModeSet& modes, double E, const ContourSpec& spec,
                            NormMethod method) {
    const double beta = spec.beta_anchor > 0.0 ? spec.beta_anchor : solve_beta(modes, E);
    const auto tp = thermo_derivatives(modes, beta);
    auto lnz = [&](Complex z) { return log_partition(modes, z); };
    return normalization(lnz, tp, E, spec, method);
}

// ---------------------------------------------------------------------------
// Saddle-corrected coherence (the 1/C_V expansion)
// ---------------------------------------------------------------------------

// Shift of the saddle point xi = i beta + delta induced by the switching:
// delta = Q'[i beta] / f0''(i beta) with d/dxi = -i d/dbeta and
// f0''(i beta) = -C_V / beta^2, i.e. delta = i beta^2 Q_{,beta} / C_V.
// For the large-t Ohmic exponent this is -i eta t / C_V.
inline Complex saddle_shift(Complex dq_dbeta, double c_v, double beta) {
    if (!(c_v > 0.0)) throw std::invalid_argument("saddle_shift: C_V must be > 0");
    return Complex(0.0, 1.0) * beta * beta * dq_dbeta / c_v;
}

inline MicroCoherence coherence_saddle_corrected(const QDerivatives& q, const ThermoPoint& tp) {
    if (!(tp.c_v > 0.0))
        throw std::invalid_argument("coherence_saddle_corrected: C_V must be > 0");
    const double beta = tp.beta;
    const double b2_over_cv = beta * beta / tp.c_v;
    // (1/2) d/dbeta (Q_b beta^2 / C_V); d/dbeta(beta^2/C_V) = 2 beta/C_V + dCv_dT/C_V^2
    const Complex pre =
        0.5 * (q.d2_beta * b2_over_cv +
               q.d_beta * (2.0 * beta / tp.c_v + tp.dcv_dT / (tp.c_v * tp.c_v)));
    const Complex expo_corr = -0.5 * q.d_beta * q.d_beta * b2_over_cv;

    MicroCoherence out;
    out.method = MicroMethod::SaddleCorrected;
    out.q_thermal = q.value;
    out.preexp_correction = pre.real();
    out.exponent_correction = expo_corr.real();
    out.n_eff = tp.energy * beta;
    out.c = (1.0 + pre) * std::exp(-q.value + expo_corr);
    return out;
}

// Large-t Ohmic specialization:
// C = {1 + (t / 2 beta^2) d/dT(eta / C_V)} exp{-eta t/beta - eta^2 t^2/(2 beta^2 C_V)}.
// Valid in the window 1 << t/beta << 1/eta; the caller owns that check.
inline MicroCoherence coherence_ohmic(double eta, double deta_dT, const ThermoPoint& tp,
                                      double t) {
    if (!(tp.c_v > 0.0)) throw std::invalid_argument("coherence_ohmic: C_V must be > 0");
    if (!(eta >= 0.0)) throw std::invalid_argument("coherence_ohmic: eta must be >= 0");
    const double beta = tp.beta;
    const double d_eta_over_cv = deta_dT / tp.c_v - eta * tp.dcv_dT / (tp.c_v * tp.c_v);
    MicroCoherence out;
    out.method = MicroMethod::OhmicClosed;
    out.q_thermal = Complex(eta * t / beta, 0.0);
    out.preexp_correction = t / (2.0 * beta * beta) * d_eta_over_cv;
    out.exponent_correction = -eta * eta * t * t / (2.0 * beta * beta * tp.c_v);
    out.n_eff = tp.energy * beta;
    out.c = (1.0 + out.preexp_correction) *
            std::exp(-out.q_thermal.real() + out.exponent_correction);
    return out;
}

// Central finite differences of Q along real beta with one Richardson step;
// used where analytic derivatives are not available.
template <class QFn>
QDerivatives q_derivatives_fd(const QFn& q, double beta, double rel_step = 1e-4) {
    const double h = beta * rel_step;
    const Complex q0 = q(Complex(beta, 0.0));
    const Complex qp = q(Complex(beta + h, 0.0)), qm = q(Complex(beta - h, 0.0));
    const Complex qp2 = q(Complex(beta + 0.5 * h, 0.0)), qm2 = q(Complex(beta - 0.5 * h, 0.0));
    const Complex d1h = (qp - qm) / (2.0 * h);
    const Complex d1h2 = (qp2 - qm2) / h;
    const Complex d2h = (qp - 2.0 * q0 + qm) / (h * h);
    const Complex d2h2 = (qp2 - 2.0 * q0 + qm2) / (0.25 * h * h);
    return QDerivatives{q0, (4.0 * d1h2 - d1h) / 3.0, (4.0 * d2h2 - d2h) / 3.0};
}

// ---------------------------------------------------------------------------
// Contour coherence
// ---------------------------------------------------------------------------

// C = N^{-1} (1/2pi) int exp{-i xi E + lnZ(-i xi) - Q[xi, J]} dxi with the
// normalization taken from the same nodes, so prefactor conventions cancel.
// The saddle-expansion diagnostics are filled alongside the contour value.
template <class LnZ, class QFn>
MicroCoherence coherence_contour(const LnZ& lnz, const QFn& q, double E, const ContourSpec& spec,
                                 const ThermoPoint& tp) {
    const auto r = detail::contour_integrate(lnz, &q, E, tp.beta, spec, tp.c_v, true);
    MicroCoherence out;
    out.method = MicroMethod::Contour;
    out.c = r.num / r.den;
    out.q_thermal = q(Complex(tp.beta, 0.0));
    out.n_eff = tp.energy * tp.beta;
    const auto qd = q_derivatives_fd(q, tp.beta);
    const double b2_over_cv = tp.beta * tp.beta / tp.c_v;
    out.preexp_correction =
        (0.5 * (qd.d2_beta * b2_over_cv +
                qd.d_beta * (2.0 * tp.beta / tp.c_v + tp.dcv_dT / (tp.c_v * tp.c_v))))
            .real();
    out.exponent_correction = (-0.5 * qd.d_beta * qd.d_beta * b2_over_cv).real();
    return out;
}

// Discrete-bath convenience: beta from solve_beta on the same ln Z used in
// the contour, Q from the discrete mode sum.
inline MicroCoherence coherence_contour(const ModeSet& modes, const CurrentProfile& profile,
                                        double E, ContourSpec spec,
                                        const quad::Options& opts = {}) {
    if (spec.mode == ContourSpec::Mode::OnePeriod)
        commensurate_ratios(modes, spec.omega0);  // one-period needs a ladder spectrum
    const double beta = spec.beta_anchor > 0.0 ? spec.beta_anchor : solve_beta(modes, E);
    spec.beta_anchor = beta;
    const auto tp = thermo_derivatives(modes, beta);
    auto lnz = [&](Complex z) { return log_partition(modes, z); };
    const DiscreteQ q(modes, profile, true, opts);
    return coherence_contour(lnz, q, E, spec, tp);
}

} // namespace decomc
