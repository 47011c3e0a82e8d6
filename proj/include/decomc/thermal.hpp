// thermal.hpp - canonical decoherence functional Q[J] = Q_R + i Q_I.
//
// Routes:
//   * q_discrete      - exact mode sum for Q_R, principal-value quadrature
//                       for Q_I (free causal Green function).
//   * q_r_continuum   - adaptive quadrature of the spectral-density integral
//                       (1/pi) int dw/w^2 F(w) (1-cos wt) e^{-w/w_r} coth(b w/2).
//   * q_ohmic_closed  - closed form of that integral for F = eta w, exact at
//                       finite cutoff via the gamma-function representation
//                       of the thermal sum; analytic beta-derivatives.
//   * q_complex       - any of the above analytically continued to complex
//                       inverse temperature z with Re z > 0.
//
// The widely quoted expression
//   Q_R = (eta/2pi) ln(1+w_r^2 t^2) + (eta/pi) ln[(beta/pi t) sinh(pi t/beta)]
// is the beta*w_r -> infinity limit of the closed form and is provided as
// q_ohmic_wide_cutoff for comparison; the exact form is what matches the
// quadrature route to full precision at finite cutoff.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "decomc/bath.hpp"
#include "decomc/errors.hpp"
#include "decomc/quadrature.hpp"
#include "decomc/special.hpp"
#include "decomc/thermo.hpp"

namespace decomc {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class QProvenance { Discrete, Continuum, OhmicClosedForm };

struct DecoherenceExponent {
    double q_r{0.0};          // >= 0 at real beta
    double q_i{0.0};
    Complex beta_or_z{0.0};   // evaluation point
    QProvenance provenance{QProvenance::Discrete};
};

struct GreenFunctionValue {
    double omega_n{0.0};
    double Omega{0.0};
    Complex value{0.0};
};

// ---------------------------------------------------------------------------
// Free causal Green function, Fourier transformed
// ---------------------------------------------------------------------------

// G~(Omega) = 1 / (omega_n^2 - Omega^2 - i eps'), eps' = 2 omega_n eps.
// Re -> P[1/(omega^2 - Omega^2)] as eps -> 0.
inline Complex free_green_fourier(double omega_n, double Omega, double eps) {
    if (!(omega_n > 0.0)) throw std::invalid_argument("free_green_fourier: omega_n must be > 0");
    if (!(eps > 0.0)) throw std::invalid_argument("free_green_fourier: eps must be > 0");
    return 1.0 / Complex(omega_n * omega_n - Omega * Omega, -2.0 * omega_n * eps);
}

inline GreenFunctionValue free_green_value(double omega_n, double Omega, double eps) {
    return GreenFunctionValue{omega_n, Omega, free_green_fourier(omega_n, Omega, eps)};
}

// ---------------------------------------------------------------------------
// Q_I principal-value integral (per mode)
// ---------------------------------------------------------------------------

namespace detail {

// P int_0^inf |J~(W)|^2 / (w^2 - W^2) dW for one mode of frequency w and
// per-mode amplitude a (the profile's global scale applies on top).
// Pole window handled by the odd-pair form.
inline double green_pv_integral(const CurrentProfile& profile, double a, double w,
                                const quad::Options& opts) {
    const double t = profile.t;
    const double a_eff = a * profile.amplitude;
    if (t == 0.0 || a_eff == 0.0) return 0.0;
    auto g = [&](double W) { return std::norm(current_fourier(profile, a, W)); };

    const double panel = M_PI / t;
    double R;
    if (std::isinf(profile.omega_r)) {
        // tail bound ~ (16/9) a_eff^2 / R^3 against an absolute floor
        const double scale = std::max(1e-14, 1e-12 * g(0.0) / std::max(w, 1.0));
        R = std::cbrt(16.0 * a_eff * a_eff / (9.0 * scale));
    } else {
        R = 45.0 * profile.omega_r;
    }
    R = std::max(R, 3.0 * w);

    const double delta = 0.5 * w;
    // regular pieces
    auto f = [&](double W) { return g(W) / ((w - W) * (w + W)); };
    double total = quad::integrate_panels(f, 0.0, w - delta, panel, opts);
    total += quad::integrate_panels(f, w + delta, R, panel, opts);
    // pole window: integrand G(W)/(W - w) with G = -g/(W + w)
    auto G = [&](double W) { return -g(W) / (W + w); };
    total += quad::pv_window(G, w, delta, opts, panel);
    return total;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Discrete-bath Q
// ---------------------------------------------------------------------------

// Precomputes the per-mode current power and the (beta-independent) Q_I so
// the complex continuation can be evaluated cheaply along contours.
class DiscreteQ {
  public:
    DiscreteQ(const ModeSet& modes, const CurrentProfile& profile, bool with_qi = true,
              const quad::Options& opts = {})
        : freqs_(modes.frequencies), j2_(current_power_at_modes(modes, profile)) {
        modes.validate();
        profile.validate();
        if (with_qi) {
            // Q_I = -(1/2pi) sum_n P int |J~_n|^2 / (w_n^2 - W^2) dW
            double qi = 0.0;
            for (std::size_t n = 0; n < freqs_.size(); ++n) {
                qi -= detail::green_pv_integral(profile, modes.amplitudes[n], freqs_[n], opts) /
                      (2.0 * M_PI);
            }
            q_i_ = qi;
        }
    }

    double q_r(double beta) const {
        if (!(beta > 0.0)) throw std::invalid_argument("DiscreteQ: beta must be > 0");
        KahanSum acc;
        for (std::size_t n = 0; n < freqs_.size(); ++n) {
            acc.add(j2_[n] * coth(0.5 * beta * freqs_[n]) / (4.0 * freqs_[n]));
        }
        return acc.value();
    }

    double q_i() const { return q_i_; }

    // Q(z) = sum_n |J~_n(w_n)|^2 coth(z w_n / 2) / (4 w_n) + i Q_I
    Complex operator()(Complex z) const {
        if (!(z.real() > 0.0)) throw std::invalid_argument("DiscreteQ: Re z must be > 0");
        Complex acc(0.0, 0.0);
        for (std::size_t n = 0; n < freqs_.size(); ++n) {
            acc += j2_[n] * coth(0.5 * z * freqs_[n]) / (4.0 * freqs_[n]);
        }
        return acc + Complex(0.0, q_i_);
    }

  private:
    std::vector<double> freqs_;
    std::vector<double> j2_;
    double q_i_{0.0};
};

// Q_R = sum_n |J~_n(w_n)|^2 (2 n_B + 1) / (4 w_n),
// Q_I = -(1/2) sum_n int dW/2pi |J~_n(W)|^2 Re G~_n(W).
inline DecoherenceExponent q_discrete(const ModeSet& modes, const CurrentProfile& profile,
                                      double beta, const quad::Options& opts = {}) {
    if (!(beta > 0.0)) throw std::invalid_argument("q_discrete: beta must be > 0");
    DiscreteQ q(modes, profile, true, opts);
    return DecoherenceExponent{q.q_r(beta), q.q_i(), Complex(beta, 0.0), QProvenance::Discrete};
}

// ---------------------------------------------------------------------------
// Continuum Q_R
// ---------------------------------------------------------------------------

// (1/pi) int_0^inf dw/w^2 F(w) (1 - cos wt) e^{-w/w_r} coth(beta w / 2).
// The w -> 0 end is evaluated in the cancellation-free form
// 2 sin^2(wt/2) [1 + 2/expm1(beta w)] with the exact w = 0 limit.
template <class Kernel>
double q_r_continuum_kernel(Kernel&& F_over_w2, double F_zero_limit, double lo, double hi,
                            const CurrentProfile& profile, double beta,
                            const quad::Options& opts) {
    const double t = profile.t;
    auto f = [&](double w) -> double {
        if (w == 0.0) return F_zero_limit;
        const double s = std::sin(0.5 * w * t);
        const double cutoff = std::isinf(profile.omega_r) ? 1.0 : std::exp(-w / profile.omega_r);
        return F_over_w2(w) * 2.0 * s * s * cutoff * (1.0 + 2.0 / std::expm1(beta * w));
    };
    const double panel = t > 0.0 ? M_PI / t : 0.0;
    return quad::integrate_panels(f, lo, hi, panel, opts) / M_PI;
}

inline double q_r_continuum(const SpectralDensity& F, const CurrentProfile& profile, double beta,
                            const quad::Options& opts = {}) {
    profile.validate();
    if (!(beta > 0.0)) throw std::invalid_argument("q_r_continuum: beta must be > 0");
    const double t = profile.t;
    if (t == 0.0) return 0.0;
    const double amp2 = profile.amplitude * profile.amplitude;

    if (const auto* o = std::get_if<OhmicDensity>(&F.form)) {
        const double eta = o->eta;
        if (eta == 0.0) return 0.0;
        if (std::isinf(profile.omega_r))
            throw std::invalid_argument(
                "q_r_continuum: Ohmic density needs a finite ramp cutoff omega_r");
        const double R = 40.0 * std::max(profile.omega_r, 1.0 / beta);
        auto F_over_w2 = [eta](double w) { return eta / w; };
        return amp2 * q_r_continuum_kernel(F_over_w2, eta * t * t / beta, 0.0, R, profile, beta,
                                           opts);
    }

    const auto& tab = F.table();
    if (tab.omega.empty()) return 0.0;
    // reject tables whose support entirely misses the kernel's dominant range
    const double R_dom =
        std::isinf(profile.omega_r) ? 1e6 * std::max(1.0 / beta, 1.0 / t)
                                    : 45.0 * std::max(profile.omega_r, 1.0 / beta);
    if (tab.omega.front() > R_dom)
        throw std::invalid_argument("q_r_continuum: tabulated support misses the dominant range");

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < tab.omega.size(); ++i) {
        const double a = tab.omega[i], b = tab.omega[i + 1];
        if (tab.value[i] == 0.0 && tab.value[i + 1] == 0.0) continue;
        auto F_over_w2 = [&tab](double w) { return tab(w) / (w * w); };
        total += q_r_continuum_kernel(F_over_w2, 0.0, a, b, profile, beta, opts);
    }
    return amp2 * total;
}

// ---------------------------------------------------------------------------
// Ohmic closed form (exact at finite cutoff) and its continuation
// ---------------------------------------------------------------------------

struct OhmicQDerivatives {
    Complex q;    // Q(z)
    Complex dq;   // dQ/dz
    Complex d2q;  // d2Q/dz2
};

namespace detail {

// Closed singularities of the Ohmic continuation sit at z = -(1/w_r +- i t)/m
// and z = -i t / k, all with Re z <= 0; a small exclusion radius guards the
// evaluation anyway (radius documented as arbitrary).
inline void ohmic_pole_guard(Complex z, double t) {
    constexpr double radius = 1e-9;
    const double az = std::abs(z);
    const int kmax = static_cast<int>(t / std::max(az, radius)) + 2;
    for (int k = 1; k <= kmax; ++k) {
        if (std::abs(z - Complex(0.0, -t / k)) < radius ||
            std::abs(z - Complex(0.0, t / k)) < radius)
            throw std::invalid_argument("ohmic closed form: z within exclusion radius of a pole");
    }
}

} // namespace detail

// Q(z), dQ/dz, d2Q/dz2 for Ohmic dissipation at complex inverse temperature z.
// Derivation: expanding coth in Boltzmann factors turns the thermal part of
// the integral into sum_k ln(1 + t^2/(1/w_r + k z)^2), which sums to
// 2 lnG(1+a) - lnG(1+a+iy) - lnG(1+a-iy) with a = 1/(z w_r), y = t/z.
inline OhmicQDerivatives q_ohmic_complex(double eta, Complex z, double omega_r, double t) {
    if (!(eta >= 0.0)) throw std::invalid_argument("q_ohmic_complex: eta must be >= 0");
    if (!(omega_r > 0.0) || std::isinf(omega_r))
        throw std::invalid_argument("q_ohmic_complex: omega_r must be finite and > 0");
    if (!(z.real() > 0.0)) throw std::invalid_argument("q_ohmic_complex: Re z must be > 0");
    if (!(t >= 0.0)) throw std::invalid_argument("q_ohmic_complex: t must be >= 0");
    if (t == 0.0 || eta == 0.0) return {Complex(0.0), Complex(0.0), Complex(0.0)};
    detail::ohmic_pole_guard(z, t);

    const double pref = eta / M_PI;
    const double vac = 0.5 * std::log1p(omega_r * omega_r * t * t);

    const Complex a = 1.0 / (z * omega_r);
    const Complex y = t / z;
    const Complex wp = a + Complex(0.0, 1.0) * y;
    const Complex wm = a - Complex(0.0, 1.0) * y;

    const Complex I = 2.0 * log_gamma(1.0 + a) - log_gamma(1.0 + wp) - log_gamma(1.0 + wm);
    const Complex pp = digamma(1.0 + wp), pm = digamma(1.0 + wm), p0 = digamma(1.0 + a);
    const Complex tp = trigamma(1.0 + wp), tm = trigamma(1.0 + wm), t0 = trigamma(1.0 + a);

    const Complex G = pp * wp + pm * wm - 2.0 * a * p0;
    const Complex dI = G / z;
    const Complex d2I = -(2.0 * G + wp * wp * tp + wm * wm * tm - 2.0 * a * a * t0) / (z * z);

    return {pref * (vac + I), pref * dI, pref * d2I};
}

struct OhmicQReal {
    double q_r{0.0};
    double dq_dbeta{0.0};
    double d2q_dbeta2{0.0};
};

// Exact closed form at real beta with analytic first and second
// beta-derivatives; t = 0 returns (0, 0, 0).
inline OhmicQReal q_ohmic_closed(double eta, double beta, double omega_r, double t) {
    if (!(beta > 0.0)) throw std::invalid_argument("q_ohmic_closed: beta must be > 0");
    const auto d = q_ohmic_complex(eta, Complex(beta, 0.0), omega_r, t);
    return OhmicQReal{d.q.real(), d.dq.real(), d.d2q.real()};
}

// The familiar beta*omega_r >> 1 limit of the closed form (log-sinh form);
// kept for cross-checks and asymptotic tests.
inline double q_ohmic_wide_cutoff(double eta, double beta, double omega_r, double t) {
    if (!(beta > 0.0)) throw std::invalid_argument("q_ohmic_wide_cutoff: beta must be > 0");
    if (t == 0.0 || eta == 0.0) return 0.0;
    const double x = M_PI * t / beta;
    // ln sinh(x) = x - ln 2 + ln(1 - e^{-2x}), overflow free
    const double ln_sinh_over_x = x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x)) - std::log(x);
    return eta / (2.0 * M_PI) * std::log1p(omega_r * omega_r * t * t) +
           eta / M_PI * ln_sinh_over_x;
}

// ---------------------------------------------------------------------------
// Complex continuation front-ends
// ---------------------------------------------------------------------------

// Ohmic Q(z) evaluator for contour integration.  Q_I is not Bose enhanced and
// is omitted on this route.
class OhmicQ {
  public:
    OhmicQ(double eta, double omega_r, double t) : eta_(eta), omega_r_(omega_r), t_(t) {}

    Complex operator()(Complex z) const { return q_ohmic_complex(eta_, z, omega_r_, t_).q; }
    OhmicQDerivatives derivatives(Complex z) const {
        return q_ohmic_complex(eta_, z, omega_r_, t_);
    }

  private:
    double eta_, omega_r_, t_;
};

// Tabulated-F Q(z) evaluator: complex quadrature of the spectral integral.
class TabulatedQ {
  public:
    TabulatedQ(SpectralDensity F, const CurrentProfile& profile, const quad::Options& opts = {})
        : F_(std::move(F)), profile_(profile), opts_(opts) {
        profile.validate();
        if (F_.is_ohmic())
            throw std::invalid_argument("TabulatedQ: use OhmicQ for the Ohmic closed form");
    }

    Complex operator()(Complex z) const {
        if (!(z.real() > 0.0)) throw std::invalid_argument("TabulatedQ: Re z must be > 0");
        const auto& tab = F_.table();
        const double t = profile_.t;
        if (t == 0.0) return Complex(0.0);
        const double amp2 = profile_.amplitude * profile_.amplitude;
        const double panel = M_PI / t;
        Complex total(0.0);
        for (std::size_t i = 0; i + 1 < tab.omega.size(); ++i) {
            if (tab.value[i] == 0.0 && tab.value[i + 1] == 0.0) continue;
            auto f = [&](double w) -> Complex {
                const double s = std::sin(0.5 * w * t);
                const double cut =
                    std::isinf(profile_.omega_r) ? 1.0 : std::exp(-w / profile_.omega_r);
                return tab(w) / (w * w) * 2.0 * s * s * cut * coth(0.5 * z * w);
            };
            total += quad::integrate_panels(f, tab.omega[i], tab.omega[i + 1], panel, opts_);
        }
        return amp2 * total / M_PI;
    }

  private:
    SpectralDensity F_;
    CurrentProfile profile_;
    quad::Options opts_;
};

inline Complex q_complex(const ModeSet& modes, const CurrentProfile& profile, Complex z,
                         const quad::Options& opts = {}) {
    return DiscreteQ(modes, profile, true, opts)(z);
}

inline Complex q_complex(const SpectralDensity& F, const CurrentProfile& profile, Complex z,
                         const quad::Options& opts = {}) {
    if (const auto* o = std::get_if<OhmicDensity>(&F.form)) {
        const double amp2 = profile.amplitude * profile.amplitude;
        return amp2 * q_ohmic_complex(o->eta, z, profile.omega_r, profile.t).q;
    }
    return TabulatedQ(F, profile, opts)(z);
}

template <class Bath>
Complex q_complex(const Bath& bath, const CurrentProfile& profile, const ComplexBeta& z,
                  const quad::Options& opts = {}) {
    return q_complex(bath, profile, z.z, opts);
}

// Q_I for a tabulated density via the dispersion kernel, with the order of
// integration swapped so the Omega integral collapses to the same
// principal-value integral the discrete route uses:
//   Q_I = -(1/2pi) int dW |j(W)|^2 Delta'(W)
//       = -(1/pi^2) int_support dw F(w) w P int dW |j(W)|^2 / (w^2 - W^2).
// A delta-peak table reproduces the discrete Q_I exactly.
inline double q_i_continuum(const SpectralDensity& F, const CurrentProfile& profile,
                            const quad::Options& opts = {}) {
    profile.validate();
    if (F.is_ohmic())
        throw std::invalid_argument("q_i_continuum: needs a tabulated density");
    if (profile.t == 0.0) return 0.0;
    const auto& tab = F.table();
    const double amp2 = profile.amplitude * profile.amplitude;
    CurrentProfile unit = profile;
    unit.amplitude = 1.0;

    quad::Options outer = opts;
    outer.rtol = std::max(opts.rtol, 1e-7);  // nested quadrature
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < tab.omega.size(); ++i) {
        if (tab.value[i] == 0.0 && tab.value[i + 1] == 0.0) continue;
        auto f = [&](double w) {
            return tab(w) * w * detail::green_pv_integral(unit, 1.0, w, opts);
        };
        total += quad::integrate_panels(f, tab.omega[i], tab.omega[i + 1],
                                        M_PI / profile.t, outer);
    }
    return -amp2 * total / (M_PI * M_PI);
}

// ---------------------------------------------------------------------------
// Hermitean-part dispersion relation (scalar aggregated channel)
// ---------------------------------------------------------------------------

// Delta'_agg(Omega) = P int_0^inf dw/2w D_agg(w) [1/(w-Omega) + 1/(w+Omega)]
// with D_agg = (2w/pi) F(w), i.e. (1/pi) P int F(w) [1/(w-Omega) + 1/(w+Omega)] dw.
// F vanishes outside the tabulated support (mode-derived tables are built that
// way); Omega at a support edge leaves a one-sided pole and is rejected.
inline double hermitean_part_dispersion(const SpectralDensity& F, double Omega,
                                        const quad::Options& opts = {}) {
    if (F.is_ohmic())
        throw std::invalid_argument("hermitean_part_dispersion: needs a tabulated density");
    const auto& tab = F.table();
    if (tab.omega.size() < 2) return 0.0;
    const double a = tab.omega.front(), b = tab.omega.back();
    const double W = std::abs(Omega);  // the kernel is even in Omega

    const double edge_guard = 1e-12 * (b - a);
    if (std::abs(W - a) < edge_guard || std::abs(W - b) < edge_guard)
        throw std::invalid_argument(
            "hermitean_part_dispersion: Omega at a support edge, principal value undefined");

    auto plus_term = [&](double w) { return tab(w) / (w + W); };
    double total = quad::integrate(plus_term, a, b, opts);

    if (W < a || W > b) {
        auto minus_term = [&](double w) { return tab(w) / (w - W); };
        total += quad::integrate(minus_term, a, b, opts);
    } else {
        const double delta = std::min({W - a, b - W, 0.5 * W});
        auto minus_term = [&](double w) { return tab(w) / (w - W); };
        total += quad::integrate(minus_term, a, W - delta, opts);
        total += quad::integrate(minus_term, W + delta, b, opts);
        auto g = [&](double w) { return tab(w); };
        total += quad::pv_window(g, W, delta, opts);
    }
    return total / M_PI;
}

} // namespace decomc
