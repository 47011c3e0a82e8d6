// special.hpp - small numerics toolbox: stable hyperbolic kernels, complex
// log-gamma / digamma / trigamma, Laguerre values, compensated summation.
//
// The complex gamma-family functions use the Stirling asymptotic series after
// an upward recurrence shift.  Arguments are shifted until Re w >= 12 and
// Re w >= |Im w| (argument below 45 degrees), where the series truncated at
// B_14 is accurate to ~1e-17 relative.  All inputs used by this library stay
// off the cut (-inf, 0]; with the shift rule each log factor keeps a fixed
// sign of Im, so the result is the analytic continuation from the real axis.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace decomc {

using Complex = std::complex<double>;

namespace detail {

inline bool is_complex_zero(double x) { return x == 0.0; }
inline bool is_complex_zero(const Complex& x) { return x == Complex(0.0, 0.0); }

} // namespace detail

// ---------------------------------------------------------------------------
// Stable elementary kernels
// ---------------------------------------------------------------------------

// coth(x) for real x > 0 without overflow: coth(x) = 1 + 2/(e^{2x}-1).
inline double coth(double x) {
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

// coth(w) for complex w with Re w > 0: (1+e^{-2w})/(1-e^{-2w}).
inline Complex coth(const Complex& w) {
    const Complex e = std::exp(-2.0 * w);
    return (1.0 + e) / (1.0 - e);
}

// log(1 - e^{-x}) for real x > 0.
inline double log1m_exp_neg(double x) {
    return std::log(-std::expm1(-x));
}

// log(1 - e^{-w}) for complex w with Re w > 0, smooth on that half-plane.
// |e^{-w}| < 1 keeps 1 - e^{-w} inside the disc around 1, so the principal
// branch never crosses the cut; a series handles |w| -> 0.
inline Complex log1m_exp_neg(const Complex& w) {
    const double aw = std::abs(w);
    if (aw < 1e-4) {
        // 1 - e^{-w} = w * (1 - w/2 + w^2/6 - w^3/24 + w^4/120)
        const Complex phi = 1.0 + w * (-0.5 + w * (1.0 / 6.0 + w * (-1.0 / 24.0 + w / 120.0)));
        return std::log(w) + std::log(phi);
    }
    const Complex u = std::exp(-w);
    if (std::abs(u) < 1e-8) {
        return -u * (1.0 + 0.5 * u);  // log(1-u) ~ -u - u^2/2
    }
    return std::log(1.0 - u);
}

// ---------------------------------------------------------------------------
// Complex gamma family (Stirling + recurrence)
// ---------------------------------------------------------------------------

namespace detail {

// B_{2n} / (2n (2n-1)) for the lnGamma Stirling series, n = 1..7
constexpr double kStirlingLn[7] = {
    1.0 / 12.0,      -1.0 / 360.0,     1.0 / 1260.0,       -1.0 / 1680.0,
    1.0 / 1188.0,    -691.0 / 360360.0, 1.0 / 156.0,
};
// B_{2n} / (2n) for the digamma series
constexpr double kStirlingPsi[7] = {
    1.0 / 12.0,      -1.0 / 120.0,     1.0 / 252.0,        -1.0 / 240.0,
    1.0 / 132.0,     -691.0 / 32760.0,  1.0 / 12.0,
};
// B_{2n} for the trigamma series
constexpr double kBernoulli[7] = {
    1.0 / 6.0,       -1.0 / 30.0,      1.0 / 42.0,         -1.0 / 30.0,
    5.0 / 66.0,      -691.0 / 2730.0,   7.0 / 6.0,
};

inline bool needs_shift(const Complex& w) {
    return w.real() < 12.0 || w.real() < std::abs(w.imag());
}

} // namespace detail

// log Gamma(w), analytic continuation from the positive real axis.
// Requires w off (-inf, 0]; callers in this library keep Im w of fixed sign
// along any continuation path, which the shift rule preserves.
inline Complex log_gamma(Complex w) {
    if (w.real() <= 0.0 && w.imag() == 0.0)
        throw std::invalid_argument("log_gamma: argument on the nonpositive real axis");
    Complex shift(0.0, 0.0);
    while (detail::needs_shift(w)) {
        shift += std::log(w);
        w += 1.0;
    }
    const Complex iw = 1.0 / w;
    const Complex iw2 = iw * iw;
    Complex series(0.0, 0.0);
    Complex p = iw;
    for (double c : detail::kStirlingLn) {
        series += c * p;
        p *= iw2;
    }
    constexpr double half_log_2pi = 0.91893853320467274178;
    return (w - 0.5) * std::log(w) - w + half_log_2pi + series - shift;
}

// digamma(w) = d/dw log Gamma(w)
inline Complex digamma(Complex w) {
    if (w.real() <= 0.0 && w.imag() == 0.0)
        throw std::invalid_argument("digamma: argument on the nonpositive real axis");
    Complex shift(0.0, 0.0);
    while (detail::needs_shift(w)) {
        shift += 1.0 / w;
        w += 1.0;
    }
    const Complex iw = 1.0 / w;
    const Complex iw2 = iw * iw;
    Complex series(0.0, 0.0);
    Complex p = iw2;
    for (double c : detail::kStirlingPsi) {
        series += c * p;
        p *= iw2;
    }
    return std::log(w) - 0.5 * iw - series - shift;
}

// trigamma(w) = d^2/dw^2 log Gamma(w)
inline Complex trigamma(Complex w) {
    if (w.real() <= 0.0 && w.imag() == 0.0)
        throw std::invalid_argument("trigamma: argument on the nonpositive real axis");
    Complex shift(0.0, 0.0);
    while (detail::needs_shift(w)) {
        shift += 1.0 / (w * w);
        w += 1.0;
    }
    const Complex iw = 1.0 / w;
    const Complex iw2 = iw * iw;
    Complex series(0.0, 0.0);
    Complex p = iw * iw2;
    for (double c : detail::kBernoulli) {
        series += c * p;
        p *= iw2;
    }
    return iw + 0.5 * iw2 + series + shift;
}

// ---------------------------------------------------------------------------
// Laguerre polynomials
// ---------------------------------------------------------------------------

// L_n(x) by upward recurrence; stable for the x, n ranges used here.
inline double laguerre(unsigned n, double x) {
    if (n == 0) return 1.0;
    double lm = 1.0, l = 1.0 - x;
    for (unsigned k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * l - k * lm) / (k + 1.0);
        lm = l;
        l = next;
    }
    return l;
}

// ---------------------------------------------------------------------------
// Compensated (Kahan) accumulation
// ---------------------------------------------------------------------------

struct KahanSum {
    double sum{0.0};
    double carry{0.0};

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

} // namespace decomc
