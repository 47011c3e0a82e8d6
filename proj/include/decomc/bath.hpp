// bath.hpp - bath mode structures, switching currents, spectral densities.
//
// Units: hbar = k_B = 1 throughout; frequencies are inverse times.
// The n_eff_si estimate is the one exception and works in SI units.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

#include "decomc/special.hpp"

namespace decomc {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Discrete bath: frequencies omega_n > 0 (strictly increasing) with real
// per-mode coupling amplitudes A_n.
struct ModeSet {
    std::vector<double> frequencies;
    std::vector<double> amplitudes;

    ModeSet() = default;
    ModeSet(std::vector<double> freqs, std::vector<double> amps)
        : frequencies(std::move(freqs)), amplitudes(std::move(amps)) {
        validate();
    }

    std::size_t size() const { return frequencies.size(); }
    bool empty() const { return frequencies.empty(); }

    void validate() const {
        if (frequencies.size() != amplitudes.size())
            throw std::invalid_argument("ModeSet: frequency/amplitude length mismatch");
        double prev = 0.0;
        for (double w : frequencies) {
            if (!(w > prev))
                throw std::invalid_argument(
                    "ModeSet: frequencies must be positive and strictly increasing");
            prev = w;
        }
    }
};

// Continuum bath description F(omega): Ohmic F = eta * omega, or a tabulated
// curve with linear interpolation (zero outside the tabulated support).
struct OhmicDensity {
    double eta{0.0};  // dissipative coefficient, >= 0
};

struct TabulatedDensity {
    std::vector<double> omega;  // strictly increasing, > 0
    std::vector<double> value;  // F(omega) >= 0

    double operator()(double w) const {
        if (omega.empty() || w <= omega.front() || w >= omega.back()) {
            // exact grid endpoints included below; outside support F = 0
            if (!omega.empty() && w == omega.front()) return value.front();
            if (!omega.empty() && w == omega.back()) return value.back();
            return 0.0;
        }
        const auto it = std::upper_bound(omega.begin(), omega.end(), w);
        const std::size_t i = static_cast<std::size_t>(it - omega.begin());
        const double u = (w - omega[i - 1]) / (omega[i] - omega[i - 1]);
        return value[i - 1] + u * (value[i] - value[i - 1]);
    }
};

struct SpectralDensity {
    std::variant<OhmicDensity, TabulatedDensity> form;

    static SpectralDensity ohmic(double eta) {
        if (!(eta >= 0.0)) throw std::invalid_argument("SpectralDensity: eta must be >= 0");
        return SpectralDensity{OhmicDensity{eta}};
    }

    static SpectralDensity tabulated(std::vector<double> omega, std::vector<double> value) {
        if (omega.size() != value.size() || omega.size() < 2)
            throw std::invalid_argument("SpectralDensity: need >= 2 matching (omega, F) points");
        double prev = 0.0;
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (!(omega[i] > prev))
                throw std::invalid_argument("SpectralDensity: omega must be positive increasing");
            if (!(value[i] >= 0.0))
                throw std::invalid_argument("SpectralDensity: F(omega) must be >= 0");
            prev = omega[i];
        }
        return SpectralDensity{TabulatedDensity{std::move(omega), std::move(value)}};
    }

    bool is_ohmic() const { return std::holds_alternative<OhmicDensity>(form); }
    const TabulatedDensity& table() const { return std::get<TabulatedDensity>(form); }

    double operator()(double w) const {
        if (const auto* o = std::get_if<OhmicDensity>(&form)) return w > 0.0 ? o->eta * w : 0.0;
        return std::get<TabulatedDensity>(form)(w);
    }
};

// Switching history: ramp up, plateau of duration t, ramp down.  omega_r is
// the ramp cutoff frequency (omega_r = 2 pi / tau_r); +infinity means a sharp
// rectangular pulse.  amplitude is a global scale multiplying the per-mode
// amplitudes carried by the ModeSet.
struct CurrentProfile {
    double t{0.0};
    double omega_r{std::numeric_limits<double>::infinity()};
    double amplitude{1.0};

    void validate() const {
        if (!(t >= 0.0)) throw std::invalid_argument("CurrentProfile: t must be >= 0");
        if (!(omega_r > 0.0)) throw std::invalid_argument("CurrentProfile: omega_r must be > 0");
    }
};

// Transmission line open at one end and closed at the other.
struct LineSpec {
    double length{1.0};
    double speed{1.0};
    std::size_t n_modes{1};

    enum class Boundary { OpenClosed } boundary{Boundary::OpenClosed};

    void validate() const {
        if (!(length > 0.0)) throw std::invalid_argument("LineSpec: length must be > 0");
        if (!(speed > 0.0)) throw std::invalid_argument("LineSpec: speed must be > 0");
        if (n_modes < 1) throw std::invalid_argument("LineSpec: n_modes must be >= 1");
    }
};

// Per-mode coupling amplitude rule: (mode index from 1, omega_n) -> A_n.
using CouplingRule = std::function<double(std::size_t, double)>;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Quarter-wave amplitude default for the open-closed line: A_n = sqrt(2/L),
// mode independent.  The overall drive strength lives in CurrentProfile.
inline CouplingRule line_coupling_default(double length) {
    const double a = std::sqrt(2.0 / length);
    return [a](std::size_t, double) { return a; };
}

inline CouplingRule constant_coupling(double a) {
    return [a](std::size_t, double) { return a; };
}

// Open-closed line quantization k_n = pi (n - 1/2) / L, omega_n = v_s k_n.
inline ModeSet transmission_line_modes(const LineSpec& spec, const CouplingRule& rule) {
    spec.validate();
    std::vector<double> freqs(spec.n_modes), amps(spec.n_modes);
    for (std::size_t n = 1; n <= spec.n_modes; ++n) {
        const double k = M_PI * (static_cast<double>(n) - 0.5) / spec.length;
        freqs[n - 1] = spec.speed * k;
        amps[n - 1] = rule(n, freqs[n - 1]);
    }
    return ModeSet(std::move(freqs), std::move(amps));
}

inline ModeSet transmission_line_modes(const LineSpec& spec) {
    return transmission_line_modes(spec, line_coupling_default(spec.length));
}

// Commensurate ladder omega_n = n * omega0; the desk-scale bath whose
// microcanonical shell is exact (used by the Fock oracle throughout).
inline ModeSet ladder_modes(double omega0, std::size_t n_modes, const CouplingRule& rule) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("ladder_modes: omega0 must be > 0");
    if (n_modes < 1) throw std::invalid_argument("ladder_modes: n_modes must be >= 1");
    std::vector<double> freqs(n_modes), amps(n_modes);
    for (std::size_t n = 1; n <= n_modes; ++n) {
        freqs[n - 1] = omega0 * static_cast<double>(n);
        amps[n - 1] = rule(n, freqs[n - 1]);
    }
    return ModeSet(std::move(freqs), std::move(amps));
}

// Fourier transform of the switching current for coupling amplitude a_n:
//   J~(Omega) = (a_n / i Omega)(e^{i Omega t} - 1) e^{-|Omega| / 2 omega_r}
// evaluated in the cancellation-free form a_n t sinc(Omega t / 2) e^{i Omega t / 2} x cutoff,
// with the Omega = 0 limit a_n t.
inline Complex current_fourier(const CurrentProfile& profile, double a_n, double Omega) {
    profile.validate();
    const double a = a_n * profile.amplitude;
    const double cutoff =
        std::isinf(profile.omega_r) ? 1.0 : std::exp(-std::abs(Omega) / (2.0 * profile.omega_r));
    if (Omega == 0.0) return Complex(a * profile.t * cutoff, 0.0);
    const double half = 0.5 * Omega * profile.t;
    const double mag = 2.0 * std::sin(half) / Omega;
    return a * mag * cutoff * std::exp(Complex(0.0, half));
}

// |J~_n(omega_n)|^2 for every mode; the only current data the decoherence
// sums need besides the principal-value integral.
inline std::vector<double> current_power_at_modes(const ModeSet& modes,
                                                  const CurrentProfile& profile) {
    std::vector<double> j2(modes.size());
    for (std::size_t n = 0; n < modes.size(); ++n) {
        j2[n] = std::norm(current_fourier(profile, modes.amplitudes[n], modes.frequencies[n]));
    }
    return j2;
}

// Discrete -> continuum conversion.  Each mode becomes a normalized triangular
// peak of half-width eps and weight pi A_n^2 / (2 omega_n): integrating the
// table against a smooth kernel reproduces the discrete decoherence sum up to
// O(eps^2) kernel curvature.
inline SpectralDensity spectral_density_from_modes(const ModeSet& modes, double eps) {
    modes.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("spectral_density_from_modes: eps must be > 0");
    if (modes.empty()) {
        return SpectralDensity::tabulated({eps, 2.0 * eps}, {0.0, 0.0});
    }
    double min_gap = modes.frequencies.front();
    for (std::size_t i = 1; i < modes.size(); ++i)
        min_gap = std::min(min_gap, modes.frequencies[i] - modes.frequencies[i - 1]);
    if (!(eps < 0.5 * min_gap))
        throw std::invalid_argument(
            "spectral_density_from_modes: eps must be below half the smallest mode gap");

    std::vector<double> omega, value;
    omega.reserve(3 * modes.size());
    value.reserve(3 * modes.size());
    for (std::size_t n = 0; n < modes.size(); ++n) {
        const double w = modes.frequencies[n];
        const double a = modes.amplitudes[n];
        const double weight = M_PI * a * a / (2.0 * w);
        omega.push_back(w - eps);
        value.push_back(0.0);
        omega.push_back(w);
        value.push_back(weight / eps);  // triangle area = weight
        omega.push_back(w + eps);
        value.push_back(0.0);
    }
    return SpectralDensity::tabulated(std::move(omega), std::move(value));
}

// Integer ratios omega_n / omega0 of a commensurate ladder; throws when any
// frequency is not an integer multiple of omega0 within the tolerance.
inline std::vector<long long> commensurate_ratios(const ModeSet& modes, double omega0,
                                                  double tol = 1e-9) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("commensurate_ratios: omega0 must be > 0");
    std::vector<long long> out;
    out.reserve(modes.size());
    for (double w : modes.frequencies) {
        const double r = w / omega0;
        const double k = std::round(r);
        if (!(std::abs(r - k) <= tol * std::max(1.0, r)) || k < 1.0)
            throw std::invalid_argument("commensurate_ratios: ModeSet is not a ladder on omega0");
        out.push_back(static_cast<long long>(k));
    }
    return out;
}

// Order-of-magnitude estimate of the thermally populated mode count of a line
// of length L meters at temperature T kelvin: k_B T L / (pi hbar c).
inline double n_eff_si(double L_meters, double T_kelvin) {
    if (!(L_meters > 0.0) || !(T_kelvin > 0.0))
        throw std::invalid_argument("n_eff_si: L and T must be > 0");
    constexpr double k_B = 1.380649e-23;        // J / K
    constexpr double hbar = 1.054571817e-34;    // J s
    constexpr double c = 2.99792458e8;          // m / s
    return k_B * T_kelvin * L_meters / (M_PI * hbar * c);
}

} // namespace decomc
