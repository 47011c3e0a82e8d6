// fock.hpp - exact brute-force reference for a finite noninteracting bath.
//
// The switching current displaces each mode by alpha_n = (i/sqrt(2 w_n)) J~_n(w_n)
// and contributes a c-number phase from the principal-value part of the free
// Green function; the delta-function part of G~ is the modulus and is carried
// by the diagonal displacement matrix elements
//   <n|D(alpha)|n> = e^{-|alpha|^2/2} L_n(|alpha|^2).
// Canonical and microcanonical coherence then reduce to weighted sums of
// these overlaps, with no saddle-point or continuum machinery involved.
// The microcanonical ensemble here constrains the bath alone; with J = 0 at
// the initial moment that is the same as constraining qubit plus bath.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include "decomc/bath.hpp"
#include "decomc/errors.hpp"
#include "decomc/special.hpp"
#include "decomc/thermal.hpp"

namespace decomc::fock {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct FockState {
    std::vector<int> occupations;  // one entry per mode
};

struct ExactCommensurateShell {
    long long M{0};       // total excitation number, energy E = M omega0
    double omega0{0.0};
};

struct WindowedShell {
    double E_center{0.0};
    double half_width{0.0};  // Delta E / 2 > 0
};

struct ShellSpec {
    std::variant<ExactCommensurateShell, WindowedShell> mode;
};

struct DisplacementSet {
    std::vector<Complex> alphas;
    Complex c_phase{1.0, 0.0};  // unit modulus global phase
};

struct ShellLimits {
    long long m_max{60};           // guard on the commensurate shell index
    std::size_t max_states{5'000'000};
};

// ---------------------------------------------------------------------------
// Displacement amplitudes
// ---------------------------------------------------------------------------

inline DisplacementSet displacement_amplitudes(const ModeSet& modes,
                                               const CurrentProfile& profile,
                                               const quad::Options& opts = {}) {
    modes.validate();
    profile.validate();
    DisplacementSet out;
    out.alphas.resize(modes.size());
    for (std::size_t n = 0; n < modes.size(); ++n) {
        const double w = modes.frequencies[n];
        out.alphas[n] = Complex(0.0, 1.0) / std::sqrt(2.0 * w) *
                        current_fourier(profile, modes.amplitudes[n], w);
    }
    const double q_i = DiscreteQ(modes, profile, true, opts).q_i();
    out.c_phase = std::exp(Complex(0.0, -q_i));
    return out;
}

// ---------------------------------------------------------------------------
// Shell enumeration
// ---------------------------------------------------------------------------

namespace detail {

// Restricted partition count: number of occupation lists with sum r_k n_k = M.
inline std::size_t shell_count(const std::vector<long long>& ratios, long long M) {
    std::vector<std::size_t> dp(static_cast<std::size_t>(M) + 1, 0);
    dp[0] = 1;
    for (long long r : ratios) {
        for (long long m = r; m <= M; ++m)
            dp[static_cast<std::size_t>(m)] += dp[static_cast<std::size_t>(m - r)];
    }
    return dp[static_cast<std::size_t>(M)];
}

} // namespace detail

// All occupation lists with sum_k r_k n_k = M on a commensurate ladder
// (base frequency inferred from the lowest mode).  Deterministic
// lexicographic order.
inline std::vector<FockState> enumerate_shell(const ModeSet& modes, long long M,
                                              const ShellLimits& limits = {}) {
    modes.validate();
    if (modes.empty()) throw std::invalid_argument("enumerate_shell: empty ModeSet");
    if (M < 0) throw std::invalid_argument("enumerate_shell: M must be >= 0");
    if (M > limits.m_max)
        throw ShellTooLarge("enumerate_shell: M exceeds the m_max guard");
    const auto ratios = commensurate_ratios(modes, modes.frequencies.front());
    const std::size_t expected = detail::shell_count(ratios, M);
    if (expected > limits.max_states)
        throw ShellTooLarge("enumerate_shell: shell holds " + std::to_string(expected) +
                            " states, above the max_states guard");

    std::vector<FockState> shell;
    shell.reserve(expected);
    std::vector<int> occ(modes.size(), 0);
    const auto rec = [&](auto&& self, std::size_t k, long long rem) -> void {
        if (k + 1 == modes.size()) {
            if (rem % ratios[k] == 0) {
                occ[k] = static_cast<int>(rem / ratios[k]);
                shell.push_back(FockState{occ});
                occ[k] = 0;
            }
            return;
        }
        for (long long nk = 0; nk * ratios[k] <= rem; ++nk) {
            occ[k] = static_cast<int>(nk);
            self(self, k + 1, rem - nk * ratios[k]);
        }
        occ[k] = 0;
    };
    rec(rec, 0, M);
    return shell;
}

// Occupation lists with |sum_k n_k omega_k - E_center| <= half_width, for
// incommensurate experiments.  Carries an explicit Delta-E dependence.
inline std::vector<FockState> enumerate_window(const ModeSet& modes, double E_center,
                                               double half_width,
                                               const ShellLimits& limits = {}) {
    modes.validate();
    if (modes.empty()) throw std::invalid_argument("enumerate_window: empty ModeSet");
    if (!(half_width > 0.0))
        throw std::invalid_argument("enumerate_window: half_width must be > 0");
    const double e_max = E_center + half_width;
    if (!(e_max >= 0.0)) throw std::invalid_argument("enumerate_window: window below 0");

    std::vector<FockState> shell;
    std::vector<int> occ(modes.size(), 0);
    const auto rec = [&](auto&& self, std::size_t k, double used) -> void {
        if (k == modes.size()) {
            if (std::abs(used - E_center) <= half_width) {
                shell.push_back(FockState{occ});
                if (shell.size() > limits.max_states)
                    throw ShellTooLarge("enumerate_window: max_states guard exceeded");
            }
            return;
        }
        const double w = modes.frequencies[k];
        for (int nk = 0; used + nk * w <= e_max; ++nk) {
            occ[k] = nk;
            self(self, k + 1, used + nk * w);
        }
        occ[k] = 0;
    };
    rec(rec, 0, 0.0);
    return shell;
}

// ---------------------------------------------------------------------------
// Exact coherence
// ---------------------------------------------------------------------------

namespace detail {

// e^{-x/2} L_n(x) tables per mode up to the needed occupation.
inline std::vector<std::vector<double>> overlap_tables(const std::vector<Complex>& alphas,
                                                       const std::vector<int>& n_caps) {
    std::vector<std::vector<double>> tables(alphas.size());
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        const double x = std::norm(alphas[k]);
        const double damp = std::exp(-0.5 * x);
        auto& tab = tables[k];
        tab.resize(static_cast<std::size_t>(n_caps[k]) + 1);
        for (int n = 0; n <= n_caps[k]; ++n)
            tab[static_cast<std::size_t>(n)] = damp * laguerre(static_cast<unsigned>(n), x);
    }
    return tables;
}

} // namespace detail

// C = prod_n sum_{k<=n_max} p_k(beta, w_n) e^{-x_n/2} L_k(x_n) times c_phase,
// p_k the normalized Bose weights.  TruncationError when any mode's dropped
// tail weight q^{n_max+1} reaches 1e-12.
inline Complex coherence_exact_canonical(const ModeSet& modes, const CurrentProfile& profile,
                                         double beta, int n_max,
                                         const quad::Options& opts = {}) {
    if (!(beta > 0.0))
        throw std::invalid_argument("coherence_exact_canonical: beta must be > 0");
    if (n_max < 0) throw std::invalid_argument("coherence_exact_canonical: n_max must be >= 0");
    const auto disp = displacement_amplitudes(modes, profile, opts);
    double product = 1.0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const double q = std::exp(-beta * modes.frequencies[k]);
        const double tail = std::pow(q, n_max + 1);
        if (!(tail < 1e-12))
            throw TruncationError("coherence_exact_canonical: canonical tail weight " +
                                  std::to_string(tail) + " at mode " + std::to_string(k));
        const double x = std::norm(disp.alphas[k]);
        const double damp = std::exp(-0.5 * x);
        KahanSum acc;
        double weight = 1.0 - q;  // p_0
        for (int n = 0; n <= n_max; ++n) {
            acc.add(weight * damp * laguerre(static_cast<unsigned>(n), x));
            weight *= q;
        }
        product *= acc.value();
    }
    return product * disp.c_phase;
}

// C = (1/#shell) sum_states prod_k e^{-x_k/2} L_{n_k}(x_k) times c_phase.
inline Complex coherence_exact_microcanonical(const ModeSet& modes,
                                              const CurrentProfile& profile, long long M,
                                              const ShellLimits& limits = {},
                                              const quad::Options& opts = {}) {
    const auto shell = enumerate_shell(modes, M, limits);
    const auto disp = displacement_amplitudes(modes, profile, opts);

    std::vector<int> caps(modes.size(), 0);
    for (const auto& st : shell)
        for (std::size_t k = 0; k < caps.size(); ++k)
            caps[k] = std::max(caps[k], st.occupations[k]);
    const auto tables = detail::overlap_tables(disp.alphas, caps);

    KahanSum acc;
    for (const auto& st : shell) {
        double p = 1.0;
        for (std::size_t k = 0; k < modes.size(); ++k)
            p *= tables[k][static_cast<std::size_t>(st.occupations[k])];
        acc.add(p);
    }
    return acc.value() / static_cast<double>(shell.size()) * disp.c_phase;
}

// ShellSpec dispatch: exact commensurate shell or energy window.
inline Complex coherence_exact(const ModeSet& modes, const CurrentProfile& profile,
                               const ShellSpec& shell, const ShellLimits& limits = {},
                               const quad::Options& opts = {});

// Windowed-shell variant (uniform mixture over the window).
inline Complex coherence_exact_windowed(const ModeSet& modes, const CurrentProfile& profile,
                                        const WindowedShell& window,
                                        const ShellLimits& limits = {},
                                        const quad::Options& opts = {}) {
    const auto shell = enumerate_window(modes, window.E_center, window.half_width, limits);
    if (shell.empty())
        throw std::invalid_argument("coherence_exact_windowed: empty energy window");
    const auto disp = displacement_amplitudes(modes, profile, opts);

    std::vector<int> caps(modes.size(), 0);
    for (const auto& st : shell)
        for (std::size_t k = 0; k < caps.size(); ++k)
            caps[k] = std::max(caps[k], st.occupations[k]);
    const auto tables = detail::overlap_tables(disp.alphas, caps);

    KahanSum acc;
    for (const auto& st : shell) {
        double p = 1.0;
        for (std::size_t k = 0; k < modes.size(); ++k)
            p *= tables[k][static_cast<std::size_t>(st.occupations[k])];
        acc.add(p);
    }
    return acc.value() / static_cast<double>(shell.size()) * disp.c_phase;
}

inline Complex coherence_exact(const ModeSet& modes, const CurrentProfile& profile,
                               const ShellSpec& shell, const ShellLimits& limits,
                               const quad::Options& opts) {
    if (const auto* exact = std::get_if<ExactCommensurateShell>(&shell.mode))
        return coherence_exact_microcanonical(modes, profile, exact->M, limits, opts);
    return coherence_exact_windowed(modes, profile, std::get<WindowedShell>(shell.mode), limits,
                                    opts);
}

} // namespace decomc::fock
